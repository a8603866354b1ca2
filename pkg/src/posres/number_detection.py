"""Source counting by singular-value thresholding of a measurement Hankel matrix.

Decimating the M frequency samples to 2s+1 points z_t = -omega + (t-1)/s * omega
and arranging them in the (s+1) x (s+1) Hankel matrix H[p][q] = Y(z_{p+q})
exposes the source count: the noiseless matrix factors through an (s+1) x n
Vandermonde factor and so has rank exactly n, while a bounded perturbation of
entry size below sigma can move every singular value by at most (s+1)*sigma.
Counting the singular values above that threshold therefore recovers n
whenever the sources are separated well enough; sweeping s and keeping the
largest count makes the best of a fixed frequency budget.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel

from .errors import IncompatibleGrid
from .measures import FourierMeasurement

__all__ = [
    "DetectionReport",
    "HankelMatrix",
    "assemble_hankel",
    "detect_count_fixed_s",
    "detect_count_sweep",
    "zeta_separation",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HankelMatrix:
    """(s+1) x (s+1) Hankel matrix of decimated frequency samples."""

    s: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (self.s + 1, self.s + 1):
            raise ValueError("entries must be (s+1) x (s+1)")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)


@dataclass(frozen=True)
class DetectionReport:
    """Singular values, threshold (s+1)*sigma, and the resulting count."""

    s: int
    singular_values: np.ndarray
    threshold: float
    estimated_n: int

    def __post_init__(self):
        sv = np.array(self.singular_values, dtype=float)
        if np.any(np.diff(sv) > 0):
            raise ValueError("singular values must be sorted decreasing")
        sv.setflags(write=False)
        object.__setattr__(self, "singular_values", sv)

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "threshold": self.threshold,
            "estimated_n": self.estimated_n,
            "singular_values": self.singular_values.tolist(),
        }


def assemble_hankel(meas: FourierMeasurement, s: int) -> HankelMatrix:
    """Decimate the samples to 2s+1 points and form the Hankel matrix.

    Requires (M-1) divisible by 2s so the decimated points land exactly on
    sample frequencies; raises IncompatibleGrid otherwise.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    m = meas.m_samples
    if m < 2 * s + 1 or (m - 1) % (2 * s) != 0:
        raise IncompatibleGrid(f"cannot decimate M={m} samples to 2s+1={2 * s + 1} evenly")
    stride = (m - 1) // (2 * s)
    decimated = meas.values[::stride]
    return HankelMatrix(s, hankel(decimated[: s + 1], decimated[s:]))


def detect_count_fixed_s(meas: FourierMeasurement, s: int, sigma: float) -> DetectionReport:
    """Count the singular values of the decimated Hankel matrix above (s+1)*sigma.

    Returns the largest j whose j-th singular value exceeds the threshold,
    or 0 when none does (pure noise at level sigma cannot lift any singular
    value above the threshold).
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    matrix = assemble_hankel(meas, s)
    sv = matrix.singular_values()
    threshold = (s + 1) * sigma
    above = np.flatnonzero(sv > threshold)
    estimated = int(above[-1]) + 1 if above.size else 0
    return DetectionReport(s, sv, threshold, estimated)


def detect_count_sweep(meas: FourierMeasurement, sigma: float) -> tuple[int, list[DetectionReport]]:
    """Run the fixed-s detector for every s up to (M-1)/2, keep the maximum.

    Values of s that do not divide the grid evenly are skipped (logged, not
    errors).  Returns (max count, one report per attempted s).
    """
    m = meas.m_samples
    reports: list[DetectionReport] = []
    n_max = 0
    for s in range(1, (m - 1) // 2 + 1):
        if (m - 1) % (2 * s) != 0:
            log.debug("sweep: skipping s=%d (grid of %d samples not divisible)", s, m)
            continue
        report = detect_count_fixed_s(meas, s, sigma)
        reports.append(report)
        n_max = max(n_max, report.estimated_n)
    return n_max, reports


def zeta_separation(n: int, s: int, sigma: float, m_min: float, omega: float) -> float:
    """Separation beyond which the fixed-s detector provably finds all n sources.

    Returns pi*s/omega * (2n(s+1)/zeta(n)^2 * sigma/m_min)^(1/(2n-2)) with
    zeta(n) = ((n-1)/2)!^2 for odd n and (n/2)! * ((n-2)/2)! for even n.
    """
    if n < 2 or s < n:
        raise ValueError("need s >= n >= 2")
    if not (sigma > 0) or not (m_min > 0) or not (omega > 0):
        raise ValueError("sigma, m_min and omega must be positive")
    if n % 2 == 1:
        zeta = float(math.factorial((n - 1) // 2)) ** 2
    else:
        zeta = float(math.factorial(n // 2)) * float(math.factorial((n - 2) // 2))
    ratio = 2.0 * n * (s + 1) / zeta**2 * sigma / m_min
    return math.pi * s / omega * ratio ** (1.0 / (2 * n - 2))
