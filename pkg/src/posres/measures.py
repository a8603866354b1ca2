"""Positive point-source configurations and band-limited Fourier measurements.

A configuration of point sources is a positive discrete measure: supports
y_1 < ... < y_n with amplitudes a_j > 0.  It is observed through samples of
its Fourier transform

    F(w) = sum_j a_j * exp(i * y_j * w)

taken at M evenly spaced frequencies covering [-omega, omega], each sample
corrupted by an arbitrary complex perturbation of modulus strictly below the
noise level sigma.

Two closeness predicates are exposed on purpose:

* ``is_sigma_admissible`` compares a candidate measure with measured data at
  the M sample frequencies -- this is what the detection and recovery
  algorithms actually see;
* ``sup_norm_gap`` approximates the continuum sup-norm distance between two
  measures' transforms on a dense grid -- this is what the worst-case
  constructions must certify.

The dense grid is an approximation from below of the true sup norm; the
transforms involved are trigonometric polynomials with few terms, so the
default 4096-point grid resolves them (doubling the grid changes the result
by well under 1%).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import OverlappingIntervals

__all__ = [
    "ClusterInterval",
    "DiscreteMeasure",
    "FourierMeasurement",
    "MeasurementConfig",
    "add_bounded_noise",
    "default_sample_count",
    "fourier_forward",
    "is_in_delta_neighborhood",
    "is_sigma_admissible",
    "sup_norm_gap",
]


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiscreteMeasure:
    """Positive discrete measure: strictly increasing supports, amplitudes > 0.

    The empty measure (no sources, transform identically zero) is a valid
    value; it arises as the sparsest admissible explanation of data that are
    dominated by noise.  Measures used to generate measurements normally
    carry at least one source.
    """

    supports: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        supports = _frozen_array(self.supports)
        amplitudes = _frozen_array(self.amplitudes)
        if supports.shape != amplitudes.shape:
            raise ValueError("supports and amplitudes must have equal length")
        if supports.size > 1 and not np.all(np.diff(supports) > 0):
            raise ValueError("supports must be strictly increasing")
        if not np.all(np.isfinite(supports)):
            raise ValueError("supports must be finite")
        if amplitudes.size and (not np.all(np.isfinite(amplitudes)) or np.any(amplitudes <= 0)):
            raise ValueError("amplitudes must be finite and strictly positive")
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def n(self) -> int:
        return int(self.supports.size)

    @property
    def m_min(self) -> float:
        """Smallest amplitude; defined for at least one source."""
        if self.n < 1:
            raise ValueError("m_min is undefined for an empty measure")
        return float(self.amplitudes.min())

    @property
    def d_min(self) -> float:
        """Smallest pairwise support distance; defined for n >= 2."""
        if self.n < 2:
            raise ValueError("d_min is undefined for fewer than two sources")
        return float(np.diff(self.supports).min())

    def fourier_at(self, omegas) -> np.ndarray:
        """Fourier transform sum_j a_j exp(i y_j w) at the given frequencies."""
        omegas = np.asarray(omegas, dtype=float)
        if self.n == 0:
            return np.zeros(omegas.shape, dtype=complex)
        return np.exp(1j * np.multiply.outer(omegas, self.supports)) @ self.amplitudes.astype(complex)

    def to_json_dict(self) -> dict:
        return {"supports": self.supports.tolist(), "amplitudes": self.amplitudes.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiscreteMeasure":
        return cls(data["supports"], data["amplitudes"])


@dataclass(frozen=True)
class MeasurementConfig:
    """Sampling configuration: cutoff frequency, sample count, noise bound.

    m_samples must be odd so that w = 0 and both endpoints +-omega are
    sample points.
    """

    omega: float
    m_samples: int
    sigma: float

    def __post_init__(self):
        if not (self.omega > 0):
            raise ValueError("omega must be positive")
        if self.m_samples < 3 or self.m_samples % 2 == 0:
            raise ValueError("m_samples must be an odd integer >= 3")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @property
    def frequencies(self) -> np.ndarray:
        return np.linspace(-self.omega, self.omega, self.m_samples)

    @property
    def spacing(self) -> float:
        return 2.0 * self.omega / (self.m_samples - 1)


def default_sample_count(n: int) -> int:
    """Default M = 2*s_max + 1 with s_max = 2n, enough for the full s-sweep."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 4 * n + 1


@dataclass(frozen=True)
class FourierMeasurement:
    """Frequency samples Y(w_m), m = 1..M, on the evenly spaced grid."""

    config: MeasurementConfig
    frequencies: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        frequencies = _frozen_array(self.frequencies)
        values = _frozen_array(self.values, dtype=complex)
        if frequencies.size != self.config.m_samples or values.size != frequencies.size:
            raise ValueError("frequencies/values length must match config.m_samples")
        expected = self.config.frequencies
        if not np.allclose(frequencies, expected, rtol=0.0, atol=1e-12 * self.config.omega):
            raise ValueError("frequencies must be evenly spaced from -omega to omega")
        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "values", values)

    @property
    def m_samples(self) -> int:
        return int(self.values.size)

    def to_json_dict(self) -> dict:
        return {
            "omega": self.config.omega,
            "sigma": self.config.sigma,
            "frequencies": self.frequencies.tolist(),
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FourierMeasurement":
        values = np.array([complex(re, im) for re, im in data["values"]])
        config = MeasurementConfig(data["omega"], len(values), data["sigma"])
        return cls(config, data["frequencies"], values)


@dataclass(frozen=True)
class ClusterInterval:
    """Symmetric interval of a few Rayleigh limits that contains the cluster."""

    n: int
    omega: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (self.omega > 0):
            raise ValueError("omega must be positive")

    @property
    def half_width(self) -> float:
        return (self.n - 1) * math.pi / (2.0 * self.omega)

    def contains(self, x) -> bool:
        return bool(np.all(np.abs(np.asarray(x, dtype=float)) <= self.half_width))


def fourier_forward(mu: DiscreteMeasure, config: MeasurementConfig) -> FourierMeasurement:
    """Noiseless forward map: sample the transform of mu on config's grid."""
    frequencies = config.frequencies
    return FourierMeasurement(config, frequencies, mu.fourier_at(frequencies))


def add_bounded_noise(meas: FourierMeasurement, sigma: float, seed: int) -> FourierMeasurement:
    """Perturb every sample by an independent complex value of modulus < sigma.

    Draws are uniform on the complex disc of radius sigma * (1 - 1e-9), the
    least-informative distribution under the bound; deterministic given seed.
    The measurement config is left untouched.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0.0:
        return meas
    rng = np.random.default_rng(seed)
    m = meas.m_samples
    radius = sigma * (1.0 - 1e-9) * np.sqrt(rng.uniform(0.0, 1.0, m))
    angle = rng.uniform(0.0, 2.0 * np.pi, m)
    noise = radius * np.exp(1j * angle)
    return FourierMeasurement(meas.config, meas.frequencies, meas.values + noise)


def sup_norm_gap(f, g, omega: float, grid_density: int = 4096) -> float:
    """Max of |F[f](w) - F[g](w)| over a dense grid on [-omega, omega].

    `f` and `g` may be positive or signed discrete measures (anything with a
    ``fourier_at`` method).  The result is a lower bound on the continuum sup
    norm; the integrands are trigonometric polynomials with few terms, so a
    dense grid resolves them at desk scale.
    """
    if grid_density < 1000:
        raise ValueError("grid_density must be at least 1000")
    if not (omega > 0):
        raise ValueError("omega must be positive")
    grid = np.linspace(-omega, omega, grid_density)
    return float(np.max(np.abs(f.fourier_at(grid) - g.fourier_at(grid))))


def is_sigma_admissible(candidate: DiscreteMeasure, meas: FourierMeasurement) -> bool:
    """True when the candidate's transform is within sigma of the data.

    Checked at the M sample frequencies (the discrete surrogate of the
    continuum condition); strict inequality, matching the noise bound.
    """
    gap = np.max(np.abs(candidate.fourier_at(meas.frequencies) - meas.values)) if meas.m_samples else 0.0
    return bool(gap < meas.config.sigma)


def is_in_delta_neighborhood(candidate: DiscreteMeasure, truth: DiscreteMeasure, delta: float) -> bool:
    """True when candidate supports match truth supports one-to-one within delta.

    Each candidate support must fall in exactly one of the open intervals
    (y_k - delta, y_k + delta) and each interval must receive exactly one
    support.  The intervals must be pairwise disjoint, i.e. delta <= d_min/2.
    """
    if candidate.n != truth.n:
        raise ValueError("candidate and truth must have the same number of supports")
    if not (delta > 0):
        raise ValueError("delta must be positive")
    if truth.n >= 2 and delta > truth.d_min / 2.0:
        raise OverlappingIntervals(
            f"delta={delta} exceeds half the minimum separation {truth.d_min / 2.0}"
        )
    hits = np.abs(candidate.supports[:, None] - truth.supports[None, :]) < delta
    return bool(np.all(hits.sum(axis=1) == 1) and np.all(hits.sum(axis=0) == 1))
