"""Worst-case source configurations that defeat number detection and
stable support recovery at a prescribed noise level.

All constructions share one mechanism.  Take 2n-1 or 2n tightly clustered
nodes t_1 < ... < t_k with spacing parameter tau, and find the amplitude
vector a that annihilates all power moments up to order k-2:

    sum_j a_j * t_j^p = 0   for p = 0, ..., k-2.

That vector spans the one-dimensional null space of a rectangular
Vandermonde system; its signs strictly alternate along the nodes, so
splitting by sign yields two positive measures mu (odd or even nodes) and
mu_hat (the complementary nodes, negated).  The transform of the signed
difference then has a Taylor series starting at order k-1, which keeps the
sup-norm gap over [-omega, omega] below sigma while mu and mu_hat differ
structurally: fewer sources, interleaved sources, or clustered satellites.

Null vectors are evaluated through the closed-form Lagrange product, as a
ratio of products accumulated in log-magnitude plus sign.  A generic linear
solve would go through the Vandermonde matrix itself, which is exponentially
ill-conditioned for clustered nodes -- the very phenomenon under study.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLayout, DuplicateNodes, InvalidRatio
from .measures import DiscreteMeasure, sup_norm_gap

__all__ = [
    "AdversarialPair",
    "KdMeasure",
    "SignedDiscreteMeasure",
    "construct_clustered_adversarial",
    "construct_number_adversarial",
    "construct_support_adversarial",
    "embed_1d_in_kd",
    "extremal_product_bruteforce",
    "lagrange_inverse_row",
    "vandermonde_null_vector",
]

VERIFICATION_GRID = 8192  # denser than the sup_norm_gap default: the gap < sigma claim is an inequality


@dataclass(frozen=True)
class SignedDiscreteMeasure:
    """Discrete measure with nonzero amplitudes of mixed sign."""

    supports: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        supports = np.array(self.supports, dtype=float).reshape(-1)
        amplitudes = np.array(self.amplitudes, dtype=float).reshape(-1)
        if supports.shape != amplitudes.shape:
            raise ValueError("supports and amplitudes must have equal length")
        if supports.size > 1 and not np.all(np.diff(supports) > 0):
            raise ValueError("supports must be strictly increasing")
        if np.any(amplitudes == 0):
            raise ValueError("amplitudes must be nonzero")
        supports.setflags(write=False)
        amplitudes.setflags(write=False)
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def n(self) -> int:
        return int(self.supports.size)

    def fourier_at(self, omegas) -> np.ndarray:
        omegas = np.asarray(omegas, dtype=float)
        return np.exp(1j * np.multiply.outer(omegas, self.supports)) @ self.amplitudes.astype(complex)

    def moment(self, order: int) -> float:
        """Power moment sum_j a_j * t_j^order."""
        return float(np.sum(self.amplitudes * self.supports**order))

    def positive_part(self) -> DiscreteMeasure:
        mask = self.amplitudes > 0
        return DiscreteMeasure(self.supports[mask], self.amplitudes[mask])

    def negative_part(self) -> DiscreteMeasure:
        """The negated negative amplitudes, as a positive measure."""
        mask = self.amplitudes < 0
        return DiscreteMeasure(self.supports[mask], -self.amplitudes[mask])


@dataclass(frozen=True)
class AdversarialPair:
    """Two positive measures whose transforms differ by less than sigma.

    kind "number":    mu has n supports spaced 2*tau, mu_hat has n-1;
    kind "support":   both have n supports, interleaved with spacing tau;
    kind "clustered": mu has n supports spaced s*tau, mu_hat's supports sit
                      tau away from every other mu support.
    """

    kind: str
    mu: DiscreteMeasure
    mu_hat: DiscreteMeasure
    tau: float
    sigma: float
    m_min: float
    omega: float
    verified_gap: float

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "tau": self.tau,
            "sigma": self.sigma,
            "m_min": self.m_min,
            "omega": self.omega,
            "verified_gap": self.verified_gap,
            "mu": self.mu.to_json_dict(),
            "mu_hat": self.mu_hat.to_json_dict(),
        }


@dataclass(frozen=True)
class KdMeasure:
    """Positive discrete measure in k dimensions (distinct support vectors)."""

    supports: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        supports = np.atleast_2d(np.array(self.supports, dtype=float))
        amplitudes = np.array(self.amplitudes, dtype=float).reshape(-1)
        if supports.shape[0] != amplitudes.size:
            raise ValueError("one support vector per amplitude required")
        if np.any(amplitudes <= 0):
            raise ValueError("amplitudes must be strictly positive")
        diffs = supports[:, None, :] - supports[None, :, :]
        dist = np.linalg.norm(diffs, axis=-1)
        if supports.shape[0] > 1 and np.min(dist[~np.eye(len(dist), dtype=bool)]) == 0.0:
            raise ValueError("support vectors must be distinct")
        supports.setflags(write=False)
        amplitudes.setflags(write=False)
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def n(self) -> int:
        return int(self.supports.shape[0])

    @property
    def dim(self) -> int:
        return int(self.supports.shape[1])

    @property
    def d_min(self) -> float:
        if self.n < 2:
            raise ValueError("d_min is undefined for fewer than two sources")
        diffs = self.supports[:, None, :] - self.supports[None, :, :]
        dist = np.linalg.norm(diffs, axis=-1)
        return float(np.min(dist[~np.eye(self.n, dtype=bool)]))

    def fourier_at(self, omega_vectors) -> np.ndarray:
        """Transform sum_j a_j exp(i y_j . w) at rows of omega_vectors."""
        w = np.atleast_2d(np.asarray(omega_vectors, dtype=float))
        return np.exp(1j * (w @ self.supports.T)) @ self.amplitudes.astype(complex)


def _check_distinct(nodes: np.ndarray) -> None:
    if nodes.size > 1 and np.min(np.abs(np.subtract.outer(nodes, nodes)[~np.eye(nodes.size, dtype=bool)])) == 0.0:
        raise DuplicateNodes("nodes must be pairwise distinct")


def lagrange_inverse_row(nodes, t: float) -> np.ndarray:
    """Lagrange basis polynomials of the nodes, evaluated at t.

    Entry j is P_j(t) = prod_{q != j} (t - t_q) / (t_j - t_q), so the result
    reproduces moments: sum_j P_j(t) * t_j^m = t^m for m = 0..len(nodes)-1.
    """
    nodes = np.asarray(nodes, dtype=float)
    _check_distinct(nodes)
    k = nodes.size
    row = np.empty(k)
    for j in range(k):
        num = t - np.delete(nodes, j)
        den = nodes[j] - np.delete(nodes, j)
        row[j] = np.prod(num / den)
    return row


def vandermonde_null_vector(nodes, moment_order: int) -> np.ndarray:
    """Amplitudes annihilating all power moments of the nodes up to moment_order.

    Requires len(nodes) == moment_order + 2 so the null space is exactly
    one-dimensional.  The vector is anchored with a_last = 1; each other
    entry is the negated Lagrange product of the remaining nodes evaluated
    at the last node, accumulated in log-magnitude plus sign so clustered
    node sets cannot overflow or cancel.  For increasing nodes the signs
    strictly alternate, with sign(a_j) = (-1)^(last - j).
    """
    nodes = np.asarray(nodes, dtype=float)
    k = nodes.size
    if k != moment_order + 2:
        raise ValueError("need exactly moment_order + 2 nodes")
    if k < 2:
        raise ValueError("need at least two nodes")
    _check_distinct(nodes)
    t_last = nodes[-1]
    a = np.empty(k)
    a[-1] = 1.0
    for j in range(k - 1):
        log_mag = 0.0
        sign = -1.0
        for q in range(k - 1):
            if q == j:
                continue
            num = t_last - nodes[q]
            den = nodes[j] - nodes[q]
            log_mag += math.log(abs(num)) - math.log(abs(den))
            if num < 0:
                sign = -sign
            if den < 0:
                sign = -sign
        a[j] = sign * math.exp(log_mag)
    return a


def _validate_ratio(sigma: float, m_min: float, strict: bool = False) -> None:
    if not (sigma > 0) or not (m_min > 0):
        raise InvalidRatio("sigma and m_min must be positive")
    if strict:
        if sigma >= m_min:
            raise InvalidRatio("sigma must be strictly below m_min")
    elif sigma > m_min:
        raise InvalidRatio("sigma must not exceed m_min")


def _verified_pair(kind, nodes, amplitudes, mu_index, tau, sigma, m_min, omega) -> AdversarialPair:
    """Split the signed measure by parity, verify the gap on the dense grid."""
    other = 1 - mu_index
    mu = DiscreteMeasure(nodes[mu_index::2], amplitudes[mu_index::2])
    mu_hat = DiscreteMeasure(nodes[other::2], -amplitudes[other::2])
    gap = sup_norm_gap(mu, mu_hat, omega, VERIFICATION_GRID)
    return AdversarialPair(kind, mu, mu_hat, tau, sigma, m_min, omega, gap)


def construct_number_adversarial(n: int, omega: float, sigma: float, m_min: float = 1.0) -> AdversarialPair:
    """Pair (mu with n sources, mu_hat with n-1) indistinguishable below sigma.

    Nodes are (j - n) * tau for j = 1..2n-1 with
    tau = e^{-1}/omega * (sigma/m_min)^(1/(2n-2)), all moments up to 2n-3
    vanish, and mu (the odd-index part, scaled so its smallest amplitude is
    exactly m_min) has minimum separation exactly 2*tau.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (omega > 0):
        raise ValueError("omega must be positive")
    _validate_ratio(sigma, m_min)
    tau = math.exp(-1.0) / omega * (sigma / m_min) ** (1.0 / (2 * n - 2))
    nodes = (np.arange(1, 2 * n) - n) * tau
    a = vandermonde_null_vector(nodes, 2 * n - 3)
    a = m_min * (a / np.min(np.abs(a[0::2])))  # anchored entry scales to exactly m_min
    return _verified_pair("number", nodes, a, 0, tau, sigma, m_min, omega)


def construct_support_adversarial(n: int, omega: float, sigma: float, m_min: float = 1.0) -> AdversarialPair:
    """Two interleaved n-source measures indistinguishable below sigma.

    Nodes are (j - n - 1/2) * tau for j = 1..2n with
    tau = e^{-1}/omega * (sigma/m_min)^(1/(2n-1)); mu takes the odd-index
    nodes, mu_hat the even-index ones, so every mu_hat support falls exactly
    between two mu supports (spacing tau) and no neighborhood matching of
    radius <= tau is possible.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (omega > 0):
        raise ValueError("omega must be positive")
    _validate_ratio(sigma, m_min)
    tau = math.exp(-1.0) / omega * (sigma / m_min) ** (1.0 / (2 * n - 1))
    nodes = (np.arange(1, 2 * n + 1) - n - 0.5) * tau
    a = -vandermonde_null_vector(nodes, 2 * n - 2)  # anchor a_{2n} < 0, odd-index entries positive
    a = m_min * (a / np.min(np.abs(a[0::2])))
    return _verified_pair("support", nodes, a, 0, tau, sigma, m_min, omega)


def construct_clustered_adversarial(
    n: int, s: float, omega: float, sigma: float, m_min: float = 1.0
) -> AdversarialPair:
    """Unstable-recovery pair: satellites at distance tau from sparse sources.

    mu places n sources spaced s*tau (even-index nodes); mu_hat places its
    sources at distance tau below/above every other mu source, with
    tau = 0.2 e^{-1} / (omega * s^((2n+1)/(2n-1))) * (sigma/m_min)^(1/(2n-1)).
    Requires s > 2 so the satellite pairs stay clear of neighboring sources.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (omega > 0):
        raise ValueError("omega must be positive")
    if not (s > 2):
        raise DegenerateLayout("s must exceed 2 so satellites do not collide")
    _validate_ratio(sigma, m_min, strict=True)
    tau = 0.2 * math.exp(-1.0) / (omega * s ** ((2.0 * n + 1.0) / (2.0 * n - 1.0)))
    tau *= (sigma / m_min) ** (1.0 / (2 * n - 1))

    nodes = np.empty(2 * n)
    for j in range(2, 2 * n + 1, 2):  # 1-based even indices: the sparse grid
        nodes[j - 1] = -(s * n - 2.0) / 2.0 * tau + (j - 2) * s / 2.0 * tau
    for j in range(1, 2 * n + 1, 2):  # 1-based odd indices: satellites
        base = 4 * math.ceil((j + 1) / 4) - 2
        nodes[j - 1] = nodes[base - 1] + (-1.0) ** ((j + 1) // 2) * tau
    if not np.all(np.diff(nodes) > 0):
        raise DegenerateLayout("constructed nodes are not strictly increasing")

    a = vandermonde_null_vector(nodes, 2 * n - 2)  # anchor a_{2n} > 0, even-index entries positive
    a = m_min * (a / np.min(np.abs(a[1::2])))
    return _verified_pair("clustered", nodes, a, 1, tau, sigma, m_min, omega)


def embed_1d_in_kd(pair: AdversarialPair, k: int) -> tuple[KdMeasure, KdMeasure]:
    """Place both measures of a pair on the first axis of R^k.

    The axis embedding preserves all pairwise distances, and the k-D Fourier
    gap over the ball of radius omega equals the 1-D gap: the transform of
    the embedded difference depends on w_1 only.
    """
    if k < 1:
        raise ValueError("k must be >= 1")

    def embed(measure: DiscreteMeasure) -> KdMeasure:
        points = np.zeros((measure.n, k))
        points[:, 0] = measure.supports
        return KdMeasure(points, measure.amplitudes)

    return embed(pair.mu), embed(pair.mu_hat)


def extremal_product_bruteforce(points, mode: str = "min") -> tuple[int, float]:
    """Exhaustive argmin/argmax of prod_{x != z} |x - z| over z in points.

    Returns (index of the extremizer, log of the extremal product); products
    are accumulated in the log domain because they grow factorially.  Ties
    resolve to the smallest index.  Limited to 20 points.
    """
    points = np.asarray(points, dtype=float)
    if points.size < 2:
        raise ValueError("need at least two points")
    if points.size > 20:
        raise ValueError("brute force limited to 20 points")
    _check_distinct(points)
    if mode not in ("min", "max"):
        raise ValueError("mode must be 'min' or 'max'")
    diffs = np.abs(np.subtract.outer(points, points))
    np.fill_diagonal(diffs, 1.0)
    log_products = np.sum(np.log(diffs), axis=1)
    idx = int(np.argmin(log_products) if mode == "min" else np.argmax(log_products))
    return idx, float(log_products[idx])
