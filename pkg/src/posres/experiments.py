"""Monte-Carlo phase-transition harness and the exhaustive sparsest-fit oracle.

Each trial draws a random cluster configuration (separation, noise level,
locations, amplitudes), synthesizes bounded-noise measurements, and records
whether number detection or location recovery succeeded, indexed by
log10(SRF) and log10(SNR) where SRF = pi/(omega*d_min) and SNR = m_min/sigma.
Success and failure separate along a band of slope 2n-2 (number detection)
or 2n-1 (location recovery); a logistic fit of the decision boundary
quantifies that slope.  Results serialize to CSV and a deterministic SVG
scatter plot.

The l0 oracle enumerates support subsets of a small candidate grid in order
of cardinality and returns the sparsest one admitting nonnegative amplitudes
that reproduce the data within the noise bound.  Amplitudes are fitted by
nonnegative least squares, a conservative surrogate for the max-modulus
program: the feasibility check itself is always the true max-modulus
residual, so a subset declared feasible genuinely is.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize, nnls
from scipy.special import expit

from .errors import DegenerateLabels, GridTooLarge, InfeasiblePacking
from .measures import (
    ClusterInterval,
    DiscreteMeasure,
    FourierMeasurement,
    MeasurementConfig,
    add_bounded_noise,
    default_sample_count,
    fourier_forward,
)
from .music import run_single_experiment
from .number_detection import detect_count_sweep

__all__ = [
    "OutputPaths",
    "PhaseDiagram",
    "PhaseRecord",
    "SamplingRanges",
    "emit_diagram",
    "fit_boundary_slope",
    "l0_grid_oracle",
    "run_phase_sweep",
    "sample_random_config",
    "theory_slope_for",
]

TASKS = ("number", "location")


@dataclass(frozen=True)
class SamplingRanges:
    """Declared sampling ranges for the randomized trials (log base 10)."""

    log_snr_min: float = 0.5
    log_snr_max: float = 6.0
    log_srf_min: float = 0.1
    log_srf_max: float = 1.1
    amp_factor_min: float = 1.0
    amp_factor_max: float = 3.0

    def __post_init__(self):
        if not (self.log_snr_min <= self.log_snr_max and self.log_srf_min <= self.log_srf_max):
            raise ValueError("range bounds must be ordered")
        if not (1.0 <= self.amp_factor_min <= self.amp_factor_max):
            raise ValueError("amplitude factors must satisfy 1 <= min <= max")

    def to_json_dict(self) -> dict:
        return {
            "log_snr_min": self.log_snr_min,
            "log_snr_max": self.log_snr_max,
            "log_srf_min": self.log_srf_min,
            "log_srf_max": self.log_srf_max,
            "amp_factor_min": self.amp_factor_min,
            "amp_factor_max": self.amp_factor_max,
        }


@dataclass(frozen=True)
class PhaseRecord:
    """One Monte-Carlo trial, replayable from its seed."""

    log_srf: float
    log_snr: float
    n: int
    success: bool
    seed: int
    task: str


@dataclass
class PhaseDiagram:
    """All trials of one sweep plus the fitted and theoretical boundary slopes."""

    records: list[PhaseRecord]
    n: int
    task: str
    theory_slope: int
    fitted_boundary_slope: float | None = None
    fitted_intercept: float | None = None
    resampled: int = 0


def theory_slope_for(task: str, n: int) -> int:
    """Predicted boundary slope: 2n-2 for number detection, 2n-1 for location."""
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}")
    return 2 * n - 2 if task == "number" else 2 * n - 1


def _trial_seed(master_seed: int, trial: int, attempt: int = 0) -> int:
    """Stable 64-bit per-trial seed from a counter construction."""
    state = np.random.SeedSequence([master_seed, trial, attempt]).generate_state(2, np.uint32)
    return int(state[0]) + (int(state[1]) << 32)


def _sample_config(n, omega, ranges, seed):
    """Draw one configuration; returns (measure, sigma, log_srf, log_snr)."""
    rng = np.random.default_rng(seed)
    log_snr = rng.uniform(ranges.log_snr_min, ranges.log_snr_max)
    log_srf = rng.uniform(ranges.log_srf_min, ranges.log_srf_max)
    m_min = 1.0
    sigma = m_min * 10.0 ** (-log_snr)
    d_min = math.pi / (omega * 10.0**log_srf)

    half = ClusterInterval(n, omega).half_width
    span_needed = (n - 1) * d_min
    if span_needed > 2.0 * half:
        raise InfeasiblePacking(
            f"{n} sources at separation {d_min:.4g} do not fit in an interval of length {2 * half:.4g}"
        )
    gaps = np.full(n - 1, d_min)
    if n > 2:
        # one anchored gap keeps the realized minimum separation exactly d_min
        extra = rng.uniform(0.0, (2.0 * half - span_needed) / (n - 1), n - 1)
        extra[rng.integers(0, n - 1)] = 0.0
        gaps = gaps + extra
    offsets = np.concatenate([[0.0], np.cumsum(gaps)])
    start = rng.uniform(-half, half - offsets[-1])
    supports = start + offsets

    factors = rng.uniform(ranges.amp_factor_min, ranges.amp_factor_max, n)
    amplitudes = m_min * factors / factors.min()
    return DiscreteMeasure(supports, amplitudes), sigma, log_srf, log_snr


def sample_random_config(
    n: int, omega: float, ranges: SamplingRanges, seed: int
) -> tuple[DiscreteMeasure, float]:
    """Random cluster configuration inside I(n, omega) and its noise level.

    The minimum separation of the returned measure equals the sampled d_min
    (one gap is anchored at exactly that value) and the smallest amplitude
    is exactly the sampled m_min.  Deterministic given seed.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    measure, sigma, _, _ = _sample_config(n, omega, ranges, seed)
    return measure, sigma


def run_phase_sweep(
    task: str,
    n: int,
    trials: int,
    ranges: SamplingRanges | None = None,
    seed: int = 0,
    omega: float = 1.0,
    m_samples: int | None = None,
) -> PhaseDiagram:
    """Run independent randomized trials of one task and collect the records.

    Trials use per-trial seeds derived from the master seed by a counter
    construction, so results do not depend on execution order; records are
    normalized by sorting on the per-trial seed.  Infeasible packings are
    resampled (counted in the diagram).
    """
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    ranges = ranges if ranges is not None else SamplingRanges()
    m = m_samples if m_samples is not None else default_sample_count(n)

    records: list[PhaseRecord] = []
    resampled = 0
    for trial in range(trials):
        for attempt in range(100):
            trial_seed = _trial_seed(seed, trial, attempt)
            try:
                measure, sigma, log_srf, log_snr = _sample_config(n, omega, ranges, trial_seed)
                break
            except InfeasiblePacking:
                resampled += 1
        else:
            raise InfeasiblePacking("resampling limit reached; widen the sampling ranges")

        config = MeasurementConfig(omega, m, sigma)
        noisy = add_bounded_noise(fourier_forward(measure, config), sigma, trial_seed + 1)
        if task == "number":
            n_max, _ = detect_count_sweep(noisy, sigma)
            success = n_max == n
        else:
            success = run_single_experiment(measure, noisy, n)
        records.append(PhaseRecord(log_srf, log_snr, n, success, trial_seed, task))

    records.sort(key=lambda record: record.seed)
    return PhaseDiagram(
        records=records,
        n=n,
        task=task,
        theory_slope=theory_slope_for(task, n),
        resampled=resampled,
    )


def _fit_logistic_boundary(x, y, labels, ridge=1e-8):
    """Linear logistic decision boundary log_snr = alpha*log_srf + beta.

    Features are centered and scaled for conditioning; the tiny ridge keeps
    the separable case finite while leaving the boundary essentially at the
    maximum-margin position.
    """
    xm, ym = float(x.mean()), float(y.mean())
    xs = float(x.std()) or 1.0
    ys = float(y.std()) or 1.0
    xn = (x - xm) / xs
    yn = (y - ym) / ys
    t = labels.astype(float)

    def objective(w):
        z = w[0] + w[1] * xn + w[2] * yn
        loss = float(np.mean(np.logaddexp(0.0, z) - t * z)) + 0.5 * ridge * (w[1] ** 2 + w[2] ** 2)
        resid = expit(z) - t
        grad = np.array(
            [
                resid.mean(),
                float((resid * xn).mean()) + ridge * w[1],
                float((resid * yn).mean()) + ridge * w[2],
            ]
        )
        return loss, grad

    result = minimize(
        objective,
        np.zeros(3),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 20000, "maxfun": 20000, "ftol": 1e-16, "gtol": 1e-12},
    )
    w0, w1, w2 = result.x
    if abs(w2) < 1e-9 * max(abs(w1), 1.0):
        raise ValueError("fitted boundary is vertical; outcomes carry no SNR dependence")
    alpha = -(ys * w1) / (xs * w2)
    beta = ym - ys * w0 / w2 - alpha * xm
    return float(alpha), float(beta)


def fit_boundary_slope(diagram: PhaseDiagram) -> float:
    """Fit the success/failure decision boundary and return its slope.

    Requires at least 200 records containing both outcomes; the slope (and
    intercept) are stored on the diagram as a side effect.
    """
    if len(diagram.records) < 200:
        raise ValueError("need at least 200 records to fit a boundary")
    labels = np.array([r.success for r in diagram.records], dtype=bool)
    if labels.all() or not labels.any():
        raise DegenerateLabels("all trials share one outcome; no boundary to fit")
    x = np.array([r.log_srf for r in diagram.records])
    y = np.array([r.log_snr for r in diagram.records])
    alpha, beta = _fit_logistic_boundary(x, y, labels)
    diagram.fitted_boundary_slope = alpha
    diagram.fitted_intercept = beta
    return alpha


def l0_grid_oracle(
    meas: FourierMeasurement, grid, n_max: int
) -> DiscreteMeasure | None:
    """Sparsest positive on-grid measure reproducing the data within sigma.

    Enumerates support subsets by increasing cardinality (then lexicographic
    order), fits nonnegative amplitudes by least squares, and accepts a
    subset when the true max-modulus residual over the sample frequencies is
    strictly below the noise bound.  Within one cardinality, a strictly
    smaller residual wins.  Returns the empty measure when the data are
    already below the noise bound, or None when nothing feasible exists up
    to n_max sources.
    """
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size > 24:
        raise GridTooLarge("candidate grid limited to 24 points")
    if n_max > 4:
        raise GridTooLarge("exhaustive search limited to n_max <= 4")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if np.unique(grid).size != grid.size:
        raise ValueError("grid points must be distinct")
    sigma = meas.config.sigma
    if not (sigma > 0):
        raise ValueError("measurement must carry a positive noise bound")

    grid = np.sort(grid)
    values = meas.values
    if float(np.max(np.abs(values))) < sigma:
        return DiscreteMeasure([], [])

    atoms = np.exp(1j * np.outer(meas.frequencies, grid))
    stacked = np.vstack([atoms.real, atoms.imag])
    target = np.concatenate([values.real, values.imag])
    for cardinality in range(1, n_max + 1):
        best = None
        for combo in itertools.combinations(range(grid.size), cardinality):
            cols = list(combo)
            amplitudes, _ = nnls(stacked[:, cols], target)
            residual = float(np.max(np.abs(atoms[:, cols] @ amplitudes - values)))
            if residual < sigma and (best is None or residual < best[0]):
                best = (residual, cols, amplitudes)
        if best is not None:
            _, cols, amplitudes = best
            keep = amplitudes > 0
            return DiscreteMeasure(grid[np.asarray(cols)][keep], amplitudes[keep])
    return None


@dataclass(frozen=True)
class OutputPaths:
    """Destination files for a rendered phase diagram."""

    csv: Path
    svg: Path


def emit_diagram(diagram: PhaseDiagram, paths: OutputPaths) -> None:
    """Write the records as CSV and a deterministic SVG scatter plot."""
    if not diagram.records:
        raise ValueError("diagram has no records to emit")
    lines = ["log_srf,log_snr,n,task,success,seed"]
    for r in diagram.records:
        lines.append(f"{r.log_srf!r},{r.log_snr!r},{r.n},{r.task},{int(r.success)},{r.seed}")
    Path(paths.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    Path(paths.svg).write_text(_render_svg(diagram), encoding="utf-8")


def _guide_intercepts(diagram: PhaseDiagram) -> list[float]:
    """Intercepts for guide lines of theoretical slope bracketing the transition."""
    k = diagram.theory_slope
    c_success = [r.log_snr - k * r.log_srf for r in diagram.records if r.success]
    c_failure = [r.log_snr - k * r.log_srf for r in diagram.records if not r.success]
    if c_success and c_failure:
        return sorted({min(c_success), max(c_failure)})
    c_all = [r.log_snr - k * r.log_srf for r in diagram.records]
    return [float(np.median(c_all))]


def _render_svg(diagram: PhaseDiagram) -> str:
    width, height = 800, 600
    left, right, top, bottom = 70, 20, 30, 55
    xs = [r.log_srf for r in diagram.records]
    ys = [r.log_snr for r in diagram.records]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = 0.05 * (x_hi - x_lo) or 0.5
    y_pad = 0.05 * (y_hi - y_lo) or 0.5
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right)

    def py(y):
        return top + (y_hi - y) / (y_hi - y_lo) * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        "<defs><clipPath id=\"plot\">"
        f'<rect x="{left}" y="{top}" width="{width - left - right}" height="{height - top - bottom}"/>'
        "</clipPath></defs>",
        f'<rect x="{left}" y="{top}" width="{width - left - right}" height="{height - top - bottom}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = x_lo + frac * (x_hi - x_lo)
        y = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<line x1="{px(x):.2f}" y1="{height - bottom}" x2="{px(x):.2f}" '
            f'y2="{height - bottom + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px(x):.2f}" y="{height - bottom + 20}" font-family="sans-serif" '
            f'font-size="12" text-anchor="middle">{x:.2f}</text>'
        )
        parts.append(
            f'<line x1="{left - 5}" y1="{py(y):.2f}" x2="{left}" y2="{py(y):.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{py(y):.2f}" font-family="sans-serif" font-size="12" '
            f'text-anchor="end" dominant-baseline="middle">{y:.2f}</text>'
        )
    parts.append(
        f'<text x="{(left + width - right) / 2:.2f}" y="{height - 10}" font-family="sans-serif" '
        'font-size="14" text-anchor="middle">log10(SRF)</text>'
    )
    parts.append(
        f'<text x="18" y="{(top + height - bottom) / 2:.2f}" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle" transform="rotate(-90 18 {(top + height - bottom) / 2:.2f})">log10(SNR)</text>'
    )
    parts.append(
        f'<text x="{(left + width - right) / 2:.2f}" y="20" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">task={diagram.task} n={diagram.n} trials={len(diagram.records)} '
        f"theory slope={diagram.theory_slope}</text>"
    )
    parts.append('<g clip-path="url(#plot)">')
    for c in _guide_intercepts(diagram):
        parts.append(
            f'<line x1="{px(x_lo):.2f}" y1="{py(diagram.theory_slope * x_lo + c):.2f}" '
            f'x2="{px(x_hi):.2f}" y2="{py(diagram.theory_slope * x_hi + c):.2f}" '
            'stroke="black" stroke-dasharray="6 4" stroke-width="1.5"/>'
        )
    for r in diagram.records:
        color = "#1f77b4" if r.success else "#d62728"
        parts.append(f'<circle cx="{px(r.log_srf):.2f}" cy="{py(r.log_snr):.2f}" r="3" fill="{color}"/>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
