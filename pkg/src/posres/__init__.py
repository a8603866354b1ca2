"""Resolution limits for super-resolving positive point sources from noisy band-limited Fourier data.

Library layout:

* ``measures``          positive discrete measures, Fourier sampling, noise,
                        admissibility and neighborhood predicates
* ``constructions``     worst-case adversarial pairs from Vandermonde null
                        spaces, axis embeddings, brute-force product extrema
* ``number_detection``  Hankel singular-value-thresholding source counting
* ``music``             imaging functional, peak selection, stability trials,
                        closed-form separation bounds
* ``experiments``       Monte-Carlo phase diagrams, boundary-slope fitting,
                        exhaustive sparsest-fit oracle, CSV/SVG emission
* ``cli``               the ``posres`` command-line front end
"""

from .constructions import (
    AdversarialPair,
    KdMeasure,
    SignedDiscreteMeasure,
    construct_clustered_adversarial,
    construct_number_adversarial,
    construct_support_adversarial,
    embed_1d_in_kd,
    extremal_product_bruteforce,
    lagrange_inverse_row,
    vandermonde_null_vector,
)
from .experiments import (
    OutputPaths,
    PhaseDiagram,
    PhaseRecord,
    SamplingRanges,
    emit_diagram,
    fit_boundary_slope,
    l0_grid_oracle,
    run_phase_sweep,
    sample_random_config,
    theory_slope_for,
)
from .measures import (
    ClusterInterval,
    DiscreteMeasure,
    FourierMeasurement,
    MeasurementConfig,
    add_bounded_noise,
    default_sample_count,
    fourier_forward,
    is_in_delta_neighborhood,
    is_sigma_admissible,
    sup_norm_gap,
)
from .music import (
    MusicImage,
    PeakSelectionParams,
    SeparationBounds,
    default_window,
    music_image,
    noise_space_projection,
    run_single_experiment,
    select_peaks,
    separation_bounds,
)
from .number_detection import (
    DetectionReport,
    HankelMatrix,
    assemble_hankel,
    detect_count_fixed_s,
    detect_count_sweep,
    zeta_separation,
)

__version__ = "0.1.0"

__all__ = [
    "AdversarialPair",
    "ClusterInterval",
    "DetectionReport",
    "DiscreteMeasure",
    "FourierMeasurement",
    "HankelMatrix",
    "KdMeasure",
    "MeasurementConfig",
    "MusicImage",
    "OutputPaths",
    "PeakSelectionParams",
    "PhaseDiagram",
    "PhaseRecord",
    "SamplingRanges",
    "SeparationBounds",
    "SignedDiscreteMeasure",
    "add_bounded_noise",
    "assemble_hankel",
    "construct_clustered_adversarial",
    "construct_number_adversarial",
    "construct_support_adversarial",
    "default_sample_count",
    "default_window",
    "detect_count_fixed_s",
    "detect_count_sweep",
    "embed_1d_in_kd",
    "emit_diagram",
    "extremal_product_bruteforce",
    "fit_boundary_slope",
    "fourier_forward",
    "is_in_delta_neighborhood",
    "is_sigma_admissible",
    "l0_grid_oracle",
    "lagrange_inverse_row",
    "music_image",
    "noise_space_projection",
    "run_phase_sweep",
    "run_single_experiment",
    "sample_random_config",
    "select_peaks",
    "separation_bounds",
    "sup_norm_gap",
    "theory_slope_for",
    "vandermonde_null_vector",
    "zeta_separation",
]
