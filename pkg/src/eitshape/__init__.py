"""Gap-current simulation and qualitative inclusion reconstruction.

The package simulates the boundary current perturbation caused by a
Robin-transmission inclusion inside the unit disk and recovers the
inclusion from that data: a subspace localization method for clouds of
small discs, and a filtered spectral indicator for extended regions.
"""

from .core import (BoundaryGrid, ConcentricDisc, CurrentGapMatrix,
                   FourierBasisSet, Geometry, IndicatorField,
                   RobinCoefficient, SamplingGrid, SmallDiscs, StarShaped,
                   boundary_curve, harmonic_lifting)
from .greens import (green, poisson_normal_derivative, probe_matrix,
                     probe_vector)
from .forward_series import (SeriesCoefficients, TruncationReport,
                             assemble_series_operator, gap_mode_weights,
                             kernel, mode_coefficients, mode_eigenvalue,
                             truncation_error_report)
from .forward_bie import (BieDiscretization, ScalingReport,
                          asymptotic_current_gap, asymptotic_current_gap_matrix,
                          asymptotic_scaling_report, born_current_gap,
                          born_current_gap_matrix, current_gap,
                          current_gap_matrix, discretize,
                          nodal_current_gap_matrix, solve_trace, solve_traces)
from .music import (ResponseMatrix, assemble_response, detect_rank,
                    extract_peaks, music_field, noise_projection, probe_phi,
                    probe_stack, synthetic_response)
from .factorization import (FilterSpec, NoisySystem, apply_noise,
                            contour_points, filter_value, indicator,
                            level_set, w_field)
from .cli import (ConfigError, ScenarioConfig, bundled_scenarios, load_config,
                  main, read_field_csv, run_scenario, validate_config)

__version__ = "0.1.0"

__all__ = [
    "BoundaryGrid", "ConcentricDisc", "CurrentGapMatrix", "FourierBasisSet",
    "Geometry", "IndicatorField", "RobinCoefficient", "SamplingGrid",
    "SmallDiscs", "StarShaped", "boundary_curve", "harmonic_lifting",
    "green", "poisson_normal_derivative", "probe_matrix", "probe_vector",
    "SeriesCoefficients", "TruncationReport", "assemble_series_operator",
    "gap_mode_weights", "kernel", "mode_coefficients", "mode_eigenvalue",
    "truncation_error_report",
    "BieDiscretization", "ScalingReport", "asymptotic_current_gap",
    "asymptotic_current_gap_matrix", "asymptotic_scaling_report",
    "born_current_gap", "born_current_gap_matrix", "current_gap",
    "current_gap_matrix", "discretize", "nodal_current_gap_matrix",
    "solve_trace", "solve_traces",
    "ResponseMatrix", "assemble_response", "detect_rank", "extract_peaks",
    "music_field", "noise_projection", "probe_phi", "probe_stack",
    "synthetic_response",
    "FilterSpec", "NoisySystem", "apply_noise", "contour_points",
    "filter_value", "indicator", "level_set", "w_field",
    "ConfigError", "ScenarioConfig", "bundled_scenarios", "load_config",
    "main", "read_field_csv", "run_scenario", "validate_config",
    "__version__",
]
