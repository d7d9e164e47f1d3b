"""Learning shallow circuits from randomized single-qubit measurement data."""

from .dataset import (
    LABELS, BASES, MeasurementRecord, MeasurementDataset, ShadowStatistics, collect_dataset,
)
from .estimation import (
    shadow_alpha, alpha_window, learn_observables, threshold_value, sample_size_bound,
    ObservableReport, PauliCoefficients, LeastSquaresProblem, least_squares_problem,
    fit_alpha_least_squares,
)
from .inversion import InversionConfig, LocalInversion, train_local_inversion, inversion_objective
from .sewing import (
    SewedCircuit, sew_local_inversions, direct_heisenberg_sew, true_inversion_error,
    true_heisenberg_error,
)
from .pipeline import (
    architecture_lightcones, learn_shallow_circuit, LearningReport, save_bundle, load_bundle,
)

__all__ = [
    "LABELS", "BASES", "MeasurementRecord", "MeasurementDataset", "ShadowStatistics", "collect_dataset",
    "shadow_alpha", "alpha_window", "learn_observables", "threshold_value", "sample_size_bound",
    "ObservableReport", "PauliCoefficients", "LeastSquaresProblem", "least_squares_problem",
    "fit_alpha_least_squares",
    "InversionConfig", "LocalInversion", "train_local_inversion", "inversion_objective",
    "SewedCircuit", "sew_local_inversions", "direct_heisenberg_sew", "true_inversion_error",
    "true_heisenberg_error",
    "architecture_lightcones", "learn_shallow_circuit", "LearningReport", "save_bundle", "load_bundle",
]
