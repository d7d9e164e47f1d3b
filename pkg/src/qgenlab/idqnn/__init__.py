"""Instantaneously-deep QNN: shallow and deep samplers, angle learning, Clifford proxy, XEB."""

from .lattice import LatticeGraph, IdqnnModel, bits_to_index, index_to_bits
from .sampling import (
    exact_distribution, sample_shallow, sample_deep, exact_deep_distribution,
    empirical_distribution, tvd,
)
from .learning import InputDistribution, BetaEstimate, learn_beta, fold_beta, qualifying_mask
from .clifford import round_to_clifford, sample_clifford, clifford_log2_prob, clifford_distribution
from .xeb import xeb_score, xeb_normalized, xeb_simple, xeb_from_log2, xeb_standard_error
from .layered import (
    LayeredRound, LayeredDeepCircuit, build_idqnn_from_layered, simulate_injected,
    injected_joint_distribution, random_layered,
)

__all__ = [
    "LatticeGraph", "IdqnnModel", "bits_to_index", "index_to_bits",
    "exact_distribution", "sample_shallow", "sample_deep", "exact_deep_distribution",
    "empirical_distribution", "tvd",
    "InputDistribution", "BetaEstimate", "learn_beta", "fold_beta", "qualifying_mask",
    "round_to_clifford", "sample_clifford", "clifford_log2_prob", "clifford_distribution",
    "xeb_score", "xeb_normalized", "xeb_simple", "xeb_from_log2", "xeb_standard_error",
    "LayeredRound", "LayeredDeepCircuit", "build_idqnn_from_layered", "simulate_injected",
    "injected_joint_distribution", "random_layered",
]
