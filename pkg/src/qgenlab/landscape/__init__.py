"""SWAP-4 landscapes: targets, ansaetze, local cost, trap configurations and restart statistics."""

from .targets import (
    SwapTargetSpec, build_swap_target, ansatz_unitary, ansatz_template, num_params, exp_swap,
    enumerate_theta_x, theta_star, block_parameter_indices, link_parameter_indices,
)
from .cost import (
    channel_ptms, local_cost, qubit_local_costs, channel_deviations, local_cost_montecarlo,
)
from .optimize import OptimizerConfig, OptimizeResult, optimize, finite_difference_grad
from .experiments import (
    restart_success_probability, wilson_interval, SuccessEstimate, landscape_slice,
    LandscapeSlice, orthonormalize, strict_local_minima, slice_directions,
)

__all__ = [
    "SwapTargetSpec", "build_swap_target", "ansatz_unitary", "ansatz_template", "num_params", "exp_swap",
    "enumerate_theta_x", "theta_star", "block_parameter_indices", "link_parameter_indices",
    "channel_ptms", "local_cost", "qubit_local_costs", "channel_deviations", "local_cost_montecarlo",
    "OptimizerConfig", "OptimizeResult", "optimize", "finite_difference_grad",
    "restart_success_probability", "wilson_interval", "SuccessEstimate", "landscape_slice",
    "LandscapeSlice", "orthonormalize", "strict_local_minima", "slice_directions",
]
