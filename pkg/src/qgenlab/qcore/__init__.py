"""Exact statevector and stabilizer simulation, Pauli algebra, lightcones and channel windows."""

from .gates import Gate, gate_matrix, swap_pow, phased_xz, r_xyz, rz, rx, ry
from .circuit import Circuit, window_unitary, random_brickwork
from .statevector import (
    Statevector, apply_circuit, apply_gate, apply_matrix, measure_qubit, reset_qubit,
    zero_state, product_state,
)
from .pauli import (
    PauliString, PauliObservable, pauli_matrix, pauli_decompose, heisenberg_evolve,
    backward_lightcone, lightcone_gates,
)
from .linalg import operator_norm, nearest_unitary, random_unitary
from .superop import (
    superoperator, reduce_superoperator, single_qubit_ptm, window_channel_deviation,
    channel_superop_oracle,
)
from .stabilizer import StabilizerTableau, stabilizer_apply, stabilizer_measure
from .rng import make_rng

__all__ = [
    "Gate", "gate_matrix", "swap_pow", "phased_xz", "r_xyz", "rz", "rx", "ry",
    "Circuit", "window_unitary", "random_brickwork",
    "Statevector", "apply_circuit", "apply_gate", "apply_matrix", "measure_qubit", "reset_qubit",
    "zero_state", "product_state",
    "PauliString", "PauliObservable", "pauli_matrix", "pauli_decompose", "heisenberg_evolve",
    "backward_lightcone", "lightcone_gates",
    "operator_norm", "nearest_unitary", "random_unitary",
    "superoperator", "reduce_superoperator", "single_qubit_ptm", "window_channel_deviation",
    "channel_superop_oracle",
    "StabilizerTableau", "stabilizer_apply", "stabilizer_measure",
    "make_rng",
]
