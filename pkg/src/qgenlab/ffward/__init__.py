"""Hidden fast-forwardable Hamiltonians: exact evolution, block-wise compilation, noisy inference."""

from .hamiltonian import (
    HiddenHamiltonian, build_scrambler, cz_pairs, exact_evolution_circuit, exact_z_expectations, time_grid,
)
from .ansatz import BlockAnsatz, block_window, window_pairs, ansatz_unitary_fn, BLOCK, R_LAYERS
from .learn import (
    BlockCost, Mode1Config, BlockResult, CompiledCircuit, train_block, assemble, assembly_rounds,
    mode1_learn, mode1_learn_series,
)
from .noise import (
    NoiseModel, NOISELESS, DEFAULT_SHOTS, predict_observables, faulty_identity, mitigate, mitigate_pauli,
    pauli_to_binary, binary_to_pauli,
)

__all__ = [
    "HiddenHamiltonian", "build_scrambler", "cz_pairs", "exact_evolution_circuit", "exact_z_expectations",
    "time_grid",
    "BlockAnsatz", "block_window", "window_pairs", "ansatz_unitary_fn", "BLOCK", "R_LAYERS",
    "BlockCost", "Mode1Config", "BlockResult", "CompiledCircuit", "train_block", "assemble",
    "assembly_rounds", "mode1_learn", "mode1_learn_series",
    "NoiseModel", "NOISELESS", "DEFAULT_SHOTS", "predict_observables", "faulty_identity", "mitigate",
    "mitigate_pauli", "pauli_to_binary", "binary_to_pauli",
]
