import numpy as np
import pytest
import scipy.linalg

from qgenlab.ffward import (
    BlockAnsatz, BlockCost, HiddenHamiltonian, Mode1Config, NOISELESS, NoiseModel, ansatz_unitary_fn,
    block_window, build_scrambler, exact_evolution_circuit, exact_z_expectations, faulty_identity, mitigate,
    mitigate_pauli, mode1_learn_series, predict_observables, time_grid,
)
from qgenlab.qcore import Statevector, apply_circuit, make_rng


def z_of_register(circuit, qubits):
    p = np.abs(apply_circuit(Statevector.zero(circuit.num_qubits), circuit).amplitudes) ** 2
    idx = np.arange(p.size)
    return np.array([np.sum(p * (1 - 2 * ((idx >> q) & 1))) for q in qubits])


@pytest.fixture(scope="module")
def compiled_n4():
    ham = HiddenHamiltonian.random(4, 3)
    times = [0.2, 0.5]
    return ham, times, mode1_learn_series(ham, times, Mode1Config(restarts=4), seed=0)


def test_exact_circuit_is_exponential():
    ham = HiddenHamiltonian.random(4, 1)
    for t in (0.3, 2.0):
        u = exact_evolution_circuit(ham, t).unitary()
        assert np.allclose(u, scipy.linalg.expm(-1j * ham.matrix() * t), atol=1e-10)


def test_hamiltonian_serialization_and_scrambler_shape():
    ham = HiddenHamiltonian.random(6, 5)
    back = HiddenHamiltonian.from_dict(ham.to_dict())
    assert np.allclose(back.matrix(), ham.matrix())
    assert build_scrambler(6, 0).depth == 5
    assert build_scrambler(2, 0).depth == 3
    assert build_scrambler(4, 7).to_json() == build_scrambler(4, 7).to_json()
    with pytest.raises(ValueError):
        build_scrambler(1, 0)


def test_time_grids():
    short, long = time_grid("short"), time_grid("long")
    assert short.size == long.size == 41
    assert short[0] == pytest.approx(0.001)
    assert long[0] == pytest.approx(3 * np.pi / 40 * 1e6 + 0.001)
    assert np.allclose(np.diff(short), 3 * np.pi / 40)
    with pytest.raises(ValueError):
        time_grid("medium")


def test_block_window_and_ansatz_unitary():
    assert block_window(0, 8) == (0, 1, 2, 3, 4, 5)
    assert block_window(1, 8) == (2, 3, 4, 5, 6, 7)
    window = (0, 1, 2, 3)
    ans = BlockAnsatz(window)
    theta = make_rng(0, "test", "ansatz").uniform(0, 2 * np.pi, ans.num_params)
    dense = np.asarray(ansatz_unitary_fn(window)(theta))
    assert np.allclose(dense, ans.circuit(theta, 4).unitary(), atol=1e-12)


def test_block_cost_gradient():
    ham = HiddenHamiltonian.random(4, 2)
    cost = BlockCost(exact_evolution_circuit(ham, 0.4), 0)
    theta = make_rng(0, "test", "grad").uniform(0, 1, cost.num_params)
    v, g = cost.value_and_grad(theta)
    assert v == pytest.approx(float(cost.deviations(theta).sum()))
    e = np.zeros_like(theta)
    e[5] = 1e-6
    fd = (cost(theta + e) - cost(theta - e)) / 2e-6
    assert g[5] == pytest.approx(fd, abs=1e-6)


def test_compiled_matches_exact(compiled_n4):
    ham, times, comps = compiled_n4
    for t, comp in zip(times, comps):
        # with n = 4 the window has no margin, so the fit plateaus near 1e-4
        assert max(comp.residuals) < 1e-3
        z = predict_observables(comp)
        assert np.abs(z - exact_z_expectations(ham, t)).max() < 0.05
        # density-matrix inference agrees with a plain statevector run of the sewed circuit
        assert np.allclose(z, z_of_register(comp.circuit, comp.output_qubits), atol=1e-10)
    assert len({c.gate_count for c in comps}) == 1


def test_noise_and_mitigation(compiled_n4):
    ham, times, comps = compiled_n4
    comp = comps[0]
    readout_only = NoiseModel(0.0, 0.0, 0.05)
    raw = predict_observables(comp, readout_only)
    ref = predict_observables(faulty_identity(comp), readout_only)
    assert np.allclose(raw, 0.9 * predict_observables(comp))
    # pure readout noise is inverted exactly by the faulty-identity reference
    assert np.allclose(mitigate_pauli(raw, ref), predict_observables(comp))
    noisy = predict_observables(comp, NoiseModel(), shots=1000, rng=make_rng(0, "test", "shots"))
    assert np.all(np.abs(noisy) <= 1)
    assert np.array_equal(predict_observables(faulty_identity(comp), NOISELESS), np.ones(4))


def test_mitigate_formula():
    assert mitigate(0.3, 0.1) == pytest.approx((0.3 - 0.1) / 0.8)
    with pytest.raises(ZeroDivisionError):
        mitigate(0.3, 0.5)
    with pytest.raises(ValueError):
        NoiseModel(p1=1.5)
