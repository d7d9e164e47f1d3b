import numpy as np
import pytest

from qgenlab.qcore import (
    Circuit, Gate, PauliObservable, PauliString, StabilizerTableau, Statevector, apply_circuit, apply_matrix,
    backward_lightcone, gate_matrix, heisenberg_evolve, make_rng, measure_qubit, nearest_unitary,
    operator_norm, pauli_decompose, pauli_matrix, random_brickwork, random_unitary, reset_qubit, swap_pow,
    zero_state,
)
from qgenlab.qcore.statevector import sample_bitstrings

CLIFFORD_1Q = ["H", "S", "SDG", "X", "Y", "Z"]
CLIFFORD_2Q = ["CZ", "CNOT", "SWAP"]


def random_clifford(n, depth, rng):
    gates = []
    for _ in range(depth):
        if n > 1 and rng.random() < 0.4:
            a, b = rng.choice(n, 2, replace=False)
            gates.append(Gate(str(rng.choice(CLIFFORD_2Q)), (int(a), int(b))))
        else:
            gates.append(Gate(str(rng.choice(CLIFFORD_1Q)), (int(rng.integers(n)),)))
    return Circuit.from_gates(n, gates)


def tableau_probabilities(circ):
    """Exact outcome distribution by enumerating forced measurement branches."""
    n = circ.num_qubits
    t = StabilizerTableau(n)
    for g in circ.gates():
        t.apply(g)
    probs = np.zeros(2 ** n)

    def branch(tab, q, idx, p):
        if q == n:
            probs[idx] += p
            return
        probe = tab.copy()
        try:
            bit, random = probe.measure_z(q, forced=0)
        except ValueError:  # deterministic outcome 1
            bit, random = probe.measure_z(q)
        if not random:
            branch(probe, q + 1, idx | (bit << q), p)
            return
        for bit in (0, 1):
            tb = tab.copy()
            tb.measure_z(q, forced=bit)
            branch(tb, q + 1, idx | (bit << q), 0.5 * p)

    branch(t, 0, 0, 1.0)
    return probs


def test_make_rng_is_hierarchical_and_reproducible():
    a = make_rng(3, "x", 1).random(5)
    assert np.array_equal(a, make_rng(3, "x", 1).random(5))
    assert not np.array_equal(a, make_rng(3, "x", 2).random(5))
    assert not np.array_equal(a, make_rng(4, "x", 1).random(5))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CZ", (0, 0))
    with pytest.raises(ValueError):
        Gate("H", (0, 1))
    with pytest.raises(ValueError):
        Gate("Dense", (0,), matrix=np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        Gate("FOO", (0,))


def test_swap_pow_endpoints():
    assert np.allclose(swap_pow(0.0), np.eye(4))
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(swap_pow(1.0), swap)
    assert np.allclose(swap_pow(0.5) @ swap_pow(0.5), swap)


def test_apply_matrix_little_endian():
    # X on qubit 0 of |00> gives index 1
    psi = apply_matrix(zero_state(2), pauli_matrix("X"), (0,), 2)
    assert np.isclose(abs(psi[1]), 1.0)
    # CNOT with control on the first target
    psi = apply_matrix(psi, gate_matrix(Gate("CNOT", (0, 1))), (0, 1), 2)
    assert np.isclose(abs(psi[3]), 1.0)


def test_circuit_unitary_matches_statevector():
    rng = make_rng(0, "test", "brick")
    c = random_brickwork(4, 3, rng)
    u = c.unitary()
    assert np.allclose(u.conj().T @ u, np.eye(16))
    sv = apply_circuit(Statevector.zero(4), c)
    assert np.allclose(sv.amplitudes, u[:, 0])
    assert np.allclose(c.inverse().unitary() @ u, np.eye(16))


def test_circuit_json_roundtrip():
    c = random_brickwork(3, 2, make_rng(1, "test"))
    back = Circuit.from_json(c.to_json())
    assert np.allclose(back.unitary(), c.unitary())
    assert back.to_json() == c.to_json()


def test_measure_and_reset():
    rng = make_rng(0, "test", "measure")
    sv = Statevector.zero(2)
    bit, post = measure_qubit(sv, 0, "X", rng)
    assert bit in (0, 1)
    assert np.isclose(post.norm, 1.0)
    plus = Statevector(1, np.array([1, 1]) / np.sqrt(2))
    counts = [measure_qubit(plus, 0, "Z", rng)[0] for _ in range(2000)]
    assert abs(np.mean(counts) - 0.5) < 0.05
    reset = reset_qubit(Statevector(1, np.array([0, 1])), 0, rng)
    assert np.isclose(abs(reset.amplitudes[0]), 1.0)


def test_sample_bitstrings_frequencies():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    idx = sample_bitstrings(p, 100000, make_rng(0, "test", "sample"))
    freq = np.bincount(np.asarray(idx).reshape(-1), minlength=4) / 100000
    assert np.abs(freq - p).max() < 0.01


def test_operator_norm_dense_and_iterative():
    rng = make_rng(0, "test", "norm")
    m = rng.standard_normal((16, 16))
    assert np.isclose(operator_norm(m), np.linalg.svd(m, compute_uv=False)[0])
    big = rng.standard_normal((512, 512))
    assert np.isclose(operator_norm(big), np.linalg.svd(big, compute_uv=False)[0], rtol=1e-8)
    with pytest.raises(ValueError):
        operator_norm(np.ones((2, 3)))


def test_nearest_unitary_is_closest():
    rng = make_rng(0, "test", "polar")
    u = random_unitary(4, rng)
    assert np.allclose(nearest_unitary(u), u)
    m = u + 0.1 * rng.standard_normal((4, 4))
    v = nearest_unitary(m)
    assert np.allclose(v.conj().T @ v, np.eye(4))
    for _ in range(20):
        w = random_unitary(4, rng)
        assert np.linalg.norm(m - v) <= np.linalg.norm(m - w) + 1e-12


def test_pauli_algebra():
    x, y, z = PauliString("X"), PauliString("Y"), PauliString("Z")
    p = x * y
    assert p.letters == "Z" and p.phase == 1j
    assert np.allclose((x * y).matrix(), x.matrix() @ y.matrix())
    assert np.allclose(z.matrix() @ z.matrix(), np.eye(2))
    with pytest.raises(ValueError):
        PauliString("XQ")


def test_pauli_matrix_matches_qubit_order():
    full = pauli_matrix("XI")  # X on qubit 0
    ref = apply_matrix(np.eye(4, dtype=complex), pauli_matrix("X"), (0,), 2).T
    assert np.allclose(full, ref)


def test_pauli_decompose_roundtrip():
    rng = make_rng(0, "test", "decomp")
    h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = h + h.conj().T
    obs = pauli_decompose(h)
    assert np.allclose(obs.matrix(), h)
    assert all(isinstance(c, float) for c in obs.terms.values())
    with pytest.raises(ValueError):
        pauli_decompose(np.eye(3))


def test_heisenberg_evolve_oracle_and_lightcone():
    rng = make_rng(0, "test", "heis")
    c = random_brickwork(5, 2, rng)
    u = c.unitary()
    for q in range(5):
        for P in "XYZ":
            p = PauliString.single(5, q, P)
            obs = heisenberg_evolve(c, p)
            assert np.allclose(obs.matrix(), u.conj().T @ p.matrix() @ u, atol=1e-10)
            assert set(obs.support) <= backward_lightcone(c, {q})
    with pytest.raises(ValueError):
        heisenberg_evolve(c, PauliString("IIIII"))


def test_observable_window_rejects_outside_terms():
    obs = PauliObservable(3, {"XIZ": 1.0})
    assert obs.support == (0, 2)
    with pytest.raises(ValueError):
        obs.matrix(window=[0, 1])


@pytest.mark.parametrize("seed", range(8))
def test_stabilizer_matches_statevector(seed):
    rng = make_rng(seed, "test", "clifford")
    n = int(rng.integers(1, 7))
    c = random_clifford(n, 10, rng)
    exact = np.abs(c.unitary()[:, 0]) ** 2
    assert np.allclose(tableau_probabilities(c), exact, atol=1e-12)


def test_stabilizer_commutation_survives_measurement():
    rng = make_rng(0, "test", "tableau")
    t = StabilizerTableau(5)
    c = random_clifford(5, 30, rng)
    for g in c.gates():
        t.apply(g)
        assert t.commutation_ok()
    for q in range(5):
        t.measure(q, "X", rng)
        assert t.commutation_ok()
    t.reset(0, rng)
    assert t.measure_z(0)[0] == 0


def test_stabilizer_rejects_non_clifford():
    with pytest.raises(ValueError):
        StabilizerTableau(1).apply(Gate("RZ", (0,), (0.3,)))


def test_stabilizer_sampling_tvd():
    rng = make_rng(0, "test", "stab-sample")
    c = random_clifford(5, 25, rng)
    exact = np.abs(c.unitary()[:, 0]) ** 2
    counts = np.zeros(32)
    for _ in range(20000):
        t = StabilizerTableau(5)
        for g in c.gates():
            t.apply(g)
        idx = sum(t.measure_z(q, rng)[0] << q for q in range(5))
        counts[idx] += 1
    assert 0.5 * np.abs(counts / counts.sum() - exact).sum() < 0.02
