import math

import numpy as np
import pytest

from qgenlab.qcore import Circuit, Gate, PauliString, heisenberg_evolve, make_rng, operator_norm, random_brickwork
from qgenlab.qcore.linalg import random_unitary
from qgenlab.shadowlearn import (
    BASES, InversionConfig, LearningReport, MeasurementDataset, PauliCoefficients, ShadowStatistics,
    architecture_lightcones, collect_dataset, direct_heisenberg_sew, fit_alpha_least_squares,
    learn_observables, learn_shallow_circuit, least_squares_problem, load_bundle, sample_size_bound,
    save_bundle, sew_local_inversions, shadow_alpha, threshold_value, train_local_inversion,
    true_heisenberg_error, true_inversion_error,
)


def exact_observables(circ):
    n = circ.num_qubits
    return {(i, P): heisenberg_evolve(circ, PauliString.single(n, i, P)) for i in range(n) for P in BASES}


def depth1(n, rng):
    return Circuit.from_gates(n, [Gate("Dense", (a, a + 1), matrix=random_unitary(4, rng))
                                  for a in range(0, n - 1, 2)])


def test_dataset_jsonl_roundtrip():
    rng = make_rng(0, "test", "ds")
    ds = collect_dataset(random_brickwork(3, 1, rng), 50, rng)
    back = MeasurementDataset.from_jsonl(ds.to_jsonl())
    assert back.to_jsonl() == ds.to_jsonl()
    rec = ds.record(0)
    assert len(rec.inputs) == 3 and all(b in BASES for b, _ in rec.outputs)
    with pytest.raises(ValueError):
        MeasurementDataset.from_jsonl("\n")


def test_forced_inputs_are_deterministic():
    rng = make_rng(0, "test", "forced")
    ident = Circuit.from_gates(2, [])
    ds = collect_dataset(ident, 200, rng, forced_inputs=["0", "1"], forced_bases=["Z", "Z"])
    assert np.all(ds.bits[:, 0] == 0) and np.all(ds.bits[:, 1] == 1)
    ds = collect_dataset(ident, 200, rng, forced_inputs=["+", "y-"], forced_bases=["X", "Y"])
    assert np.all(ds.bits[:, 0] == 0) and np.all(ds.bits[:, 1] == 1)
    with pytest.raises(ValueError):
        collect_dataset(ident, 0, rng)


def test_shadow_alpha_unbiased():
    rng = make_rng(0, "test", "unbiased")
    circ = random_brickwork(2, 1, rng)
    truth = exact_observables(circ)
    targets = [(0, "X", "XI"), (0, "Z", "ZZ"), (1, "Y", "XY"), (1, "X", "IX"), (0, "Y", "IZ")]
    est = {t: [] for t in targets}
    for r in range(200):
        ds = collect_dataset(circ, 300, make_rng(0, "test", "unbiased", r))
        for i, P, Q in targets:
            est[(i, P, Q)].append(shadow_alpha(ds, i, P, Q))
    for (i, P, Q), vals in est.items():
        se = np.std(vals, ddof=1) / np.sqrt(len(vals))
        assert abs(np.mean(vals) - truth[(i, P)].coefficient(Q)) <= 3 * se + 1e-12


def test_threshold_and_sample_bound_formula():
    assert threshold_value(0.1, 2) == pytest.approx(0.05 / 8)
    n, k, eps, delta, c = 6, 4, 0.1, 0.1, 16.0
    expected = c * 3 ** (k + 1) * 8 ** k * math.log(6 * n / delta) / eps ** 2
    assert sample_size_bound(n, k, eps, delta, c) == pytest.approx(expected, rel=1e-6, abs=1)


def test_thresholded_learning_support_and_accuracy():
    rng = make_rng(0, "test", "thresh")
    circ = depth1(4, rng)
    N = sample_size_bound(4, 2, 0.1, 0.1, 16.0)
    stats = ShadowStatistics.sample(circ, N, rng)
    obs, rep = learn_observables(stats, 2, 0.1, 0.1, constant=16.0)
    assert not rep.undersampled
    for (i, P), o in obs.items():
        true = heisenberg_evolve(circ, PauliString.single(4, i, P))
        assert set(o.support) <= set(true.support)
        assert operator_norm(o.matrix() - true.matrix()) <= 0.1


def test_least_squares_minimizer_and_convexity():
    rng = make_rng(0, "test", "lsq")
    circ = random_brickwork(3, 2, rng)
    ds = collect_dataset(circ, 4000, rng)
    prob = least_squares_problem(ds, architecture_lightcones(circ))
    x = rng.standard_normal(prob.mean.size)
    v = rng.standard_normal(prob.mean.size)
    assert np.allclose(prob.hvp(x, v), 2 * v)
    assert prob.loss(prob.minimizer()) <= prob.loss(x)
    xs, trace = prob.descend(x, steps=60, lr=0.25)
    assert np.abs(xs - prob.minimizer()).max() < 1e-8
    assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


def test_least_squares_fit_approaches_truth():
    rng = make_rng(0, "test", "fit")
    circ = depth1(2, rng)
    ds = collect_dataset(circ, 60000, rng)
    coeffs, _ = fit_alpha_least_squares(ds, architecture_lightcones(circ))
    for key, o in coeffs.observables().items():
        true = heisenberg_evolve(circ, PauliString.single(2, *key))
        # per-coefficient standard error is about sqrt(27 / N) = 0.02
        letters = set(o.terms) | set(true.terms)
        assert max(abs(o.coefficient(q) - true.coefficient(q)) for q in letters) < 0.1
    back = PauliCoefficients.from_dict(coeffs.to_dict())
    assert np.array_equal(back.to_vector(), coeffs.to_vector())


def test_sewing_exact_observables_is_exact():
    rng = make_rng(0, "test", "sew-exact")
    circ = random_brickwork(2, 2, rng)
    u = circ.unitary()
    obs = exact_observables(circ)
    sew = direct_heisenberg_sew(obs, 2)
    assert sew.convention == "ancilla,system"
    assert sew.error(u) < 1e-9
    assert max(true_heisenberg_error(obs, u, i) for i in range(2)) < 1e-9


def test_local_inversion_on_exact_observables():
    rng = make_rng(1, "test", "inv-exact")
    circ = depth1(2, rng)
    u = circ.unitary()
    obs = exact_observables(circ)
    invs = [train_local_inversion({P: obs[(i, P)] for P in BASES}, i, rng, config=InversionConfig(restarts=3))
            for i in range(2)]
    assert max(iv.eps for iv in invs) < 1e-4
    sew = sew_local_inversions(invs, 2)
    assert sew.convention == "system,ancilla"
    true_eps = [true_inversion_error(iv.unitary, iv.window, u, iv.qubit) for iv in invs]
    assert sew.error(u) <= 0.5 * sum(true_eps) + 1e-9
    with pytest.raises(ValueError):
        sew_local_inversions(invs[:1], 2)


@pytest.mark.parametrize("construction", ["inversion", "heisenberg"])
def test_end_to_end_bound_and_bundle(tmp_path, construction):
    rng = make_rng(0, "test", "e2e", construction)
    circ = depth1(2, rng)
    u = circ.unitary()
    ds = collect_dataset(circ, 20000, rng)
    sew, rep, obs = learn_shallow_circuit(ds, rng, lightcones=architecture_lightcones(circ), target_unitary=u,
                                          construction=construction, config=InversionConfig(restarts=3))
    bound = 0.5 * sum(rep.true_eps) if construction == "inversion" else sum(rep.true_eps)
    assert rep.spectral_error <= bound
    assert rep.diamond_surrogate == pytest.approx(2 * rep.spectral_error)
    path = tmp_path / "bundle.json"
    save_bundle(path, sew, rep)
    back = load_bundle(path)
    assert back["convention"] == sew.convention
    assert np.allclose(back["sewed"].unitary(), sew.unitary())


def test_learning_modes_validated():
    ds = collect_dataset(Circuit.from_gates(2, []), 10, make_rng(0, "t"))
    with pytest.raises(ValueError):
        learn_shallow_circuit(ds, make_rng(0, "t"))
    with pytest.raises(ValueError):
        learn_shallow_circuit(ds, make_rng(0, "t"), mode="unknown")
    assert LearningReport("x", [0.1]).to_dict()["eps"] == [0.1]
