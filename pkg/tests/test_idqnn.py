import warnings

import numpy as np
import pytest

from qgenlab.idqnn import (
    IdqnnModel, InputDistribution, LatticeGraph, build_idqnn_from_layered, clifford_distribution,
    clifford_log2_prob, empirical_distribution, exact_deep_distribution, exact_distribution, fold_beta,
    index_to_bits, injected_joint_distribution, learn_beta, qualifying_mask, random_layered, round_to_clifford,
    sample_clifford, sample_deep, sample_shallow, tvd, xeb_from_log2, xeb_score,
)
from qgenlab.qcore import Circuit, Gate, make_rng


def dense_oracle(model, x):
    """Born distribution from an explicit gate list on the full lattice."""
    n = model.num_sites
    gates = []
    for j in range(n):
        if x[j] == 0:
            gates.append(Gate("H", (j,)))
    for j in range(n):
        gates.append(Gate("RZ", (j,), (2 * model.beta[j],)))
    for a, b in sorted(model.graph.edges):
        gates.append(Gate("CZ", (a, b)))
    for j in range(n):
        gates.append(Gate("H", (j,)))
    amp = Circuit.from_gates(n, gates).unitary()[:, 0]
    return np.abs(amp) ** 2


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (2, 2, 2)])
def test_shallow_distribution_matches_gate_oracle(dims):
    rng = make_rng(0, "test", "shallow", *dims)
    model = IdqnnModel.random(dims, rng, density=0.5)
    for _ in range(3):
        x = rng.integers(0, 2, model.num_sites)
        assert np.allclose(exact_distribution(model, x), dense_oracle(model, x), atol=1e-12)


@pytest.mark.parametrize("dims", [(2, 2), (3, 3), (2, 4), (2, 2, 3)])
def test_deep_branch_law_equals_shallow(dims):
    rng = make_rng(1, "test", "deep", *dims)
    model = IdqnnModel.random(dims, rng, density=0.5)
    n = model.num_sites
    for x in (np.zeros(n, int), np.ones(n, int), rng.integers(0, 2, n)):
        assert tvd(exact_deep_distribution(model, x), exact_distribution(model, x)) < 1e-10


def test_deep_sampler_matches_exact_small():
    rng = make_rng(2, "test", "deep-sample")
    model = IdqnnModel.random((2, 3), rng, density=0.5)
    x = rng.integers(0, 2, model.num_sites)
    y = sample_deep(model, x, rng, shots=100000)
    assert y.shape == (100000, 6)
    assert tvd(empirical_distribution(y), exact_distribution(model, x)) < 0.02
    ys = sample_shallow(model, x, rng, shots=100000)
    assert tvd(empirical_distribution(ys), exact_distribution(model, x)) < 0.02


def test_sampler_validates_input():
    model = IdqnnModel.random((2, 2), make_rng(0, "test"))
    with pytest.raises(ValueError):
        exact_distribution(model, [0, 1, 2, 0])
    with pytest.raises(ValueError):
        sample_deep(model, [0, 1], make_rng(0, "t"))


def test_model_json_roundtrip():
    model = IdqnnModel.random((3, 2), make_rng(0, "test", "json"), density=0.5, seed=7)
    back = IdqnnModel.from_json(model.to_json())
    assert back.to_json() == model.to_json()
    assert np.allclose(exact_distribution(back, np.zeros(6, int)), exact_distribution(model, np.zeros(6, int)))


def test_input_distribution_decoupling():
    dist = InputDistribution.default()
    g = LatticeGraph.full((4, 4))
    x = dist.sample(16, 200000, make_rng(0, "test", "decouple"))
    empirical = qualifying_mask(x, g).mean(axis=0)
    assert np.allclose(empirical, dist.decoupling_probabilities(g), atol=5e-3)
    assert dist.has_local_decoupling(g)
    with pytest.raises(ValueError):
        InputDistribution((("zero", None),), (0.5,))


def test_learn_beta_recovers_angles():
    rng = make_rng(0, "test", "learn")
    model = IdqnnModel.random((3, 3), rng)
    x = InputDistribution.default().sample(model.num_sites, 200000, rng)
    y = sample_deep(model, x, rng)
    est = learn_beta(x, y, model.graph)
    assert est.learned.all()
    assert np.abs(fold_beta(est.beta) - fold_beta(model.beta)).max() < 0.03
    assert est.to_csv().startswith("site,beta_hat,count,learned\n")


def test_learn_beta_unlearnable_site_warns():
    model = IdqnnModel.random((2, 2), make_rng(0, "test"))
    x = np.ones((10, 4), dtype=np.uint8)
    y = np.zeros((10, 4), dtype=np.uint8)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        est = learn_beta(x, y, model.graph)
    assert not est.learned.any() and np.all(est.beta == 0) and w


def test_fold_beta_domain():
    b = fold_beta(np.array([0.1, np.pi - 0.1, np.pi + 0.2, -0.3]))
    assert np.allclose(b, [0.1, 0.1, 0.2, 0.3])


def test_clifford_rounding_tie_rounds_up():
    g = LatticeGraph.full((2, 2))
    m = round_to_clifford(IdqnnModel(g, np.array([np.pi / 4, 0.1, 1.0, 3 * np.pi / 4])))
    assert np.allclose(m.beta, [np.pi / 2, 0.0, np.pi / 2, 0.0])


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (3, 4), (2, 2, 3)])
def test_clifford_proxy_exact(dims):
    rng = make_rng(0, "test", "clifford", *dims)
    model = round_to_clifford(IdqnnModel.random(dims, rng, density=0.5))
    for _ in range(2):
        x = rng.integers(0, 2, model.num_sites)
        assert np.abs(clifford_distribution(model, x) - exact_distribution(model, x)).max() < 1e-12


def test_clifford_rejects_non_clifford_beta():
    model = IdqnnModel.random((2, 2), make_rng(0, "test"))
    with pytest.raises(ValueError):
        sample_clifford(model, np.zeros(4, int), make_rng(0, "t"))


def test_clifford_samples_have_positive_probability():
    rng = make_rng(3, "test", "clifford-sample")
    model = round_to_clifford(IdqnnModel.random((6, 4), rng, density=0.5))
    x = rng.integers(0, 2, model.num_sites)
    ys, lps = sample_clifford(model, x, rng, shots=20, return_log2p=True)
    for y, lp in zip(ys, lps):
        assert clifford_log2_prob(model, x, y) == lp
    assert np.all(np.isfinite(lps)) and np.all(lps <= 0)


def test_xeb_from_log2_uniform_support():
    # a distribution uniform on 2^k outcomes scores 1 on its own samples
    assert xeb_from_log2(np.full(50, -300.0), 300, 816) == pytest.approx(1.0)
    assert xeb_from_log2(np.full(50, -np.inf), 300, 816) < 0


def test_xeb_calibration():
    rng = make_rng(0, "test", "xeb")
    model = IdqnnModel.random((2, 4), rng, density=0.5)
    x = np.zeros(8, int)
    p = exact_distribution(model, x)
    good = index_to_bits(rng.choice(256, size=40000, p=p), 8)
    flat = rng.integers(0, 2, (40000, 8))
    assert abs(xeb_score(good, p, 8) - 1) < 0.05
    assert abs(xeb_score(flat, p, 8)) < 0.05
    with pytest.raises(ValueError):
        xeb_score(np.zeros((0, 8)), p, 8)


def test_layered_embedding_matches_injection_reference():
    rng = make_rng(0, "test", "layered")
    for m, r in [(2, 2), (2, 3), (3, 2)]:
        circ = random_layered(m, r, rng)
        model, x = build_idqnn_from_layered(circ)
        assert np.abs(exact_distribution(model, x) - injected_joint_distribution(circ)).max() < 1e-12
