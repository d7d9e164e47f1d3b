import numpy as np
import pytest

from qgenlab.landscape import (
    OptimizerConfig, SwapTargetSpec, ansatz_unitary, build_swap_target, channel_deviations, channel_ptms,
    enumerate_theta_x, finite_difference_grad, landscape_slice, local_cost, local_cost_montecarlo, num_params,
    optimize, orthonormalize, restart_success_probability, strict_local_minima, theta_star, wilson_interval,
)
from qgenlab.landscape.jaxcost import Mode1Cost
from qgenlab.qcore import make_rng, pauli_matrix


def dense_ptms(target, ansatz):
    n = target.num_qubits
    w = ansatz.unitary().conj().T @ target.unitary()
    out = np.empty((n, 3, 3))
    for k in range(n):
        for i, p in enumerate("XYZ"):
            pk = pauli_matrix("".join(p if q == k else "I" for q in range(n)))
            for j, q in enumerate("XYZ"):
                qk = pauli_matrix("".join(q if r == k else "I" for r in range(n)))
                out[k, i, j] = np.trace(pk @ w @ qk @ w.conj().T).real / 2 ** n
    return out


@pytest.mark.parametrize("kind", ["layered3", "swappow"])
def test_channel_ptms_match_dense(kind):
    rng = make_rng(0, "test", "ptm", kind)
    target = build_swap_target(SwapTargetSpec(8, (0, 1)))
    ansatz = ansatz_unitary(kind, rng.uniform(0, np.pi, num_params(kind, 8)), 8)
    assert np.allclose(channel_ptms(target, ansatz), dense_ptms(target, ansatz), atol=1e-12)


@pytest.mark.parametrize("kind", ["layered3", "swappow"])
def test_jax_deviations_match_numpy(kind):
    rng = make_rng(1, "test", "jax", kind)
    target = build_swap_target(SwapTargetSpec.all_blocks(8))
    cost = Mode1Cost(target, kind, 8)
    theta = rng.uniform(0, 1, num_params(kind, 8))
    expected = channel_deviations(target, ansatz_unitary(kind, theta, 8))
    assert np.allclose(cost.deviations(theta), expected, atol=1e-10)
    v, g = cost.value_and_grad(theta)
    assert v == pytest.approx(expected.sum())
    assert np.allclose(g, finite_difference_grad(cost, theta, 1e-6), atol=1e-6)


def test_theta_x_costs_and_global_minimum():
    spec = SwapTargetSpec(8, (0, 1))
    target = build_swap_target(spec)
    for x in range(4):
        c = local_cost(target, ansatz_unitary("layered3", enumerate_theta_x(spec, x), 8))
        assert abs(c - (2 - bin(x).count("1"))) < 1e-9
    assert local_cost(target, ansatz_unitary("layered3", theta_star(spec), 8)) < 1e-12
    with pytest.raises(ValueError):
        enumerate_theta_x(spec, 4)


def test_montecarlo_cost_agrees():
    rng = make_rng(0, "test", "mc")
    target = build_swap_target(SwapTargetSpec(4, (0,)))
    ansatz = ansatz_unitary("layered3", rng.uniform(0, 1, num_params("layered3", 4)), 4)
    est, se = local_cost_montecarlo(target, ansatz, 3000, rng)
    # averaging 1 - fidelity over single-qubit stabilizer inputs gives (2/3)(1 - F) per qubit
    exact = local_cost(target, ansatz)
    assert abs(est - exact) < 4 * se + 1e-9


def test_spec_validation():
    with pytest.raises(ValueError):
        SwapTargetSpec(8, (2,))
    with pytest.raises(ValueError):
        ansatz_unitary("layered3", np.zeros(3), 8)
    with pytest.raises(ValueError):
        num_params("other", 8)


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(lr=0.9)
    with pytest.raises(ValueError):
        OptimizerConfig(kind="SGD")
    with pytest.raises(ValueError):
        OptimizerConfig(iterations=0)


@pytest.mark.parametrize("kind", ["ADAM", "BGD"])
def test_optimize_quadratic(kind):
    center = np.array([0.3, -0.2, 0.5])

    def cost(th):
        return float(np.sum((th - center) ** 2))

    res = optimize(cost, np.zeros(3), OptimizerConfig(kind=kind, lr=0.2, iterations=300))
    assert res.best_cost < 1e-6
    assert res.best_cost == min(res.trajectory)
    if kind == "BGD":
        assert all(b <= a for a, b in zip(res.trajectory, res.trajectory[1:]))
    with pytest.raises(ValueError):
        optimize(cost, np.array([np.nan, 0, 0]), OptimizerConfig())


def test_wilson_interval():
    lo, hi = wilson_interval(5, 10)
    assert lo == pytest.approx(0.2366, abs=1e-4) and hi == pytest.approx(0.7634, abs=1e-4)
    assert wilson_interval(0, 50)[0] == 0.0
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_slice_helpers():
    e1, e2 = orthonormalize([1, 1, 0], [1, 0, 0])
    assert abs(e1 @ e2) < 1e-12 and np.isclose(np.linalg.norm(e2), 1)
    with pytest.raises(ValueError):
        orthonormalize([1, 0], [2, 0])
    grid = np.linspace(-1, 1, 11)
    sl = landscape_slice(lambda th: float(th @ th), np.zeros(2), [1, 0], [0, 1], grid, grid)
    assert strict_local_minima(sl.cost) == [(5, 5)]
    assert sl.to_csv().splitlines()[0] == "u,v,cost"


def test_restart_probability_small():
    cfg = OptimizerConfig(kind="BGD", lr=0.3, iterations=80, delta=1e-2)
    est = restart_success_probability(SwapTargetSpec.all_blocks(4), "whole", cfg, 30, seed=0)
    again = restart_success_probability(SwapTargetSpec.all_blocks(4), "whole", cfg, 30, seed=0)
    assert est.successes == again.successes
    assert 0 <= est.probability <= 1 and est.ci[0] <= est.probability <= est.ci[1]
    assert est.csv_row()[:4] == [4, "whole", 30, est.successes]
    with pytest.raises(ValueError):
        restart_success_probability(SwapTargetSpec.all_blocks(4), "whole", cfg, 10, seed=0)
