"""Pipeline runners for every experiment id.

Each runner takes the merged params, the root seed and a worker count,
and returns an Outcome of named metrics plus raw tables.  Every random
stream is derived from the root seed with ``make_rng(seed, id, ...)``.
"""

from __future__ import annotations

import concurrent.futures as cf
import multiprocessing as mp
from dataclasses import dataclass, field

import numpy as np

from ..qcore import make_rng

REGISTRY: dict = {}


@dataclass
class Outcome:
    metrics: dict = field(default_factory=dict)  # name -> (value, stderr or None)
    tables: dict = field(default_factory=dict)  # name -> (header, rows)

    def add(self, name: str, value, stderr=None):
        self.metrics[name] = (float(value), None if stderr is None else float(stderr))

    def value(self, name: str) -> float:
        return self.metrics[name][0]


@dataclass(frozen=True)
class Experiment:
    name: str
    fn: object
    defaults: dict


def experiment(name: str, **defaults):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, fn, defaults)
        return fn
    return wrap


def parallel_map(fn, items, jobs: int = 1) -> list:
    """Ordered map over independent tasks; a spawn pool when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    ctx = mp.get_context("spawn")
    with cf.ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
        return list(pool.map(fn, items))


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float)), 1)[0])


# ---------------------------------------------------------------- idqnn

def _equiv_task(args):
    from ..idqnn import IdqnnModel, exact_deep_distribution, exact_distribution, sample_deep, \
        empirical_distribution, tvd

    seed, li, dims, density, n_random, shots = args
    rng = make_rng(seed, "idqnn-equiv", li)
    model = IdqnnModel.random(tuple(dims), rng, density=density, seed=seed)
    n = model.num_sites
    xs = [np.zeros(n, dtype=int), np.ones(n, dtype=int)] + [rng.integers(0, 2, n) for _ in range(n_random)]
    rows = []
    for xi, x in enumerate(xs):
        p = exact_distribution(model, x)
        y = sample_deep(model, x, make_rng(seed, "idqnn-equiv", li, "shots", xi), shots)
        rows.append(["x".join(map(str, dims)), xi, "".join(map(str, x)),
                     tvd(p, empirical_distribution(y)), tvd(p, exact_deep_distribution(model, x))])
    return rows


@experiment("idqnn-equiv",
            lattices=[[2, 2], [2, 3], [3, 2], [3, 3], [2, 4], [4, 2], [3, 4], [4, 3], [4, 4], [2, 2, 3]],
            density=0.5, random_inputs=5, shots=100000)
def run_idqnn_equiv(p, seed, jobs=1) -> Outcome:
    tasks = [(seed, li, d, p["density"], p["random_inputs"], p["shots"]) for li, d in enumerate(p["lattices"])]
    rows = [r for chunk in parallel_map(_equiv_task, tasks, jobs) for r in chunk]
    out = Outcome()
    out.add("max_tvd", max(r[3] for r in rows))
    out.add("mean_tvd", np.mean([r[3] for r in rows]))
    out.add("max_exact_tvd", max(r[4] for r in rows))
    out.tables["tvd"] = (["lattice", "input", "x", "tvd_sampled", "tvd_exact"], rows)
    return out


@experiment("idqnn-learn", dims=[4, 4], sizes=[1000, 10000, 100000], repeats=5, density=None)
def run_idqnn_learn(p, seed, jobs=1) -> Outcome:
    import warnings

    from ..idqnn import IdqnnModel, InputDistribution, fold_beta, learn_beta, sample_deep

    rng = make_rng(seed, "idqnn-learn", "model")
    model = IdqnnModel.random(tuple(p["dims"]), rng, density=p["density"], seed=seed)
    dist = InputDistribution.default()
    truth = fold_beta(model.beta)
    rows, means = [], []
    last = None
    for N in p["sizes"]:
        errs = []
        for r in range(p["repeats"]):
            g = make_rng(seed, "idqnn-learn", N, r)
            x = dist.sample(model.num_sites, N, g)
            y = sample_deep(model, x, g)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                est = learn_beta(x, y, model.graph)
            err = float(np.abs(fold_beta(est.beta) - truth).max())
            errs.append(err)
            rows.append([N, r, err, int(est.counts.min())])
            last = est
        means.append(float(np.mean(errs)))
    out = Outcome()
    worst = max(r[2] for r in rows if r[0] == p["sizes"][-1])
    out.add("max_error_largest_N", worst)
    out.add("slope", loglog_slope(p["sizes"], means))
    out.tables["errors"] = (["N", "repeat", "max_folded_error", "min_count"], rows)
    out.tables["beta"] = (["site", "beta_hat", "count", "learned", "beta_true"],
                          [[j, float(b), int(c), int(l), float(t)]
                           for j, (b, c, l, t) in enumerate(zip(last.beta, last.counts, last.learned, truth))])
    return out


@experiment("idqnn-xeb", dims=[2, 4], models=5, shots=10000, density=0.5, min_collision=1.5)
def run_idqnn_xeb(p, seed, jobs=1) -> Outcome:
    from ..idqnn import IdqnnModel, exact_distribution, sample_deep, xeb_score, xeb_standard_error, \
        bits_to_index

    rows = []
    for m in range(p["models"]):
        rng = make_rng(seed, "idqnn-xeb", m)
        model = IdqnnModel.random(tuple(p["dims"]), rng, density=p["density"], seed=seed)
        n = model.num_sites
        # skip inputs whose output law is too close to uniform for a normalized score
        for _ in range(100):
            x = rng.integers(0, 2, n)
            prob = exact_distribution(model, x)
            if 2 ** n * np.sum(prob ** 2) >= p["min_collision"]:
                break
        else:
            raise RuntimeError("no input with a non-uniform output law")
        y = sample_deep(model, x, rng, p["shots"])
        u = rng.integers(0, 2, (p["shots"], n))
        mp_ideal = float(np.sum(prob ** 2))
        se = xeb_standard_error(prob[bits_to_index(y)], mp_ideal, 2.0 ** -n)
        rows.append([m, "".join(map(str, x)), xeb_score(y, prob, n), xeb_score(u, prob, n), se])
    out = Outcome()
    out.add("exact_xeb_worst_dev", max(abs(r[2] - 1) for r in rows))
    out.add("uniform_xeb_worst_dev", max(abs(r[3]) for r in rows))
    out.add("exact_xeb_mean", np.mean([r[2] for r in rows]), np.mean([r[4] for r in rows]))
    out.tables["xeb"] = (["model", "x", "xeb_exact_sampler", "xeb_uniform_sampler", "stderr"], rows)
    return out


@experiment("idqnn-clifford", oracle_dims=[[2, 2], [2, 3], [3, 3], [3, 4], [2, 2, 3]], oracle_inputs=3,
            deep_dims=[12, 68], shots=200, density=0.5)
def run_idqnn_clifford(p, seed, jobs=1) -> Outcome:
    from ..idqnn import IdqnnModel, clifford_distribution, clifford_log2_prob, exact_distribution, \
        round_to_clifford, sample_clifford, xeb_from_log2

    rows = []
    for li, dims in enumerate(p["oracle_dims"]):
        rng = make_rng(seed, "idqnn-clifford", "oracle", li)
        model = round_to_clifford(IdqnnModel.random(tuple(dims), rng, density=p["density"], seed=seed))
        for k in range(p["oracle_inputs"]):
            x = rng.integers(0, 2, model.num_sites)
            diff = float(np.abs(clifford_distribution(model, x) - exact_distribution(model, x)).max())
            rows.append(["x".join(map(str, dims)), k, "".join(map(str, x)), diff])
    rng = make_rng(seed, "idqnn-clifford", "deep")
    model = round_to_clifford(IdqnnModel.random(tuple(p["deep_dims"]), rng, density=p["density"], seed=seed))
    x = rng.integers(0, 2, model.num_sites)
    ys, lps = sample_clifford(model, x, rng, p["shots"], return_log2p=True)
    scored = np.array([clifford_log2_prob(model, x, y) for y in ys])
    k = int(round(-scored.max()))
    xeb = xeb_from_log2(scored, k, model.num_sites)
    out = Outcome()
    out.add("oracle_max_diff", max(r[3] for r in rows))
    out.add("deep_sites", model.num_sites)
    out.add("deep_self_xeb", xeb)
    out.add("deep_self_xeb_dev", abs(xeb - 1.0))
    out.add("deep_sampler_scorer_mismatch", float(np.abs(lps - scored).max()))
    out.tables["oracle"] = (["lattice", "input", "x", "max_abs_diff"], rows)
    return out


# ---------------------------------------------------------------- shadowlearn

def _shadow_task(args):
    from ..qcore import PauliString, heisenberg_evolve, operator_norm, random_brickwork
    from ..shadowlearn import ShadowStatistics, learn_observables, sample_size_bound

    seed, t, p = args
    rng = make_rng(seed, "shadow-learn", t)
    n = p["n"]
    circ = random_brickwork(n, p["depth"], rng)
    N = p["N"] or sample_size_bound(n, p["k"], p["eps"], p["delta"], p["constant"])
    stats = ShadowStatistics.sample(circ, N, rng)
    obs, _ = learn_observables(stats, p["k"], p["eps"], p["delta"], constant=p["constant"])
    worst, support = 0.0, True
    for (i, P), o in obs.items():
        true = heisenberg_evolve(circ, PauliString.single(n, i, P))
        worst = max(worst, operator_norm(o.matrix() - true.matrix()))
        support &= set(o.support) <= set(true.support)
    return [t, N, worst, int(support), int(worst <= p["eps"] and support)]


@experiment("shadow-learn", n=6, depth=2, k=4, eps=0.1, delta=0.1, constant=16.0, trials=20, N=None)
def run_shadow_learn(p, seed, jobs=1) -> Outcome:
    rows = parallel_map(_shadow_task, [(seed, t, p) for t in range(p["trials"])], jobs)
    out = Outcome()
    out.add("success_fraction", np.mean([r[4] for r in rows]))
    out.add("worst_error", max(r[2] for r in rows))
    out.add("samples", rows[0][1])
    out.tables["trials"] = (["trial", "N", "max_op_error", "support_ok", "success"], rows)
    return out


@experiment("shadow-convexity", n=3, depth=2, N=5000, starts=100, fd_step=1e-4, steps=60, lr=0.25)
def run_shadow_convexity(p, seed, jobs=1) -> Outcome:
    from ..qcore import random_brickwork
    from ..shadowlearn import architecture_lightcones, collect_dataset, least_squares_problem

    rng = make_rng(seed, "shadow-convexity")
    circ = random_brickwork(p["n"], p["depth"], rng)
    data = collect_dataset(circ, p["N"], rng)
    prob = least_squares_problem(data, architecture_lightcones(circ))
    x_star = prob.minimizer()
    dim = x_star.size
    h = p["fd_step"]
    x0 = rng.standard_normal(dim)
    hess = np.empty((dim, dim))
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = h
        hess[:, j] = (prob.grad(x0 + e) - prob.grad(x0 - e)) / (2 * h)
    devs = []
    for s in range(p["starts"]):
        start = make_rng(seed, "shadow-convexity", "start", s).normal(0.0, 1.0, dim)
        x, _ = prob.descend(start, steps=p["steps"], lr=p["lr"])
        devs.append(float(np.abs(x - x_star).max()))
    out = Outcome()
    out.add("dimension", dim)
    out.add("hessian_dev", float(np.abs(hess - 2.0 * np.eye(dim)).max()))
    out.add("minimizer_dev", max(devs))
    out.tables["descents"] = (["start", "max_abs_dev"], [[s, d] for s, d in enumerate(devs)])
    return out


def _sew_task(args):
    from ..qcore import random_brickwork
    from ..shadowlearn import InversionConfig, architecture_lightcones, collect_dataset, learn_shallow_circuit

    seed, t, p = args
    rng = make_rng(seed, "sew-verify", t)
    n = int(rng.integers(2, p["n_max"] + 1))
    depth = int(rng.integers(1, p["depth_max"] + 1))
    circ = random_brickwork(n, depth, rng)
    u = circ.unitary()
    data = collect_dataset(circ, p["N"], rng)
    cones = architecture_lightcones(circ)
    _, inv, _ = learn_shallow_circuit(data, rng, lightcones=cones, target_unitary=u,
                                      config=InversionConfig(restarts=p["restarts"]))
    _, heis, _ = learn_shallow_circuit(data, rng, lightcones=cones, target_unitary=u, construction="heisenberg")
    b_inv = 0.5 * sum(inv.true_eps)
    b_heis = sum(heis.true_eps)
    return [t, n, depth, inv.spectral_error, b_inv, heis.spectral_error, b_heis]


@experiment("sew-verify", targets=20, n_max=3, depth_max=2, N=20000, restarts=3)
def run_sew_verify(p, seed, jobs=1) -> Outcome:
    rows = parallel_map(_sew_task, [(seed, t, p) for t in range(p["targets"])], jobs)
    out = Outcome()
    out.add("inversion_violations", sum(r[3] > r[4] for r in rows))
    out.add("heisenberg_violations", sum(r[5] > r[6] for r in rows))
    out.add("inversion_max_ratio", max(r[3] / r[4] for r in rows))
    out.add("heisenberg_max_ratio", max(r[5] / r[6] for r in rows))
    out.tables["bounds"] = (["target", "n", "depth", "inversion_error", "inversion_bound",
                             "heisenberg_error", "heisenberg_bound"], rows)
    return out


def _circuit_task(args):
    from ..qcore import Circuit, Gate
    from ..qcore.linalg import random_unitary
    from ..shadowlearn import InversionConfig, architecture_lightcones, collect_dataset, learn_shallow_circuit

    seed, N, t, p = args
    rng = make_rng(seed, "shadow-circuit", t)
    n = p["n"]
    circ = Circuit.from_gates(n, [Gate("Dense", (a, a + 1), matrix=random_unitary(4, rng))
                                  for a in range(0, n - 1, 2)])
    u = circ.unitary()
    data = collect_dataset(circ, N, make_rng(seed, "shadow-circuit", t, N))
    sew, rep, _ = learn_shallow_circuit(data, make_rng(seed, "shadow-circuit", t, N, "fit"),
                                        lightcones=architecture_lightcones(circ), target_unitary=u,
                                        config=InversionConfig(restarts=p["restarts"]))
    # diagnostic only: distance of the isometry with ancillas fixed to |0>
    d = 2 ** n
    iso = 2.0 * float(np.linalg.norm(sew.unitary()[:, :d] - sew.reference(u)[:, :d], 2))
    return [N, t, rep.diamond_surrogate, iso, 0.5 * sum(rep.true_eps)]


@experiment("shadow-circuit", n=4, sizes=[6250, 25000, 100000], trials=4, restarts=3)
def run_shadow_circuit(p, seed, jobs=1) -> Outcome:
    tasks = [(seed, N, t, p) for N in p["sizes"] for t in range(p["trials"])]
    rows = parallel_map(_circuit_task, tasks, jobs)
    means = [float(np.mean([r[2] for r in rows if r[0] == N])) for N in p["sizes"]]
    last = [r for r in rows if r[0] == p["sizes"][-1]]
    out = Outcome()
    out.add("diamond_largest_N", means[-1], np.std([r[2] for r in last], ddof=1) / np.sqrt(len(last))
            if len(last) > 1 else None)
    out.add("slope", loglog_slope(p["sizes"], means))
    out.add("isometry_largest_N", np.mean([r[3] for r in last]))
    out.tables["errors"] = (["N", "trial", "diamond_surrogate", "isometry_surrogate", "half_sum_eps"], rows)
    return out


# ---------------------------------------------------------------- landscape

@experiment("landscape-minima", n=8, S=[0, 1], perturbations=500, radius_fraction=0.99)
def run_landscape_minima(p, seed, jobs=1) -> Outcome:
    from ..landscape import SwapTargetSpec, ansatz_unitary, build_swap_target, enumerate_theta_x, local_cost

    spec = SwapTargetSpec(p["n"], tuple(p["S"]))
    target = build_swap_target(spec)
    k = len(spec.S)
    radius = p["radius_fraction"] * np.pi / 4
    rows, prow = [], []
    decreases, gain = 0, np.inf
    for x in range(2 ** k):
        theta = enumerate_theta_x(spec, x)
        c0 = local_cost(target, ansatz_unitary("layered3", theta, spec.n))
        expected = k - bin(x).count("1")
        rows.append([x, c0, expected, abs(c0 - expected)])
        if x == 2 ** k - 1:
            continue
        rng = make_rng(seed, "landscape-minima", x)
        for j in range(p["perturbations"]):
            d = rng.standard_normal(theta.size)
            d *= radius / np.linalg.norm(d)
            c = local_cost(target, ansatz_unitary("layered3", theta + d, spec.n))
            decreases += c < c0
            gain = min(gain, c - c0)
            prow.append([x, j, c - c0])
    out = Outcome()
    out.add("theta_x_cost_dev", max(r[3] for r in rows))
    out.add("perturbation_decreases", decreases)
    out.add("min_perturbation_increase", gain)
    out.tables["theta_x"] = (["x", "cost", "expected", "abs_dev"], rows)
    out.tables["perturbations"] = (["x", "index", "cost_change"], prow)
    return out


@experiment("landscape-scan", n=8, S=[0, 1], kind="layered3", directions="aligned", anchors=[0, 1, 2],
            points=21, span=[-0.5, 1.5])
def run_landscape_scan(p, seed, jobs=1) -> Outcome:
    from ..landscape import SwapTargetSpec, ansatz_unitary, build_swap_target, enumerate_theta_x, \
        landscape_slice, local_cost, num_params, slice_directions, strict_local_minima

    spec = SwapTargetSpec(p["n"], tuple(p["S"]))
    target = build_swap_target(spec)
    kind = p["kind"]
    dim = num_params(kind, spec.n)
    rng = make_rng(seed, "landscape-scan")
    if p["directions"] == "aligned":
        if kind != "layered3":
            raise ValueError("aligned slices use the layered3 trap configurations")
        anchors = [enumerate_theta_x(spec, x) for x in p["anchors"]]
        d1, d2 = slice_directions("aligned", dim, anchors=anchors)
        anchor = anchors[0]
        lo, hi = p["span"][0] * np.linalg.norm(d1), p["span"][1] * np.linalg.norm(d1)
    else:
        d1, d2 = slice_directions("random", dim, rng)
        anchor = rng.uniform(0.0, 1.0, dim)
        lo, hi = p["span"][0] * np.pi, p["span"][1] * np.pi
    grid = np.linspace(lo, hi, p["points"])
    sl = landscape_slice(lambda th: local_cost(target, ansatz_unitary(kind, th, spec.n)), anchor, d1, d2, grid, grid)
    minima = strict_local_minima(sl.cost)
    out = Outcome()
    out.add("strict_local_minima", len(minima))
    out.add("min_cost", float(sl.cost.min()))
    out.tables["slice"] = (["u", "v", "cost"], [[a, b, sl.cost[i, j]] for i, a in enumerate(sl.u)
                                                for j, b in enumerate(sl.v)])
    return out


def _restart_task(args):
    from ..landscape import OptimizerConfig, SwapTargetSpec, restart_success_probability

    seed, n, mode, p = args
    cfg = OptimizerConfig(**p["optimizer"])
    est = restart_success_probability(SwapTargetSpec.all_blocks(n), mode, cfg, p["trials"], seed,
                                      kind=p["kind"], block=p["block"], init=p["init"])
    return est


@experiment("restart-prob", sizes=[4, 8, 12, 16], modes=["block", "whole"], trials=50, kind="swappow",
            block=4, init="uniform", optimizer={"kind": "BGD", "lr": 0.3, "iterations": 150, "delta": 1e-2})
def run_restart_prob(p, seed, jobs=1) -> Outcome:
    tasks = [(seed, n, mode, p) for mode in p["modes"] for n in p["sizes"]]
    ests = parallel_map(_restart_task, tasks, jobs)
    out = Outcome()
    by_mode = {}
    for (_, n, mode, _), e in zip(tasks, ests):
        by_mode.setdefault(mode, []).append(e)
    if "block" in by_mode:
        probs = [e.probability for e in by_mode["block"]]
        out.add("block_band", max(probs) - min(probs))
    if "whole" in by_mode:
        w = by_mode["whole"]
        out.add("whole_drop", w[0].probability - w[-1].probability)
        # an increase only counts when the confidence intervals separate
        out.add("whole_increase_violations", sum(b.ci[0] > a.ci[1] for a, b in zip(w, w[1:])))
    for mode, es in by_mode.items():
        for e in es:
            out.add(f"p_{mode}_{e.n}", e.probability)
    out.tables["success"] = (["n", "mode", "trials", "successes", "ci_lo", "ci_hi"],
                             [e.csv_row() for e in ests])
    return out


# ---------------------------------------------------------------- ffward

@experiment("ffward-run", n=8, hamiltonian_seed=None, grids=["short", "long"], points=41, noise=True,
            mitigation=True, shots=200000, noise_model={"p1": 1e-3, "p2": 5e-3, "readout": 1e-2},
            continuation=True, restarts=10, tol=1e-7)
def run_ffward(p, seed, jobs=1) -> Outcome:
    from ..ffward import HiddenHamiltonian, Mode1Config, NoiseModel, exact_z_expectations, faulty_identity, \
        mitigate_pauli, mode1_learn_series, predict_observables, time_grid

    hseed = seed if p["hamiltonian_seed"] is None else p["hamiltonian_seed"]
    ham = HiddenHamiltonian.random(p["n"], hseed)
    cfg = Mode1Config(restarts=p["restarts"], tol=p["tol"])
    noise = NoiseModel(**p["noise_model"])
    rows, errs, counts, improved = [], [], set(), {}
    for grid in p["grids"]:
        times = time_grid(grid, p["points"])
        comps = mode1_learn_series(ham, times, cfg, seed, continuation=p["continuation"])
        rng = make_rng(seed, "ffward-run", "shots", grid)
        ref = None
        if p["mitigation"]:
            # without noise the reference is exact, so mitigation leaves values unchanged
            ref = (predict_observables(faulty_identity(comps[0]), noise, p["shots"], rng) if p["noise"]
                   else predict_observables(faulty_identity(comps[0])))
        better = []
        for t, comp in zip(times, comps):
            ideal = exact_z_expectations(ham, t)
            clean = predict_observables(comp)
            errs.append(float(np.abs(clean - ideal).max()))
            counts.add(comp.gate_count)
            raw = predict_observables(comp, noise, p["shots"], rng) if p["noise"] else clean
            mit = mitigate_pauli(raw, ref) if p["mitigation"] else raw
            if p["mitigation"]:
                better += list(np.abs(mit - ideal) < np.abs(raw - ideal))
            for j in range(p["n"]):
                rows.append([grid, float(t), j, float(raw[j]), float(mit[j]), float(ideal[j]), float(clean[j])])
        if p["mitigation"]:
            improved[grid] = float(np.mean(better))
    out = Outcome()
    out.add("max_compiled_error", max(errs))
    out.add("gate_count", min(counts))
    out.add("gate_count_spread", max(counts) - min(counts))
    for grid, frac in improved.items():
        out.add(f"mitigation_improved_{grid}", frac)
    out.tables["observables"] = (["grid", "t", "qubit", "raw", "mitigated", "ideal", "noiseless"], rows)
    return out
