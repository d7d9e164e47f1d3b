"""Restart-success statistics and two-dimensional landscape slices."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ..qcore.rng import make_rng
from .optimize import OptimizerConfig, optimize
from .targets import SwapTargetSpec, build_swap_target, num_params


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return float(max(0.0, centre - half)), float(min(1.0, centre + half))


@dataclass
class SuccessEstimate:
    n: int
    mode: str
    trials: int
    successes: int
    probability: float
    ci: tuple[float, float]
    block_successes: list

    def csv_row(self) -> list:
        return [self.n, self.mode, self.trials, self.successes, f"{self.ci[0]:.6f}", f"{self.ci[1]:.6f}"]


def _cost_factory(target, kind, n):
    from .jaxcost import Mode1Cost  # JAX import deferred until needed
    return Mode1Cost(target, kind, n)


def restart_success_probability(spec: SwapTargetSpec, mode: str, config: OptimizerConfig, trials: int,
                                seed: int, kind: str = "swappow", block: int = 4,
                                init: str = "uniform", cost_factory=_cost_factory) -> SuccessEstimate:
    """Fraction of random restarts whose every qubit ends with deviation <= delta.

    ``mode`` is "whole" (one block of n qubits) or "block" (independent
    blocks of ``block`` qubits, each trained on its own restricted target);
    the reported probability is the minimum over blocks.  Restarts draw
    parameters uniformly from [0, 1); ``init="zero"`` starts at the origin.
    """
    if init not in ("uniform", "zero"):
        raise ValueError(f"unknown init {init!r}")
    if trials < 30:
        raise ValueError("need at least 30 trials")
    n = spec.n
    if mode == "whole":
        blocks = [(0, n, spec)]
    elif mode == "block":
        if n % block:
            raise ValueError("n must be a multiple of the block size")
        blocks = []
        for b in range(n // block):
            lo = b * block
            sub = tuple(j - lo // 4 for j in spec.S if lo <= 4 * j < lo + block)
            blocks.append((lo, block, SwapTargetSpec(block, sub)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    cache = {}
    counts = []
    for bi, (lo, size, sub) in enumerate(blocks):
        key = (size, sub.S)
        if key not in cache:
            cache[key] = cost_factory(build_swap_target(sub), kind, size)
        cost = cache[key]
        wins = 0
        for t in range(trials):
            rng = make_rng(seed, "restart", n, mode, bi, t)
            theta0 = rng.uniform(0.0, 1.0, num_params(kind, size))
            if init == "zero":
                theta0 = np.zeros_like(theta0)
            res = optimize(cost, theta0, config, grad="value_and_grad")
            wins += bool(cost.deviations(res.best_theta).max() <= config.delta)
        counts.append(wins)
    worst = min(counts)
    return SuccessEstimate(n, mode if mode == "whole" else f"block{block}", trials, worst,
                           worst / trials, wilson_interval(worst, trials), counts)


@dataclass
class LandscapeSlice:
    anchor: np.ndarray
    dir1: np.ndarray
    dir2: np.ndarray
    u: np.ndarray
    v: np.ndarray
    cost: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "v", "cost"])
        for i, a in enumerate(self.u):
            for j, b in enumerate(self.v):
                w.writerow([f"{a:.8f}", f"{b:.8f}", f"{self.cost[i, j]:.12f}"])
        return buf.getvalue()


def orthonormalize(d1, d2) -> tuple[np.ndarray, np.ndarray]:
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    e1 = d1 / np.linalg.norm(d1)
    r = d2 - (d2 @ e1) * e1
    nr = np.linalg.norm(r)
    if nr < 1e-12:
        raise ValueError("directions are parallel")
    return e1, r / nr


def slice_directions(mode: str, dim: int, rng=None, anchors=None) -> tuple[np.ndarray, np.ndarray]:
    """Random Gaussian directions, or the differences anchors[1]-anchors[0], anchors[2]-anchors[0]."""
    if mode == "random":
        return rng.standard_normal(dim), rng.standard_normal(dim)
    if mode == "aligned":
        a0, a1, a2 = (np.asarray(a, dtype=float) for a in anchors)
        return a1 - a0, a2 - a0
    raise ValueError(f"unknown direction mode {mode!r}")


def landscape_slice(cost, anchor, dir1, dir2, u, v) -> LandscapeSlice:
    """cost(anchor + a e1 + b e2) on the grid u x v with orthonormalized directions."""
    anchor = np.asarray(anchor, dtype=float)
    e1, e2 = orthonormalize(dir1, dir2)
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    out = np.empty((u.size, v.size))
    for i, a in enumerate(u):
        for j, b in enumerate(v):
            out[i, j] = cost(anchor + a * e1 + b * e2)
    return LandscapeSlice(anchor, e1, e2, u, v, out)


def strict_local_minima(grid: np.ndarray) -> list[tuple[int, int]]:
    """Interior grid points strictly below all eight neighbours."""
    out = []
    for i in range(1, grid.shape[0] - 1):
        for j in range(1, grid.shape[1] - 1):
            nb = grid[i - 1:i + 2, j - 1:j + 2].copy()
            nb[1, 1] = np.inf
            if grid[i, j] < nb.min():
                out.append((i, j))
    return out
