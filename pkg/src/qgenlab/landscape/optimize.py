"""ADAM and backtracking gradient descent with optional registered gradients."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

FD_STEP = 1e-5
MAX_SHRINK = 40


@dataclass
class OptimizerConfig:
    kind: str = "BGD"
    lr: float = 0.3
    iterations: int = 150
    restarts: int = 1
    delta: float = 1e-2
    beta1: float = 0.85
    beta2: float = 0.9995
    eps: float = 1e-8
    alpha: float = 0.5
    shrink: float = 0.8

    def __post_init__(self):
        if self.kind not in ("ADAM", "BGD"):
            raise ValueError(f"unknown optimizer {self.kind!r}")
        if not 0.1 <= self.lr <= 0.5:
            raise ValueError("learning rate / step must lie in [0.1, 0.5]")
        if self.iterations < 1 or self.restarts < 1:
            raise ValueError("iterations and restarts must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OptimizeResult:
    best_theta: np.ndarray
    best_cost: float
    trajectory: list = field(default_factory=list)


def finite_difference_grad(cost, theta: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    g = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = step
        g[i] = (cost(theta + e) - cost(theta - e)) / (2 * step)
    return g


def _value_and_grad(cost, grad):
    if grad is None:
        return lambda th: (float(cost(th)), finite_difference_grad(cost, th))
    if grad == "value_and_grad":
        return cost.value_and_grad
    return lambda th: (float(cost(th)), np.asarray(grad(th)))


def _finite(v):
    if not np.isfinite(v):
        raise FloatingPointError("non-finite cost encountered")
    return v


def optimize(cost, theta0, config: OptimizerConfig, grad=None) -> OptimizeResult:
    """Run ``config.iterations`` steps and keep the lowest-cost point visited.

    ``grad`` may be a callable, the string "value_and_grad" (use
    ``cost.value_and_grad``), or None for central finite differences.
    """
    theta = np.array(theta0, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("initial point must be finite")
    vg = _value_and_grad(cost, grad)
    val, g = vg(theta)
    _finite(val)
    best_t, best_v = theta.copy(), val
    traj = [val]
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    for it in range(1, config.iterations + 1):
        if config.kind == "ADAM":
            m = config.beta1 * m + (1 - config.beta1) * g
            v = config.beta2 * v + (1 - config.beta2) * g * g
            mh = m / (1 - config.beta1 ** it)
            vh = v / (1 - config.beta2 ** it)
            theta = theta - config.lr * mh / (np.sqrt(vh) + config.eps)
            val, g = vg(theta)
        else:
            step = config.lr
            gg = float(g @ g)
            if gg == 0.0:
                traj.append(val)
                break
            new_val = None
            for _ in range(MAX_SHRINK):
                cand = theta - step * g
                cv = _finite(float(cost(cand)))
                if cv <= val - config.alpha * step * gg:
                    new_val = cv
                    break
                step *= config.shrink
            if new_val is None:
                traj.append(val)
                break
            theta = cand
            val, g = vg(theta)
        _finite(val)
        traj.append(val)
        if val < best_v:
            best_t, best_v = theta.copy(), val
    return OptimizeResult(best_t, float(best_v), traj)
