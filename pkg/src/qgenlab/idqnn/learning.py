"""Input distributions with the local-decoupling check and the per-site angle estimator."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGraph


@dataclass(frozen=True)
class InputDistribution:
    """Mixture of components; each is ("zero", None) or ("iid", p) with p = Pr[bit = 1]."""

    components: tuple
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.components) or (w < 0).any() or abs(w.sum() - 1) > 1e-12:
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        for kind, p in self.components:
            if kind == "iid":
                if not 0 <= p <= 1:
                    raise ValueError("iid probability outside [0, 1]")
            elif kind != "zero":
                raise ValueError(f"unknown component {kind!r}")

    @classmethod
    def default(cls) -> "InputDistribution":
        """Equal-weight mixture of all-zero, IID(0.4) and IID(0.8)."""
        return cls((("zero", None), ("iid", 0.4), ("iid", 0.8)), (1 / 3, 1 / 3, 1 / 3))

    def sample(self, n: int, size: int, rng) -> np.ndarray:
        comp = rng.choice(len(self.components), size=size, p=np.asarray(self.weights))
        u = rng.random((size, n))
        probs = np.array([0.0 if k == "zero" else p for k, p in self.components])
        return (u < probs[comp][:, None]).astype(np.uint8)

    def decoupling_probabilities(self, graph: LatticeGraph) -> np.ndarray:
        """Per site Pr[x_j = 0 and every neighbour is 1], in closed form."""
        deg = np.array([len(nb) for nb in graph.neighbours()])
        out = np.zeros(graph.num_sites)
        for (kind, p), w in zip(self.components, self.weights):
            if kind == "iid":
                out += w * (1 - p) * p ** deg
            elif deg.min() == 0:
                out += w * (deg == 0)
        return out

    def has_local_decoupling(self, graph: LatticeGraph, power: float = 2.0) -> bool:
        """True when every site's decoupling probability is at least n^-power."""
        return bool(self.decoupling_probabilities(graph).min() >= graph.num_sites ** (-power))


@dataclass
class BetaEstimate:
    beta: np.ndarray
    counts: np.ndarray
    learned: np.ndarray

    def to_csv(self) -> str:
        rows = ["site,beta_hat,count,learned"]
        for j, (b, c, l) in enumerate(zip(self.beta, self.counts, self.learned)):
            rows.append(f"{j},{b:.10f},{int(c)},{int(l)}")
        return "\n".join(rows) + "\n"


def qualifying_mask(x: np.ndarray, graph: LatticeGraph) -> np.ndarray:
    """(N, n) mask: x_j = 0 and all lattice neighbours of j have x = 1."""
    x = np.asarray(x)
    mask = x == 0
    for j, nb in enumerate(graph.neighbours()):
        if nb:
            mask[:, j] &= (x[:, nb] == 1).all(axis=1)
    return mask


def learn_beta(x: np.ndarray, y: np.ndarray, graph: LatticeGraph) -> BetaEstimate:
    """beta_j = arccos(1 - 2 mean(y_j)) / 2 over qualifying samples, in [0, pi/2]."""
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    if len(x) == 0:
        raise ValueError("empty dataset")
    mask = qualifying_mask(x, graph)
    counts = mask.sum(axis=0)
    ones = (mask & (y == 1)).sum(axis=0)
    learned = counts > 0
    mean = np.where(learned, ones / np.maximum(counts, 1), 0.0)
    beta = np.where(learned, 0.5 * np.arccos(np.clip(1 - 2 * mean, -1.0, 1.0)), 0.0)
    if not learned.all():
        warnings.warn(f"sites without qualifying samples default to 0: {np.nonzero(~learned)[0].tolist()}")
    return BetaEstimate(beta, counts, learned)


def fold_beta(beta) -> np.ndarray:
    """Map angles to the identifiable domain [0, pi/2]."""
    b = np.mod(np.asarray(beta, dtype=float), np.pi)
    return np.minimum(b, np.pi - b)


def write_dataset(path, x: np.ndarray, y: np.ndarray):
    with open(path, "w") as fh:
        for xi, yi in zip(x, y):
            fh.write(json.dumps({"x": "".join(map(str, xi)), "y": "".join(map(str, yi))}, sort_keys=True) + "\n")


def read_dataset(path) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                xs.append([int(c) for c in rec["x"]])
                ys.append([int(c) for c in rec["y"]])
    return np.array(xs, dtype=np.uint8), np.array(ys, dtype=np.uint8)
