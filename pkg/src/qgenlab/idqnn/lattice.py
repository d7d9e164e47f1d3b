"""Lattice geometry and the IDQNN model container.

Sites are flattened as ``i1 * R + r`` where ``r`` is the C-order index of
the register coordinate ``(i2, ..., iD)`` and ``R = n2 * ... * nD``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LatticeGraph:
    dims: tuple[int, ...]
    edges: frozenset  # of (a, b) flat site pairs with a < b

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "edges", frozenset(tuple(sorted((int(a), int(b)))) for a, b in self.edges))
        if len(self.dims) < 1 or min(self.dims) < 1:
            raise ValueError("dims must be positive")
        n = self.num_sites
        coords = self.coords()
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise ValueError(f"edge {(a, b)} out of range")
            if int(np.abs(coords[a] - coords[b]).sum()) != 1:
                raise ValueError(f"edge {(a, b)} is not between lattice neighbours")
        for a, b in _neighbour_pairs(self.dims):
            if coords[a][0] != coords[b][0] and (a, b) not in self.edges:
                raise ValueError(f"cross-slice edge {(a, b)} missing")

    @property
    def num_sites(self) -> int:
        return math.prod(self.dims)

    @property
    def num_slices(self) -> int:
        return self.dims[0]

    @property
    def register_size(self) -> int:
        return math.prod(self.dims[1:])

    def coords(self) -> np.ndarray:
        return np.array(np.unravel_index(np.arange(self.num_sites), self.dims)).T

    def neighbours(self) -> list[list[int]]:
        nb = [[] for _ in range(self.num_sites)]
        for a, b in sorted(self.edges):
            nb[a].append(b)
            nb[b].append(a)
        return nb

    def slice_edges(self, s: int) -> list[tuple[int, int]]:
        """Within-slice edges of slice ``s`` as register-index pairs."""
        R = self.register_size
        return [(a - s * R, b - s * R) for a, b in sorted(self.edges) if a // R == s and b // R == s]

    @classmethod
    def full(cls, dims) -> "LatticeGraph":
        return cls(tuple(dims), frozenset(_neighbour_pairs(tuple(dims))))

    @classmethod
    def random_slices(cls, dims, density: float, rng) -> "LatticeGraph":
        """All cross-slice edges plus each within-slice edge kept with probability ``density``."""
        dims = tuple(dims)
        R = math.prod(dims[1:])
        keep = []
        for a, b in _neighbour_pairs(dims):
            if a // R != b // R or rng.random() < density:
                keep.append((a, b))
        return cls(dims, frozenset(keep))


def _neighbour_pairs(dims) -> list[tuple[int, int]]:
    n = math.prod(dims)
    coords = np.array(np.unravel_index(np.arange(n), dims)).T
    out = []
    for a in range(n):
        for ax in range(len(dims)):
            c = coords[a].copy()
            c[ax] += 1
            if c[ax] < dims[ax]:
                out.append((a, int(np.ravel_multi_index(tuple(c), dims))))
    return out


@dataclass
class IdqnnModel:
    """Lattice graph plus one angle per site. Each site applies exp(-i beta Z)."""

    graph: LatticeGraph
    beta: np.ndarray
    seed: int | None = field(default=None)

    def __post_init__(self):
        self.beta = np.mod(np.asarray(self.beta, dtype=float), np.pi)
        if self.beta.shape != (self.graph.num_sites,):
            raise ValueError("need one beta per lattice site")

    @property
    def num_sites(self) -> int:
        return self.graph.num_sites

    def to_dict(self) -> dict:
        return {"dims": list(self.graph.dims), "edges": [list(e) for e in sorted(self.graph.edges)],
                "beta": [float(b) for b in self.beta], "seed": self.seed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "IdqnnModel":
        g = LatticeGraph(tuple(d["dims"]), frozenset(tuple(e) for e in d["edges"]))
        return cls(g, np.array(d["beta"], dtype=float), d.get("seed"))

    @classmethod
    def from_json(cls, s: str) -> "IdqnnModel":
        return cls.from_dict(json.loads(s))

    @classmethod
    def random(cls, dims, rng, density: float | None = None, seed=None) -> "IdqnnModel":
        g = LatticeGraph.full(dims) if density is None else LatticeGraph.random_slices(dims, density, rng)
        return cls(g, rng.uniform(0, np.pi, g.num_sites), seed)


def bits_to_index(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    return bits @ (1 << np.arange(bits.shape[-1], dtype=np.int64))


def index_to_bits(idx, n: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    return ((idx[..., None] >> np.arange(n)) & 1).astype(np.uint8)
