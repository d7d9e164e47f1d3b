"""Shadow coefficient estimates, thresholded observable learning and the least-squares fit."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..qcore.pauli import LETTERS, PauliObservable, PauliString
from .dataset import LABEL_EXPECT, BASES, FULL_HIST_LIMIT, ShadowStatistics, MeasurementDataset

# 3^{[letter != I]} <label|letter|label>
_T = LABEL_EXPECT * np.array([1.0, 3.0, 3.0, 3.0])
UNKNOWN_MAX_N = 12
UNKNOWN_MAX_K = 3
NEAR_THRESHOLD = 0.1
DEFAULT_CONSTANT = 16.0


def as_statistics(data) -> ShadowStatistics:
    if isinstance(data, ShadowStatistics):
        return data
    if isinstance(data, MeasurementDataset):
        return ShadowStatistics.from_dataset(data)
    raise TypeError("expected a MeasurementDataset or ShadowStatistics")


def _contract(h: np.ndarray, table: np.ndarray) -> np.ndarray:
    t = h
    for ax in range(h.ndim):
        t = np.tensordot(t, table, axes=([0], [0]))  # consumes the leading label axis
    return t


def alpha_window(data, i: int, P: str, window) -> np.ndarray:
    """Estimates for every Pauli on ``window``; tensor axis j holds the letter on window[j]."""
    stats = as_statistics(data)
    return 3.0 * _contract(stats.histogram(i, P, window), _T)


def second_moment_window(data, i: int, P: str, window) -> np.ndarray:
    """(1/N) sum_l d_l^2 for every Pauli on ``window``, with d_l the per-record data vector."""
    stats = as_statistics(data)
    return 9.0 * _contract(stats.histogram(i, P, window, squared=True), _T ** 2)


def shadow_alpha(data, i: int, P: str, Q) -> float:
    """Unbiased estimate of the coefficient of Q in U^dag P_i U."""
    letters = Q.letters if isinstance(Q, PauliString) else str(Q)
    window = tuple(q for q, c in enumerate(letters) if c != "I")
    t = alpha_window(data, i, P, window)
    idx = tuple(LETTERS.index(letters[q]) for q in window)
    return float(t[idx])


def _tensor_terms(t: np.ndarray, window, n: int, max_weight=None) -> dict:
    terms = {}
    for idx in itertools.product(range(4), repeat=len(window)):
        w = sum(1 for a in idx if a)
        if max_weight is not None and w > max_weight:
            continue
        s = ["I"] * n
        for q, a in zip(window, idx):
            s[q] = LETTERS[a]
        terms["".join(s)] = float(t[idx])
    return terms


def threshold_value(eps: float, k: int) -> float:
    return 0.5 * eps / (2 * math.sqrt(2)) ** k


def sample_size_bound(n: int, k: int, eps: float, delta: float, constant: float = DEFAULT_CONSTANT) -> int:
    """constant * 3^(k+1) * 8^k * log(6n/delta) / eps^2, a 2^O(k) log(n/delta)/eps^2 size.

    3^(k+1) bounds the per-record variance of a weight-k estimate and 8^k is
    the inverse square of the threshold's k-dependence.
    """
    return int(math.ceil(constant * 3 ** (k + 1) * 8 ** k * math.log(6 * n / delta) / eps ** 2))


@dataclass
class ObservableReport:
    threshold: float
    required_N: int
    N: int
    near_threshold: list = field(default_factory=list)  # (i, P, letters, value)

    @property
    def undersampled(self) -> bool:
        return self.N < self.required_N


def _candidate_tensors(stats: ShadowStatistics, i: int, P: str, k: int, windows):
    n = stats.n
    if windows is not None:
        for w in windows:
            yield tuple(w), alpha_window(stats, i, P, tuple(w))
        return
    if n <= FULL_HIST_LIMIT:
        yield tuple(range(n)), alpha_window(stats, i, P, tuple(range(n)))
        return
    if n > UNKNOWN_MAX_N or k > UNKNOWN_MAX_K:
        raise ValueError(f"candidate enumeration capped at n <= {UNKNOWN_MAX_N}, k <= {UNKNOWN_MAX_K}")
    for w in itertools.combinations(range(n), min(k, n)):
        yield w, alpha_window(stats, i, P, w)


def learn_observables(data, k: int, eps: float, delta: float, windows=None,
                      constant: float = DEFAULT_CONSTANT) -> tuple[dict, ObservableReport]:
    """Thresholded shadow estimates O_hat[i, P] = sum_{|Q| <= k} beta_Q Q.

    ``windows`` optionally restricts candidates to Paulis inside geometric
    windows; by default every Pauli of weight <= k is a candidate.
    """
    stats = as_statistics(data)
    n = stats.n
    if k < 1 or k > n:
        raise ValueError("k must lie in [1, n]")
    if windows is None and n > FULL_HIST_LIMIT and (n > UNKNOWN_MAX_N or k > UNKNOWN_MAX_K):
        raise ValueError(f"candidate enumeration capped at n <= {UNKNOWN_MAX_N}, k <= {UNKNOWN_MAX_K}")
    thr = threshold_value(eps, k)
    report = ObservableReport(thr, sample_size_bound(n, k, eps, delta, constant), stats.N)
    if report.undersampled:
        warnings.warn(f"dataset of {stats.N} records is below the size bound {report.required_N}",
                      stacklevel=2)
    out = {}
    for i in range(n):
        for P in BASES:
            terms = {}
            for window, t in _candidate_tensors(stats, i, P, k, windows):
                terms.update(_tensor_terms(t, window, n, max_weight=k))
            kept = {}
            for letters, v in terms.items():
                if letters.count("I") == n:
                    continue
                if abs(abs(v) - thr) < NEAR_THRESHOLD * thr:
                    report.near_threshold.append((i, P, letters, v))
                if abs(v) >= thr:
                    kept[letters] = v
            out[(i, P)] = PauliObservable(n, kept)
    return out, report


@dataclass
class PauliCoefficients:
    """alpha[(i, P)] is a tensor (4,)*|C_i| over Paulis on lightcones[i]."""

    n: int
    lightcones: dict
    alpha: dict

    def observable(self, i: int, P: str) -> PauliObservable:
        return PauliObservable(self.n, _tensor_terms(self.alpha[(i, P)], self.lightcones[i], self.n))

    def observables(self) -> dict:
        return {(i, P): self.observable(i, P) for i in range(self.n) for P in BASES}

    def keys(self):
        return [(i, P) for i in range(self.n) for P in BASES]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.alpha[k].reshape(-1) for k in self.keys()])

    def with_vector(self, vec) -> "PauliCoefficients":
        out, pos = {}, 0
        for k in self.keys():
            shape = self.alpha[k].shape
            size = int(np.prod(shape))
            out[k] = np.asarray(vec[pos:pos + size], dtype=float).reshape(shape)
            pos += size
        return PauliCoefficients(self.n, self.lightcones, out)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lightcones": {str(i): list(w) for i, w in self.lightcones.items()},
            "alpha": {f"{i}:{P}": self.alpha[(i, P)].reshape(-1).tolist() for i, P in self.keys()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PauliCoefficients":
        cones = {int(i): tuple(w) for i, w in d["lightcones"].items()}
        alpha = {}
        for key, vals in d["alpha"].items():
            i, P = key.split(":")
            alpha[(int(i), P)] = np.asarray(vals, dtype=float).reshape((4,) * len(cones[int(i)]))
        return cls(int(d["n"]), cones, alpha)


@dataclass
class LeastSquaresProblem:
    """L(alpha) = (1/N) sum_l |alpha - d_l|^2 = |alpha - mean|^2 + const."""

    template: PauliCoefficients
    mean: np.ndarray
    const: float

    def loss(self, vec) -> float:
        r = np.asarray(vec) - self.mean
        return float(r @ r + self.const)

    def grad(self, vec) -> np.ndarray:
        return 2.0 * (np.asarray(vec) - self.mean)

    def hvp(self, vec, v) -> np.ndarray:
        # the gradient is affine, so a single difference is exact
        return self.grad(np.asarray(vec) + np.asarray(v)) - self.grad(vec)

    def minimizer(self) -> np.ndarray:
        return self.mean.copy()

    def descend(self, x0, steps: int = 60, lr: float = 0.25) -> tuple[np.ndarray, list]:
        x = np.asarray(x0, dtype=float).copy()
        trace = [self.loss(x)]
        for _ in range(steps):
            x = x - lr * self.grad(x)
            trace.append(self.loss(x))
        return x, trace


def least_squares_problem(data, lightcones: dict) -> LeastSquaresProblem:
    if not lightcones:
        raise ValueError("empty lightcone map")
    stats = as_statistics(data)
    cones = {i: tuple(sorted(lightcones[i])) for i in range(stats.n)}
    alpha, sq = {}, 0.0
    for i in range(stats.n):
        for P in BASES:
            alpha[(i, P)] = alpha_window(stats, i, P, cones[i])
            sq += float(second_moment_window(stats, i, P, cones[i]).sum())
    tmpl = PauliCoefficients(stats.n, cones, alpha)
    mean = tmpl.to_vector()
    return LeastSquaresProblem(tmpl, mean, sq - float(mean @ mean))


def fit_alpha_least_squares(data, lightcones: dict, steps: int = 60, lr: float = 0.25,
                            x0=None) -> tuple[PauliCoefficients, list]:
    """Closed-form minimizer plus the loss trace of gradient descent started at ``x0`` (default 0)."""
    prob = least_squares_problem(data, lightcones)
    start = np.zeros_like(prob.mean) if x0 is None else np.asarray(x0, dtype=float)
    _, trace = prob.descend(start, steps, lr)
    return prob.template.with_vector(prob.minimizer()), trace
