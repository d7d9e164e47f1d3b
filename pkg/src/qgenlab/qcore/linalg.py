"""Norms and projections."""

from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla


def operator_norm(mat: np.ndarray, tol: float = 1e-10, restarts: int = 3) -> float:
    """Largest singular value: dense SVD up to 2^8, Lanczos above."""
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("operator_norm expects a square matrix")
    d = mat.shape[0]
    if d > 2 ** 12:
        raise ValueError("matrix larger than 2^12")
    if d <= 2 ** 8:
        return float(np.linalg.svd(mat, compute_uv=False)[0])
    rng = np.random.default_rng(0)
    for _ in range(restarts):
        try:
            v0 = rng.standard_normal(d)
            s = spla.svds(mat, k=1, tol=tol, v0=v0, return_singular_vectors=False)
            return float(s[0])
        except spla.ArpackNoConvergence:
            continue
    raise RuntimeError("operator_norm iteration did not converge")


def nearest_unitary(mat: np.ndarray) -> np.ndarray:
    """Polar factor V W^dag from the SVD M = V S W^dag."""
    v, _, wh = np.linalg.svd(mat)
    return v @ wh


def is_unitary(mat: np.ndarray, atol: float = 1e-9) -> bool:
    mat = np.asarray(mat)
    return np.allclose(mat.conj().T @ mat, np.eye(mat.shape[0]), atol=atol)


def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def partial_trace(op: np.ndarray, window, keep) -> np.ndarray:
    """Trace out every qubit of ``window`` not in ``keep`` (little-endian on both)."""
    window = list(window)
    keep = [q for q in window if q in set(keep)]
    w = len(window)
    t = np.asarray(op).reshape((2,) * (2 * w))
    # axis j (row) and w + j (col) hold qubit window[w-1-j]
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    rows, cols = [None] * w, [None] * w
    out_r, out_c = [], []
    for j in range(w):
        q = window[w - 1 - j]
        if q in keep:
            rows[j], cols[j] = next(letters), next(letters)
            out_r.append(rows[j])
            out_c.append(cols[j])
        else:
            rows[j] = cols[j] = next(letters)
    expr = "".join(rows) + "".join(cols) + "->" + "".join(out_r) + "".join(out_c)
    d = 2 ** len(keep)
    return np.einsum(expr, t).reshape(d, d)
