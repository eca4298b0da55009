"""Dense GF(2) linear algebra for homology oracles."""

from __future__ import annotations

import numpy as np


def as_matrix(A, n_cols: int | None = None) -> np.ndarray:
    M = np.asarray(A, dtype=np.uint8)
    if M.size == 0:
        return M.reshape(0, n_cols if n_cols is not None else (M.shape[1] if M.ndim == 2 else 0))
    return (M % 2).astype(np.uint8)


def rref(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (R, pivot column list)."""
    M = as_matrix(A).copy()
    n_rows, n_cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        hit = np.nonzero(M[r:, c])[0]
        if hit.size == 0:
            continue
        pr = r + int(hit[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        others = np.nonzero(M[:, c])[0]
        others = others[others != r]
        if others.size:
            M[others] ^= M[r]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A) -> int:
    M = as_matrix(A)
    if M.shape[0] == 0 or M.shape[1] == 0:
        return 0
    return len(rref(M)[1])


def nullspace(A) -> np.ndarray:
    """Rows form a basis of {x : A x = 0} over GF(2)."""
    M = as_matrix(A)
    n_cols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n_cols, dtype=np.uint8)
    R, pivots = rref(M)
    pivot_set = set(pivots)
    free = [c for c in range(n_cols) if c not in pivot_set]
    basis = np.zeros((len(free), n_cols), dtype=np.uint8)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = R[i, fc]
    return basis


def stack(mats: list[np.ndarray], n_cols: int) -> np.ndarray:
    mats = [as_matrix(m, n_cols) for m in mats if m is not None]
    mats = [m for m in mats if m.shape[0] > 0]
    if not mats:
        return np.zeros((0, n_cols), dtype=np.uint8)
    return np.vstack(mats)


def span_dim(mats: list[np.ndarray], n_cols: int) -> int:
    return rank(stack(mats, n_cols))


def intersection_dim(A: np.ndarray, B: np.ndarray, n_cols: int) -> int:
    """dim(rowspace(A) ∩ rowspace(B))."""
    return rank(A) + rank(B) - span_dim([A, B], n_cols)
