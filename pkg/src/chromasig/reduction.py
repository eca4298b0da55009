"""Z/2 persistent homology: boundary matrices, column reduction, diagram extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexes import FilteredComplex


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death) pairs in one homology degree.

    Essential features carry ``death = math.inf``.  Zero-persistence pairs are
    suppressed from ``points`` but counted in ``n_suppressed``.  ``truncated``
    marks degrees where the complex had no (degree+1)-simplices, so deaths
    could not be observed.
    """

    degree: int
    points: tuple[tuple[float, float], ...]
    n_suppressed: int = 0
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.points)

    def alive(self, t: float) -> int:
        """Number of features with birth <= t < death."""
        return sum(1 for b, d in self.points if b <= t < d)

    def persisting(self, s: float, t: float) -> int:
        """Number of features with birth <= s and death > t (s <= t)."""
        return sum(1 for b, d in self.points if b <= s and d > t)

    def finite_values(self) -> list[float]:
        out = []
        for b, d in self.points:
            out.append(b)
            if d != math.inf:
                out.append(d)
        return out


@dataclass(frozen=True)
class BoundaryMatrix:
    """Sparse Z/2 boundary matrix in the deterministic total order.

    ``columns[j]`` lists the positions of the codimension-1 faces of simplex j,
    strictly increasing and all less than j.
    """

    columns: tuple[tuple[int, ...], ...]
    dims: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.columns)


def boundary_matrix(K: FilteredComplex) -> BoundaryMatrix:
    cols = []
    for s in K.simplices:
        if len(s) == 1:
            cols.append(())
        else:
            faces = sorted(K.index(s[:k] + s[k + 1:]) for k in range(len(s)))
            cols.append(tuple(faces))
    return BoundaryMatrix(tuple(cols), K.dims.copy(), K.values.copy())


@dataclass(frozen=True)
class Pairing:
    """Result of column reduction: creator/destroyer pairs plus essential columns."""

    pairs: tuple[tuple[int, int], ...]
    essential: tuple[int, ...]
    n_columns: int

    def partner(self) -> np.ndarray:
        p = np.full(self.n_columns, -1, dtype=np.intp)
        for i, j in self.pairs:
            p[i] = j
            p[j] = i
        return p


def reduce(M: BoundaryMatrix, use_clearing: bool = True) -> Pairing:
    """Left-to-right Z/2 column reduction; returns the standard R = D*V pairing.

    Columns are processed per dimension, descending, so the clearing
    optimization can skip columns already known to be cycles.  The pairing is
    identical with and without clearing.
    """
    n = len(M.columns)
    if n == 0:
        return Pairing((), (), 0)
    dims = M.dims
    max_dim = int(dims.max())
    by_dim: list[list[int]] = [[] for _ in range(max_dim + 1)]
    loc = np.zeros(n, dtype=np.intp)
    for j in range(n):
        q = int(dims[j])
        loc[j] = len(by_dim[q])
        by_dim[q].append(j)
    partner = np.full(n, -1, dtype=np.intp)
    cleared = np.zeros(n, dtype=bool)
    for q in range(max_dim, 0, -1):
        rows = by_dim[q - 1]
        low_mask: dict[int, int] = {}
        for j in by_dim[q]:
            if use_clearing and cleared[j]:
                continue
            mask = 0
            for r in M.columns[j]:
                mask |= 1 << int(loc[r])
            while mask:
                low = mask.bit_length() - 1
                other = low_mask.get(low)
                if other is None:
                    break
                mask ^= other
            if mask:
                low = mask.bit_length() - 1
                low_mask[low] = mask
                i = rows[low]
                partner[i] = j
                partner[j] = i
                if use_clearing:
                    cleared[i] = True
    pairs = tuple((i, int(partner[i])) for i in range(n) if partner[i] > i)
    essential = tuple(int(i) for i in range(n) if partner[i] == -1)
    return Pairing(pairs, essential, n)


def diagrams(K: FilteredComplex, max_degree: int) -> list[PersistenceDiagram]:
    """Persistence diagrams of a filtered complex in degrees 0..max_degree."""
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    M = boundary_matrix(K)
    pairing = reduce(M, use_clearing=True)
    pts: dict[int, list[tuple[float, float]]] = {d: [] for d in range(max_degree + 1)}
    n_sup = {d: 0 for d in range(max_degree + 1)}
    for i, j in pairing.pairs:
        d = int(M.dims[i])
        if d > max_degree:
            continue
        b, dth = float(M.values[i]), float(M.values[j])
        if b < dth:
            pts[d].append((b, dth))
        else:
            n_sup[d] += 1
    for i in pairing.essential:
        d = int(M.dims[i])
        if d <= max_degree:
            pts[d].append((float(M.values[i]), math.inf))
    kdim = K.dim
    return [
        PersistenceDiagram(d, tuple(sorted(pts[d])), n_sup[d], truncated=(d + 1 > kdim))
        for d in range(max_degree + 1)
    ]
