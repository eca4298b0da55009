"""Exact geometric predicates with deterministic symbolic perturbation.

All point coordinates are dyadic floats (or exact rationals after an affine
reduction), so each predicate context scales them once by a common denominator
to an integer backbone; orientation and in-sphere signs are then exact integer
determinants (Bareiss), with no floating-point filter to tune.  Exact zeros of
the in-sphere form are resolved by infinitesimal point weights indexed by
point order (simulation of simplicity), so the in-sphere test never ties.

Predicates work in reduced coordinates ``u`` with a symmetric positive
definite Gram form G, so squared distances are ``(u-v)^T G (u-v)``; G is the
identity for full-rank input.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np


def det_int(rows: list[list[int]]) -> int:
    """Exact integer determinant (hardcoded through 4x4, Laplace by 2x2
    minors for 5x5, Bareiss beyond)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        a, b, c = rows[0]
        d, e, f = rows[1]
        g, h, i = rows[2]
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if n == 4:
        a, b, c, d = rows[0]
        e, f, g, h = rows[1]
        i, j, k, l = rows[2]
        m, o, p, q = rows[3]
        ab = a * f - b * e
        ac = a * g - c * e
        ad = a * h - d * e
        bc = b * g - c * f
        bd = b * h - d * f
        cd = c * h - d * g
        kl = k * q - l * p
        jl = j * q - l * o
        jk = j * p - k * o
        il = i * q - l * m
        ik = i * p - k * m
        ij = i * o - j * m
        return ab * kl - ac * jl + ad * jk + bc * il - bd * ik + cd * ij
    if n == 5:
        # Laplace along the first two rows by 2x2 minors
        r0, r1 = rows[0], rows[1]
        bot = rows[2:]
        total = 0
        cols = (0, 1, 2, 3, 4)
        sign_pair = {(0, 1): 1, (0, 2): -1, (0, 3): 1, (0, 4): -1,
                     (1, 2): 1, (1, 3): -1, (1, 4): 1,
                     (2, 3): 1, (2, 4): -1, (3, 4): 1}
        for (c1, c2), sg in sign_pair.items():
            m2 = r0[c1] * r1[c2] - r0[c2] * r1[c1]
            if not m2:
                continue
            rest = [c for c in cols if c != c1 and c != c2]
            sub = [[row[rest[0]], row[rest[1]], row[rest[2]]] for row in bot]
            total += sg * m2 * det_int(sub)
        return total
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            p = next((r for r in range(k + 1, n) if m[r][k]), None)
            if p is None:
                return 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                m[r][c] = (m[r][c] * m[k][k] - m[r][k] * m[k][c]) // prev
            m[r][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Solve a square exact system by Gaussian elimination."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = None
        for r in range(c, n):
            if M[r][c]:
                p = r
                break
        if p is None:
            raise ZeroDivisionError("singular exact system")
        if p != c:
            M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c] / piv
                M[r] = [M[r][k] - f * M[c][k] for k in range(n + 1)]
    return [M[i][n] / M[i][i] for i in range(n)]


class PredicateContext:
    """Shared float/integer coordinates and Gram form for one point set.

    ``weight_ids`` give each point its symbolic-perturbation index: point i
    carries infinitesimal weight ``-eps^(weight_ids[i]+1)``, so smaller ids
    are perturbed more.  Ids must be distinct.
    """

    def __init__(self, pts_float: np.ndarray, weight_ids=None,
                 gram_float: np.ndarray | None = None,
                 pts_exact=None, gram_exact=None):
        self.U = np.asarray(pts_float, dtype=np.float64)
        self.n, self.m = self.U.shape
        self.ids = list(range(self.n)) if weight_ids is None else [int(i) for i in weight_ids]
        if gram_float is None:
            self.G = None
            self.phi = (self.U * self.U).sum(axis=1)
        else:
            self.G = np.asarray(gram_float, dtype=np.float64)
            self.phi = np.einsum("ij,jk,ik->i", self.U, self.G, self.U)
        self._pts_exact = pts_exact
        self._gram_exact = gram_exact
        self._orient_cache: dict[tuple[int, ...], int] = {}
        self._facet_cache: dict[tuple[int, ...], tuple] = {}
        self._build_int_backbone()

    def _build_int_backbone(self) -> None:
        if self._pts_exact is not None:
            fracs = [tuple(p) for p in self._pts_exact]
        else:
            fracs = [tuple(Fraction(x) for x in row) for row in self.U]
        den = 1
        for row in fracs:
            for x in row:
                den = lcm(den, x.denominator)
        self.ip = [tuple(int(x.numerator * (den // x.denominator)) for x in row)
                   for row in fracs]
        if self.G is None and self._gram_exact is None:
            self.iphi = [sum(c * c for c in row) for row in self.ip]
        else:
            ge = self._gram_exact
            if ge is None:
                ge = [[Fraction(x) for x in row] for row in self.G]
                self._gram_exact = ge
            gden = 1
            for row in ge:
                for x in row:
                    gden = lcm(gden, x.denominator)
            ig = [[int(x.numerator * (gden // x.denominator)) for x in row] for row in ge]
            m = self.m
            self.iphi = [sum(row[a] * ig[a][b] * row[b] for a in range(m) for b in range(m))
                         for row in self.ip]

    def pe(self, i: int) -> tuple[Fraction, ...]:
        if self._pts_exact is not None:
            return tuple(self._pts_exact[i])
        return tuple(Fraction(x) for x in self.U[i])

    # -- orientation -----------------------------------------------------
    def orient(self, ids: tuple[int, ...]) -> int:
        """Sign of det[u_{ids[1]}-u_{ids[0]}, ..., u_{ids[-1]}-u_{ids[0]}]."""
        ids = tuple(ids)
        got = self._orient_cache.get(ids)
        if got is not None:
            return got
        base = self.ip[ids[0]]
        rows = [[a - b for a, b in zip(self.ip[i], base)] for i in ids[1:]]
        sign = _sign(det_int(rows))
        self._orient_cache[ids] = sign
        return sign

    # -- weighted in-sphere ------------------------------------------------
    def in_sphere(self, simplex: tuple[int, ...], q: int) -> bool:
        """True iff q is strictly inside the perturbed power sphere of the
        (full-dimensional) simplex."""
        m = self.m
        uq = self.ip[q]
        pq = self.iphi[q]
        base = []
        rows = []
        for i in simplex:
            ui = self.ip[i]
            diff = [a - b for a, b in zip(ui, uq)]
            base.append(diff)
            rows.append(diff + [self.iphi[i] - pq])
        d0 = det_int(rows)
        orient = _sign(det_int([[base[j][c] - base[0][c] for c in range(m)]
                                for j in range(1, len(simplex))])) if m else 1
        if orient == 0:
            raise ArithmeticError("in_sphere called on a degenerate simplex")
        parity = 1 if m % 2 == 0 else -1
        if d0:
            return _sign(d0) * orient * parity > 0
        # symbolic perturbation: the coefficient of the dominant infinitesimal
        # (smallest weight id among the participants) decides
        q_rank = self.ids[q]

        def cofactor(jdrop: int) -> int:
            sub = [base[j] for j in range(len(simplex)) if j != jdrop]
            s = det_int(sub)
            return s if (jdrop + m) % 2 == 0 else -s

        order = sorted([("s", j) for j in range(len(simplex))] + [("q", -1)],
                       key=lambda t: q_rank if t[0] == "q" else self.ids[simplex[t[1]]])
        for kind, j in order:
            c = cofactor(j) if kind == "s" else -sum(cofactor(t) for t in range(len(simplex)))
            if c:
                return _sign(c) * orient * parity > 0
        raise ArithmeticError("symbolic perturbation failed to resolve in_sphere")

    # -- facet power test (query exactly on the facet's hyperplane) ---------
    def facet_sphere(self, facet: tuple[int, ...], q: int) -> bool:
        """True iff q, lying on the hyperplane of the facet, is strictly inside
        the facet's perturbed power sphere within that hyperplane."""
        if len(facet) == 1:
            # only reachable for coincident points, which are excluded upstream
            return self.ids[q] > self.ids[facet[0]]
        sub = self._facet_context_with_query(facet, q)
        return sub.in_sphere(tuple(range(len(facet))), len(facet))

    def _facet_context(self, facet: tuple[int, ...]):
        got = self._facet_cache.get(facet)
        if got is not None:
            return got
        base = facet[0]
        be = self.pe(base)
        edges = [[x - y for x, y in zip(self.pe(i), be)] for i in facet[1:]]
        k = len(edges)
        piv_rows: list[int] = []
        work: list[tuple[list[Fraction], int]] = []
        for a in range(self.m):
            row = [edges[j][a] for j in range(k)]
            for w, lead in work:
                if row[lead]:
                    f = row[lead] / w[lead]
                    row = [x - f * y for x, y in zip(row, w)]
            lead = next((j for j, x in enumerate(row) if x), None)
            if lead is not None:
                work.append((row, lead))
                piv_rows.append(a)
                if len(piv_rows) == k:
                    break
        if len(piv_rows) < k:
            raise ArithmeticError("facet is degenerate")
        A = [[edges[j][a] for j in range(k)] for a in piv_rows]
        if self.G is None and self._gram_exact is None:
            gram = [[sum(edges[a][t] * edges[b][t] for t in range(self.m)) for b in range(k)]
                    for a in range(k)]
        else:
            ge = self._gram_exact
            if ge is None:
                ge = [[Fraction(x) for x in row] for row in self.G]
                self._gram_exact = ge
            gram = [[sum(edges[a][s] * ge[s][t] * edges[b][t]
                         for s in range(self.m) for t in range(self.m)) for b in range(k)]
                    for a in range(k)]
        got = (be, A, piv_rows, gram)
        self._facet_cache[facet] = got
        return got

    def _facet_context_with_query(self, facet: tuple[int, ...], q: int) -> "PredicateContext":
        be, A, piv_rows, gram = self._facet_context(facet)

        def coords(i: int) -> tuple[Fraction, ...]:
            pi = self.pe(i)
            rhs = [pi[a] - be[a] for a in piv_rows]
            return tuple(solve_exact(A, rhs))

        sub_ids = list(facet) + [q]
        sub_pts = [coords(i) for i in sub_ids]
        return PredicateContext(
            np.array([[float(x) for x in p] for p in sub_pts]),
            weight_ids=[self.ids[i] for i in sub_ids],
            gram_float=np.array([[float(x) for x in row] for row in gram]),
            pts_exact=sub_pts,
            gram_exact=gram,
        )


def affine_frame(points: np.ndarray):
    """Exact affine-rank reduction of a point set.

    Returns ``(m, ctx_args)`` where m is the affine rank and ctx_args are
    PredicateContext arguments: reduced float coordinates plus, when the rank
    is deficient, exact coordinates and the Gram form of the reduction basis.
    """
    pts = np.asarray(points, dtype=np.float64)
    n, k = pts.shape
    exact = [tuple(Fraction(x) for x in row) for row in pts]
    p0 = exact[0]
    work: list[tuple[list[Fraction], int]] = []
    indep: list[int] = []
    for i in range(1, n):
        row = [x - y for x, y in zip(exact[i], p0)]
        for w, lead in work:
            if row[lead]:
                f = row[lead] / w[lead]
                row = [x - f * y for x, y in zip(row, w)]
        lead = next((j for j, x in enumerate(row) if x), None)
        if lead is not None:
            work.append((row, lead))
            indep.append(i)
            if len(indep) == k:
                break
    m = len(indep)
    if m == k:
        return m, dict(pts_float=pts)
    if m == 0:
        return 0, None
    basis = [[exact[i][a] - p0[a] for i in indep] for a in range(k)]  # k rows x m cols
    piv_rows: list[int] = []
    work2: list[tuple[list[Fraction], int]] = []
    for a in range(k):
        row = list(basis[a])
        for w, lead in work2:
            if row[lead]:
                f = row[lead] / w[lead]
                row = [x - f * y for x, y in zip(row, w)]
        lead = next((j for j, x in enumerate(row) if x), None)
        if lead is not None:
            work2.append((row, lead))
            piv_rows.append(a)
            if len(piv_rows) == m:
                break
    A = [basis[a] for a in piv_rows]
    coords = []
    for i in range(n):
        rhs = [exact[i][a] - p0[a] for a in piv_rows]
        coords.append(tuple(solve_exact(A, rhs)))
    cols = [[basis[a][j] for a in range(k)] for j in range(m)]
    gram = [[sum(cols[a][t] * cols[b][t] for t in range(k)) for b in range(m)] for a in range(m)]
    return m, dict(
        pts_float=np.array([[float(x) for x in c] for c in coords]),
        gram_float=np.array([[float(x) for x in row] for row in gram]),
        pts_exact=coords,
        gram_exact=gram,
    )
