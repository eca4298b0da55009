"""Incremental Delaunay triangulation in up to 5 ambient dimensions.

Bowyer-Watson insertion: each new point's conflict region (cells whose
circumsphere strictly contains it under the symbolic perturbation) is carved
out and re-triangulated.  The hull is handled with a symbolic vertex at
infinity whose cells conflict with points beyond the hull facet's hyperplane,
or on the hyperplane and inside the facet's own sphere.  Affinely dependent
inputs are triangulated inside their affine hull.  The output is the regular
triangulation for infinitesimal weights indexed by point order, so it is
deterministic and independent of processing order.

Conflict scans are vectorized against per-cell float data (circumcenter and
radius for finite cells; hull hyperplane and in-plane facet sphere for
infinite cells) with conservative margins; only queries inside a margin go
through the exact integer predicates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexes import InputError, RefusalError
from .predicates import PredicateContext, affine_frame

INF = -1
MAX_AMBIENT_DIM = 5
BRUTE_FORCE_LIMIT = 30
_REL = 6.4e-11  # relative slack for float conflict prefilters


@dataclass(frozen=True)
class DelaunayComplex:
    """Maximal simplices of a Delaunay triangulation plus implicit faces."""

    points: np.ndarray
    maximal: tuple[tuple[int, ...], ...]
    intrinsic_dim: int

    def all_simplices(self, max_dim: int | None = None) -> list[tuple[int, ...]]:
        """Every face of every maximal simplex, up to max_dim, sorted."""
        top = self.intrinsic_dim if max_dim is None else min(max_dim, self.intrinsic_dim)
        out: set[tuple[int, ...]] = set()
        for cell in self.maximal:
            for size in range(1, min(top, len(cell) - 1) + 2):
                out.update(itertools.combinations(cell, size))
        return sorted(out)


class _Rows:
    """Growable row store backing the vectorized conflict scans."""

    def __init__(self, data_cols: int, aux_cols: int):
        cap = 64
        self._dc = data_cols
        self._ac = aux_cols
        self.data = np.zeros((cap, data_cols), dtype=np.float64)
        self.aux = np.zeros((cap, aux_cols), dtype=np.float64)
        self.alive = np.zeros(cap, dtype=bool)
        self.verts: list[tuple[int, ...] | None] = [None] * cap
        self.extra: list[int] = [0] * cap  # outward orientation sign (infinite cells)
        self.n = 0
        self.n_dead = 0

    def _grow(self) -> None:
        cap = self.data.shape[0] * 2
        self.data = np.resize(self.data, (cap, self._dc))
        self.aux = np.resize(self.aux, (cap, self._ac))
        alive = np.zeros(cap, dtype=bool)
        alive[: self.n] = self.alive[: self.n]
        self.alive = alive
        self.verts.extend([None] * (cap - len(self.verts)))
        self.extra.extend([0] * (cap - len(self.extra)))

    def add(self, vec, aux, verts: tuple[int, ...], extra: int = 0) -> int:
        if self.n == self.data.shape[0]:
            self._grow()
        i = self.n
        self.data[i] = vec
        self.aux[i] = aux
        self.alive[i] = True
        self.verts[i] = verts
        self.extra[i] = extra
        self.n += 1
        return i

    def kill(self, i: int) -> None:
        self.alive[i] = False
        self.verts[i] = None
        self.n_dead += 1

    def maybe_compact(self) -> None:
        if self.n_dead <= 32 or self.n_dead * 2 <= self.n:
            return
        keep = np.nonzero(self.alive[: self.n])[0]
        k = len(keep)
        self.data[:k] = self.data[keep]
        self.aux[:k] = self.aux[keep]
        self.verts[:k] = [self.verts[i] for i in keep]
        self.extra[:k] = [self.extra[i] for i in keep]
        self.alive[: self.n] = False
        self.alive[:k] = True
        for i in range(k, self.n):
            self.verts[i] = None
        self.n = k
        self.n_dead = 0


class _Builder:
    def __init__(self, ctx: PredicateContext, m: int, flat_groups=None):
        self.ctx = ctx
        self.m = m
        self.G = ctx.G
        # flat-group hints: queries from a group lying in a proper flat can
        # skip the exact on-hyperplane test against hull facets whose
        # hyperplane is known to contain the group's whole flat
        self.group_of = np.full(ctx.n, -1, dtype=np.intp)
        self.group_refs: list[list[int]] = []
        if flat_groups:
            for members in flat_groups:
                refs = self._spanning_subset(members)
                if len(refs) > m:  # the group spans everything; no hyperplane fits
                    continue
                gid = len(self.group_refs)
                self.group_refs.append(refs)
                for p in members:
                    self.group_of[p] = gid
        # finite: data = circumcenter, aux = (r2, margin)
        self.fin = _Rows(m, 2)
        # infinite: data = (normal | in-plane facet circumcenter),
        #           aux = (offset, plane margin, facet r2, facet margin,
        #                  one containment state per flat group)
        self.inf = _Rows(2 * m, 4 + len(self.group_refs))
        self.inserted: list[int] = []

    def _spanning_subset(self, members) -> list[int]:
        """Greedy affinely independent subset spanning the group's flat."""
        refs = [int(members[0])]
        rows: list[tuple[list[Fraction], int]] = []
        base = self.ctx.ip[refs[0]]
        for i in members[1:]:
            row = [Fraction(a - b) for a, b in zip(self.ctx.ip[int(i)], base)]
            for w, lead in rows:
                if row[lead]:
                    f = row[lead] / w[lead]
                    row = [x - f * y for x, y in zip(row, w)]
            lead = next((j for j, x in enumerate(row) if x), None)
            if lead is not None:
                rows.append((row, lead))
                refs.append(int(i))
                if len(refs) == self.m + 1:
                    break
        return refs

    def _facet_contains_group(self, row: int, gid: int) -> bool:
        got = self.inf.aux[row, 4 + gid]
        if got:
            return got == 2.0
        facet = self.inf.verts[row]
        contained = all(self.ctx.orient(facet + (r,)) == 0
                        for r in self.group_refs[gid] if r not in facet)
        self.inf.aux[row, 4 + gid] = 2.0 if contained else 1.0
        return contained

    # -- metric helpers ----------------------------------------------------
    def _sq(self, diff: np.ndarray) -> np.ndarray:
        if self.G is None:
            return (diff * diff).sum(axis=-1)
        return np.einsum("...j,jk,...k->...", diff, self.G, diff)

    # -- cell creation -------------------------------------------------------
    def add_finite_cells(self, vlists: list[tuple[int, ...]]) -> None:
        if not vlists:
            return
        U = self.ctx.U
        m = self.m
        B = len(vlists)
        E = np.empty((B, m, m))
        for b, verts in enumerate(vlists):
            E[b] = U[list(verts[1:])] - U[verts[0]]
        EG = E if self.G is None else E @ self.G
        A = 2.0 * EG
        rhs = np.einsum("bij,bij->bi", EG, E)
        try:
            X = np.linalg.solve(A, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError:
            X = np.empty((B, m))
            for b in range(B):
                X[b] = np.linalg.lstsq(A[b], rhs[b], rcond=None)[0]
        for b, verts in enumerate(vlists):
            u0 = U[verts[0]]
            center = u0 + X[b]
            d2 = self._sq(U[list(verts)] - center)
            r2 = float(d2.max())
            res = float(r2 - d2.min())
            margin = 16.0 * res + _REL * (r2 + float(np.abs(self.ctx.phi[list(verts)]).max()) + 1e-300)
            self.fin.add(center, (r2, margin), verts)

    def add_infinite_cells(self, items: list[tuple[tuple[int, ...], int]]) -> None:
        if not items:
            return
        U = self.ctx.U
        m = self.m
        B = len(items)
        if m == 1:
            normals = np.ones((B, 1))
            res = np.zeros(B)
        else:
            E = np.empty((B, m - 1, m))
            for b, (facet, _w) in enumerate(items):
                E[b] = U[list(facet[1:])] - U[facet[0]]
            normals = np.linalg.svd(E)[2][:, -1, :]
            res = np.abs(np.einsum("bij,bj->bi", E, normals)).max(axis=1)
        verts_arr = np.array([facet for facet, _w in items], dtype=np.intp)
        F = U[verts_arr]  # (B, m, m)
        f0 = F[:, 0]
        off = np.einsum("bj,bj->b", normals, f0)
        scale = np.abs(F).sum(axis=2).max(axis=1)
        margin = 16.0 * res + _REL * (scale + np.abs(off) + 1e-300)
        wpts = U[[w for _f, w in items]]
        sw = np.einsum("bj,bj->b", normals, wpts) - off
        phis = self.ctx.phi[verts_arr]  # (B, m)
        # in-plane circumspheres, batched
        if m == 1:
            centers = f0.copy()
            r2 = np.zeros(B)
            smargin = _REL * (1.0 + np.abs(centers).max(axis=1))
        else:
            E0 = F[:, 1:] - f0[:, None, :]
            rows = np.empty((B, m, m))
            rows[:, : m - 1] = 2.0 * (E0 if self.G is None else E0 @ self.G)
            rows[:, m - 1] = normals
            rhs = np.empty((B, m))
            rhs[:, : m - 1] = phis[:, 1:] - phis[:, :1]
            rhs[:, m - 1] = np.einsum("bj,bj->b", normals, f0)
            try:
                centers = np.linalg.solve(rows, rhs[..., None])[..., 0]
            except np.linalg.LinAlgError:
                centers = np.empty((B, m))
                for b in range(B):
                    centers[b] = np.linalg.lstsq(rows[b], rhs[b], rcond=None)[0]
            d2 = self._sq(F - centers[:, None, :])
            r2 = d2.max(axis=1)
            smargin = 16.0 * (r2 - d2.min(axis=1)) + _REL * (r2 + np.abs(phis).max(axis=1) + 1e-300)
        data = np.hstack([normals, centers])
        aux = np.zeros((B, 4 + len(self.group_refs)))
        aux[:, 0] = off
        aux[:, 1] = margin
        aux[:, 2] = r2
        aux[:, 3] = smargin
        for b, (facet, witness) in enumerate(items):
            if abs(sw[b]) > margin[b]:
                inner_float = 1 if sw[b] > 0 else -1
                out_sign = -self.ctx.orient(facet + (witness,))
            else:
                out_sign = 0
                inner_float = 0
                for w in self._witness_candidates(witness, facet):
                    sg = self.ctx.orient(facet + (w,))
                    if sg != 0:
                        out_sign = -sg
                        swf = float(normals[b] @ U[w] - off[b])
                        inner_float = (1 if swf > 0 else -1) if abs(swf) > margin[b] else 0
                        break
                if out_sign == 0:
                    raise ArithmeticError("hull facet has no off-hyperplane witness")
            if inner_float > 0:
                data[b, :m] = -data[b, :m]
                aux[b, 0] = -aux[b, 0]
            self.inf.add(data[b], aux[b], facet, out_sign)

    def _witness_candidates(self, first: int, facet: tuple[int, ...]):
        yield first
        fs = set(facet)
        for w in self.inserted:
            if w not in fs and w != first:
                yield w

    # -- conflict search ---------------------------------------------------
    def find_conflicts(self, q: int) -> tuple[list[int], list[int]]:
        u = self.ctx.U[q]
        m = self.m
        fin_rows: list[int] = []
        n = self.fin.n
        if n:
            alive = self.fin.alive[:n]
            t = self._sq(self.fin.data[:n] - u) - self.fin.aux[:n, 0]
            thr = self.fin.aux[:n, 1] + _REL * (np.abs(t) + self.fin.aux[:n, 0]
                                                + abs(float(self.ctx.phi[q])))
            sure = alive & (t < -thr)
            unsure = alive & ~sure & (t <= thr)
            fin_rows.extend(np.nonzero(sure)[0].tolist())
            for i in np.nonzero(unsure)[0]:
                if self.ctx.in_sphere(self.fin.verts[i], q):
                    fin_rows.append(int(i))
        inf_rows: list[int] = []
        n = self.inf.n
        if n:
            alive = self.inf.alive[:n]
            normals = self.inf.data[:n, :m]
            s = normals @ u - self.inf.aux[:n, 0]
            thr = self.inf.aux[:n, 1] + _REL * (np.abs(s) + np.abs(self.inf.aux[:n, 0])
                                                + float(np.abs(u).sum()))
            sure = alive & (s > thr)
            unsure_idx = np.nonzero(alive & ~sure & (s >= -thr))[0]
            inf_rows.extend(np.nonzero(sure)[0].tolist())
            if unsure_idx.size:
                # facet-sphere float test for on-hyperplane queries, batched
                centers = self.inf.data[unsure_idx, m:]
                t2 = self._sq(centers - u) - self.inf.aux[unsure_idx, 2]
                thr2 = self.inf.aux[unsure_idx, 3] + _REL * (np.abs(t2) + self.inf.aux[unsure_idx, 2]
                                                             + abs(float(self.ctx.phi[q])))
                gid = int(self.group_of[q])
                if gid >= 0:
                    # facets already known to contain q's flat decide by the
                    # in-plane sphere alone, fully vectorized
                    contained = self.inf.aux[unsure_idx, 4 + gid] == 2.0
                    kk = np.nonzero(contained)[0]
                    sure2 = t2[kk] < -thr2[kk]
                    inf_rows.extend(unsure_idx[kk[sure2]].tolist())
                    for k in kk[~sure2 & (t2[kk] <= thr2[kk])]:
                        if self.ctx.facet_sphere(self.inf.verts[unsure_idx[k]], q):
                            inf_rows.append(int(unsure_idx[k]))
                    rest = np.nonzero(~contained)[0]
                else:
                    rest = np.arange(unsure_idx.size)
                for k in rest:
                    i = unsure_idx[k]
                    facet = self.inf.verts[i]
                    if gid >= 0 and self._facet_contains_group(int(i), gid):
                        sg = 0  # q's whole flat lies on this hyperplane
                    else:
                        sg = self.ctx.orient(facet + (q,))
                    if sg == self.inf.extra[i]:
                        inf_rows.append(int(i))
                    elif sg == 0:
                        if t2[k] < -thr2[k]:
                            inf_rows.append(int(i))
                        elif t2[k] <= thr2[k] and self.ctx.facet_sphere(facet, q):
                            inf_rows.append(int(i))
        return fin_rows, inf_rows

    # -- insertion -----------------------------------------------------------
    def insert(self, q: int) -> None:
        fin_rows, inf_rows = self.find_conflicts(q)
        if not fin_rows and not inf_rows:
            raise ArithmeticError(f"point {q} conflicts with no cell")
        counts: dict[tuple[int, ...], int] = {}
        opposite: dict[tuple[int, ...], int] = {}

        def feed(verts: tuple[int, ...]) -> None:
            for drop in verts:
                facet = tuple(v for v in verts if v != drop)
                c = counts.get(facet, 0) + 1
                counts[facet] = c
                if c == 1:
                    opposite[facet] = drop
                elif c > 2:
                    raise ArithmeticError("non-manifold conflict region")

        for i in fin_rows:
            feed(self.fin.verts[i])
        for i in inf_rows:
            feed((INF,) + self.inf.verts[i])
        for i in fin_rows:
            self.fin.kill(i)
        for i in inf_rows:
            self.inf.kill(i)
        new_finite: list[tuple[int, ...]] = []
        new_infinite: list[tuple[tuple[int, ...], int]] = []
        for facet, c in counts.items():
            if c != 1:
                continue
            if facet[0] == INF:
                finite_facet = tuple(sorted(facet[1:] + (q,)))
                new_infinite.append((finite_facet, opposite[facet]))
            else:
                new_finite.append(tuple(sorted(facet + (q,))))
        self.add_infinite_cells(new_infinite)
        self.add_finite_cells(new_finite)
        self.inserted.append(q)
        self.fin.maybe_compact()
        self.inf.maybe_compact()

    def bootstrap(self, verts: tuple[int, ...]) -> None:
        sv = tuple(sorted(verts))
        self.add_finite_cells([sv])
        self.add_infinite_cells([(tuple(v for v in sv if v != drop), drop) for drop in sv])
        self.inserted.extend(sv)

    def finite_cells(self) -> list[tuple[int, ...]]:
        return sorted(self.fin.verts[i] for i in range(self.fin.n) if self.fin.alive[i])


def _check_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise InputError("points must be a 2d array")
    if pts.shape[1] > MAX_AMBIENT_DIM:
        raise RefusalError(f"ambient dimension {pts.shape[1]} exceeds the supported maximum {MAX_AMBIENT_DIM}")
    if not np.all(np.isfinite(pts)):
        raise InputError("point coordinates must be finite")
    seen = set()
    for i in range(pts.shape[0]):
        key = pts[i].tobytes()
        if key in seen:
            raise InputError(f"duplicate point at index {i}")
        seen.add(key)
    return pts


def _independent_prefix(ctx: PredicateContext, n: int, m: int) -> list[int]:
    """Point 0 plus the greedily chosen affinely independent points."""
    first = [0]
    rows: list[tuple[list, int]] = []
    p0 = ctx.ip[0]
    for i in range(1, n):
        row = [Fraction(a - b) for a, b in zip(ctx.ip[i], p0)]
        for w, lead in rows:
            if row[lead]:
                f = row[lead] / w[lead]
                row = [x - f * y for x, y in zip(row, w)]
        lead = next((j for j, x in enumerate(row) if x), None)
        if lead is not None:
            rows.append((row, lead))
            first.append(i)
            if len(first) == m + 1:
                break
    return first


def delaunay(points, flat_groups=None) -> DelaunayComplex:
    """Delaunay triangulation of distinct points in R^k, k <= 5.

    Affinely dependent inputs yield the triangulation of their affine hull;
    fewer than 2 points yield the trivial complex.  ``flat_groups`` optionally
    lists groups of point indices known to share an affine flat (for example
    one group per color of a lifted chromatic cloud); this only speeds up the
    on-hyperplane bookkeeping and never changes the result.
    """
    pts = _check_points(points)
    n = pts.shape[0]
    if n == 0:
        return DelaunayComplex(pts, (), -1)
    if n == 1:
        return DelaunayComplex(pts, ((0,),), 0)
    m, ctx_args = affine_frame(pts)
    if m == 0:
        raise InputError("distinct points cannot have affine rank 0")
    ctx = PredicateContext(**ctx_args)
    builder = _Builder(ctx, m, flat_groups=flat_groups)
    first = _independent_prefix(ctx, n, m)
    builder.bootstrap(tuple(first))
    first_set = set(first)
    for q in range(n):
        if q not in first_set:
            builder.insert(q)
    return DelaunayComplex(pts, tuple(builder.finite_cells()), m)


def delaunay_bruteforce(points) -> DelaunayComplex:
    """Delaunay triangulation by exhaustive circumsphere checks (test oracle).

    Keeps every full-dimensional subset whose perturbed circumsphere strictly
    contains no other point; identical tie-breaking to the incremental path.
    """
    pts = _check_points(points)
    n = pts.shape[0]
    if n > BRUTE_FORCE_LIMIT:
        raise RefusalError(f"brute-force Delaunay is limited to {BRUTE_FORCE_LIMIT} points, got {n}")
    if n == 0:
        return DelaunayComplex(pts, (), -1)
    if n == 1:
        return DelaunayComplex(pts, ((0,),), 0)
    m, ctx_args = affine_frame(pts)
    ctx = PredicateContext(**ctx_args)
    maximal = []
    for cand in itertools.combinations(range(n), m + 1):
        if ctx.orient(cand) == 0:
            continue
        if any(ctx.in_sphere(cand, q) for q in range(n) if q not in cand):
            continue
        maximal.append(cand)
    return DelaunayComplex(pts, tuple(sorted(maximal)), m)
