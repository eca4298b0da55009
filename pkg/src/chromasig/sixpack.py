"""Kernel, image, and cokernel persistence of filtered chain maps.

The k-chromatic gluing map sends the disjoint union of the subcomplexes
spanned by every k-subset of species into the full chromatic complex; the
k-chromatic inclusion map includes the subcomplex of simplices with at most k
distinct colors.  Kernel/image/cokernel diagrams are computed by a reduction
ensemble over a subcomplex pair (L inside K): for non-injective maps the pair
is obtained from the mapping cylinder, which deformation-retracts to the
codomain, so the diagrams are those of the original map.

Reduction ensemble, all over Z/2 with columns in the total order of K:
  * R_g:  boundary columns of L alone (cycle chains V_g kept for positives);
  * R_im: boundary columns of K with rows reordered L-first (V_im kept);
    a negative column with its low row in L kills an image class, and if the
    column simplex is not in L it also gives birth in the kernel;
  * R_ker: the cycles V_im of positive columns, rows L-first; a column of an
    L-simplex that is negative in R_g pairs kernel births with their deaths;
  * R_cok: boundary columns of K where each column of an L-positive simplex
    is replaced by its L-cycle V_g; positive columns of R_f that stay positive
    here give birth in the cokernel, lows of negative columns pair the deaths.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import gf2
from .complexes import (
    FilteredChainMap,
    FilteredComplex,
    InputError,
    LabelledPointCloud,
    RefusalError,
    disjoint_union,
    mapping_cylinder,
    subcomplex_by_colors,
)
from .geometry import chromatic_delcech
from .reduction import PersistenceDiagram, diagrams

RANK_ORACLE_LIMIT = 2000


@dataclass(frozen=True)
class SixPack:
    """Kernel/cokernel/image/domain/codomain diagrams of one filtered chain map.

    Diagram lists are indexed by homology degree 0..max_degree.  At every scale
    t, alive(domain) = alive(kernel) + alive(image) and alive(codomain) =
    alive(image) + alive(cokernel).
    """

    kernel: tuple[PersistenceDiagram, ...]
    cokernel: tuple[PersistenceDiagram, ...]
    image: tuple[PersistenceDiagram, ...]
    domain: tuple[PersistenceDiagram, ...]
    codomain: tuple[PersistenceDiagram, ...]
    map_descriptor: tuple

    @property
    def max_degree(self) -> int:
        return len(self.kernel) - 1

    def sample_scales(self) -> list[float]:
        """All finite critical values plus midpoints between consecutive ones."""
        vals = set()
        for group in (self.kernel, self.cokernel, self.image, self.domain, self.codomain):
            for dgm in group:
                vals.update(dgm.finite_values())
        crit = sorted(vals)
        out = list(crit)
        for a, b in zip(crit, crit[1:]):
            out.append(0.5 * (a + b))
        return sorted(out) if out else [0.0]

    def check_additivity(self, scales=None) -> None:
        if scales is None:
            scales = self.sample_scales()
        for d in range(self.max_degree + 1):
            for t in scales:
                lhs = self.domain[d].alive(t)
                rhs = self.kernel[d].alive(t) + self.image[d].alive(t)
                if lhs != rhs:
                    raise AssertionError(
                        f"additivity failed at degree {d}, t={t}: domain {lhs} != ker+im {rhs}")
                lhs = self.codomain[d].alive(t)
                rhs = self.image[d].alive(t) + self.cokernel[d].alive(t)
                if lhs != rhs:
                    raise AssertionError(
                        f"additivity failed at degree {d}, t={t}: codomain {lhs} != im+cok {rhs}")


def k_chromatic_gluing_map(cloud: LabelledPointCloud, k: int, max_dim: int,
                           lift_scale: float = 1.0) -> FilteredChainMap:
    """Gluing map from the disjoint union over all k-subsets of species into
    the chromatic Delaunay-Cech complex of the whole cloud."""
    s1 = cloud.species_count
    if not 1 <= k <= s1:
        raise InputError(f"k must be between 1 and species_count={s1}, got {k}")
    codomain = chromatic_delcech(cloud, max_dim, lift_scale)
    subsets = list(itertools.combinations(range(s1), k))
    parts = [subcomplex_by_colors(codomain, I) for I in subsets]
    domain, _ = disjoint_union(parts)
    vertex_map: list[int] = []
    for part in parts:
        vertex_map.extend(part.inclusion.vertex_map)
    f = FilteredChainMap(domain, codomain, vertex_map)
    f.descriptor = ("gluing", k, tuple(subsets))
    return f


def k_chromatic_inclusion_map(cloud: LabelledPointCloud, k: int, max_dim: int,
                              lift_scale: float = 1.0) -> FilteredChainMap:
    """Inclusion of the subcomplex of simplices with at most k distinct colors."""
    s1 = cloud.species_count
    if not 1 <= k <= s1:
        raise InputError(f"k must be between 1 and species_count={s1}, got {k}")
    codomain = chromatic_delcech(cloud, max_dim, lift_scale)
    kept = [(s, float(v)) for s, v in zip(codomain.simplices, codomain.values)
            if len(codomain.colors(s)) <= k]
    domain = FilteredComplex(kept, codomain.vertex_labels, species_count=s1)
    f = FilteredChainMap(domain, codomain, list(range(len(codomain.vertex_labels))))
    f.descriptor = ("inclusion", k, ())
    return f


def _ensemble(K: FilteredComplex, in_l: np.ndarray, max_degree: int):
    """Kernel/image/cokernel diagram points for a subcomplex pair L <= K."""
    Q = max_degree + 1
    values = K.values
    simps = K.simplices
    index = K._index
    by_dim = {q: K.of_dim(q) for q in range(0, Q + 2)}

    n = len(simps)
    faces_of: list[tuple[int, ...]] = [()] * n
    for g in range(n):
        s = simps[g]
        if len(s) > 1 and len(s) - 1 <= Q + 1:
            faces_of[g] = tuple(index[s[:i] + s[i + 1:]] for i in range(len(s)))

    loc: dict[int, int] = {}
    im_pos: dict[int, int] = {}
    lpos: dict[int, int] = {}
    row_of_impos: dict[int, list[int]] = {}
    max_count = 0
    for q in range(0, Q + 1):
        ids = by_dim.get(q, [])
        max_count = max(max_count, len(ids))
        rows = []
        for i, g in enumerate(ids):
            loc[g] = i
            if in_l[g]:
                lpos[g] = len(rows)
                im_pos[g] = len(rows)
                rows.append(g)
        for g in ids:
            if not in_l[g]:
                im_pos[g] = len(rows)
                rows.append(g)
        row_of_impos[q] = rows
    bit = [1 << i for i in range(max_count + 1)]

    g_positive: dict[int, bool] = {}
    v_g: dict[int, int] = {}        # L-cycle chains, bits in loc universe
    im_positive: dict[int, bool] = {}
    v_im: dict[int, int] = {}       # K-cycle chains, bits in im_pos universe

    for g in by_dim.get(0, []):
        im_positive[g] = True
        v_im[g] = 1 << im_pos[g]
        if in_l[g]:
            g_positive[g] = True
            v_g[g] = 1 << loc[g]

    ker_pts = {d: [] for d in range(max_degree + 1)}
    im_pts = {d: [] for d in range(max_degree + 1)}
    cok_pts = {d: [] for d in range(max_degree + 1)}
    ker_sup = {d: 0 for d in range(max_degree + 1)}
    im_sup = {d: 0 for d in range(max_degree + 1)}
    cok_sup = {d: 0 for d in range(max_degree + 1)}

    image_unpaired: dict[int, float] = {}    # L-positive creator -> birth value
    kernel_unpaired: dict[int, float] = {}

    def emit(store, sup, d, b, dth):
        if d > max_degree:
            return
        if b < dth:
            store[d].append((b, dth))
        else:
            sup[d] += 1

    for q in range(1, Q + 1):
        ids = by_dim.get(q, [])
        rows_prev = row_of_impos[q - 1]
        # image births of dimension q-1 must be on record before R_im can pair
        # their deaths in this dimension
        if q - 1 <= max_degree:
            for g in by_dim.get(q - 1, []):
                if in_l[g] and g_positive.get(g, False):
                    image_unpaired.setdefault(g, float(values[g]))
        # --- R_g over L columns ---
        low_g: dict[int, tuple[int, int]] = {}
        for g in ids:
            if not in_l[g]:
                continue
            mask = 0
            for fg in faces_of[g]:
                mask |= bit[lpos[fg]]
            v = bit[loc[g]]
            while mask:
                low = mask.bit_length() - 1
                got = low_g.get(low)
                if got is None:
                    break
                mask ^= got[0]
                v ^= got[1]
            if mask:
                g_positive[g] = False
                low_g[mask.bit_length() - 1] = (mask, v)
            else:
                g_positive[g] = True
                v_g[g] = v

        # --- R_im over all columns, rows L-first ---
        low_im: dict[int, tuple[int, int]] = {}
        for g in ids:
            mask = 0
            for fg in faces_of[g]:
                mask |= bit[im_pos[fg]]
            v = bit[im_pos[g]]
            while mask:
                low = mask.bit_length() - 1
                got = low_im.get(low)
                if got is None:
                    break
                mask ^= got[0]
                v ^= got[1]
            if mask:
                im_positive[g] = False
                low = mask.bit_length() - 1
                low_im[low] = (mask, v)
                i = rows_prev[low]
                if in_l[i]:
                    # the killed cycle lives in L: an image class dies here
                    b = image_unpaired.pop(i, None)
                    if b is None and q - 1 <= max_degree:
                        raise RuntimeError("image death for a row that is not an image birth")
                    if b is not None:
                        emit(im_pts, im_sup, q - 1, b, float(values[g]))
                    if not in_l[g]:
                        kernel_unpaired[g] = float(values[g])
            else:
                im_positive[g] = True
                v_im[g] = v

        # --- R_ker: cycles of positive columns, rows L-first ---
        low_ker: dict[int, int] = {}
        for g in ids:
            if not im_positive[g]:
                continue
            mask = v_im[g]
            while mask:
                low = mask.bit_length() - 1
                got = low_ker.get(low)
                if got is None:
                    break
                mask ^= got
            if mask:
                low = mask.bit_length() - 1
                low_ker[low] = mask
                i = row_of_impos[q][low]
                if i in kernel_unpaired and in_l[g] and not g_positive[g]:
                    emit(ker_pts, ker_sup, q - 1, kernel_unpaired.pop(i), float(values[g]))

    # --- R_cok per entry dimension ---
    for e in range(0, max_degree + 1):
        cols: list[tuple[int, int]] = []  # (global id, kind 0=replaced cycle, 1=boundary)
        for g in by_dim.get(e, []):
            if in_l[g] and g_positive[g]:
                cols.append((g, 0))
        for g in by_dim.get(e + 1, []):
            cols.append((g, 1))
        cols.sort()
        cok_birth_at: dict[int, float] = {}
        for g in by_dim.get(e, []):
            if im_positive[g] and not (in_l[g] and g_positive[g]):
                cok_birth_at[g] = float(values[g])
        ids_e = by_dim.get(e, [])
        low_cok: dict[int, int] = {}
        for g, kind in cols:
            if kind == 0:
                mask = v_g[g]
            else:
                mask = 0
                for fg in faces_of[g]:
                    mask |= bit[loc[fg]]
            while mask:
                low = mask.bit_length() - 1
                got = low_cok.get(low)
                if got is None:
                    break
                mask ^= got
            if mask:
                low = mask.bit_length() - 1
                low_cok[low] = mask
                i = ids_e[low]
                b = cok_birth_at.pop(i, None)
                if b is not None:
                    emit(cok_pts, cok_sup, e, b, float(values[g]))
        for i, b in cok_birth_at.items():
            cok_pts[e].append((b, math.inf))

    for i, b in kernel_unpaired.items():
        d = len(simps[i]) - 2
        if d <= max_degree:
            ker_pts[d].append((b, math.inf))
    for i, b in image_unpaired.items():
        d = len(simps[i]) - 1
        if d <= max_degree:
            im_pts[d].append((b, math.inf))

    def pack(store, sup):
        return tuple(
            PersistenceDiagram(d, tuple(sorted(store[d])), sup[d], truncated=(d + 1 > K.dim))
            for d in range(max_degree + 1))

    return pack(ker_pts, ker_sup), pack(im_pts, im_sup), pack(cok_pts, cok_sup)


def six_pack(f: FilteredChainMap, max_degree: int = 1) -> SixPack:
    """Kernel/cokernel/image/domain/codomain persistence diagrams of a map.

    Non-injective maps are converted to an inclusion via the mapping cylinder
    (invisible to the caller; the diagrams are those of the original map).
    """
    if max_degree < 0:
        raise InputError("max_degree must be >= 0")
    dom_dgms = tuple(diagrams(f.domain, max_degree))
    cod_dgms = tuple(diagrams(f.codomain, max_degree))
    if f.is_simplexwise_injective() and f.is_value_preserving():
        K = f.codomain
        in_l = np.zeros(len(K), dtype=bool)
        in_l[f.assignment] = True
    else:
        K, j = mapping_cylinder(f)
        in_l = np.zeros(len(K), dtype=bool)
        in_l[j.assignment] = True
    ker, im, cok = _ensemble(K, in_l, max_degree)
    descriptor = getattr(f, "descriptor", ("map", 0, ()))
    return SixPack(kernel=ker, cokernel=cok, image=im,
                   domain=dom_dgms, codomain=cod_dgms, map_descriptor=descriptor)


# ---------------------------------------------------------------------------
# dense rank oracle


def _alive(K: FilteredComplex, t: float, d: int) -> list[int]:
    return [g for g in K.of_dim(d) if K.values[g] <= t]


def _chain_boundary(K: FilteredComplex, t: float, d: int, universe: dict[int, int], n_universe: int):
    """Rows of boundaries of alive (d+1)-simplices, over the full d-universe."""
    rows = []
    for g in _alive(K, t, d + 1):
        s = K.simplices[g]
        vec = np.zeros(n_universe, dtype=np.uint8)
        for i in range(len(s)):
            vec[universe[K.index(s[:i] + s[i + 1:])]] ^= 1
        rows.append(vec)
    return gf2.stack([np.array(rows)] if rows else [], n_universe)


def _cycles(K: FilteredComplex, t: float, d: int, universe: dict[int, int], n_universe: int):
    """Rows spanning the d-cycles of the sublevel complex at t, full universe."""
    alive = _alive(K, t, d)
    if not alive:
        return np.zeros((0, n_universe), dtype=np.uint8)
    if d == 0:
        rows = np.zeros((len(alive), n_universe), dtype=np.uint8)
        for i, g in enumerate(alive):
            rows[i, universe[g]] = 1
        return rows
    col_of = {g: i for i, g in enumerate(alive)}
    faces = sorted({K.index(K.simplices[g][:i] + K.simplices[g][i + 1:])
                    for g in alive for i in range(len(K.simplices[g]))})
    face_of = {g: i for i, g in enumerate(faces)}
    D = np.zeros((len(faces), len(alive)), dtype=np.uint8)
    for g in alive:
        s = K.simplices[g]
        for i in range(len(s)):
            D[face_of[K.index(s[:i] + s[i + 1:])], col_of[g]] ^= 1
    null = gf2.nullspace(D)  # rows over alive columns
    rows = np.zeros((null.shape[0], n_universe), dtype=np.uint8)
    for i, g in enumerate(alive):
        rows[:, universe[g]] = null[:, i]
    return rows


def rank_oracle(f: FilteredChainMap, s: float, t: float, degree: int) -> tuple[int, int, int]:
    """Dense Z/2 oracle: ranks of the kernel/image/cokernel persistence maps
    from scale s to scale t (s <= t) in the given degree.

    Independent of the reduction pipeline: computes homology by Gaussian
    elimination on the chain level and composes the induced maps directly.
    """
    if s > t:
        raise InputError("rank_oracle requires s <= t")
    dom, cod = f.domain, f.codomain
    if len(dom) > RANK_ORACLE_LIMIT or len(cod) > RANK_ORACLE_LIMIT:
        raise RefusalError(
            f"rank_oracle is limited to {RANK_ORACLE_LIMIT} simplices per complex "
            f"(got {len(dom)} and {len(cod)})")
    d_univ = {g: i for i, g in enumerate(dom.of_dim(degree))}
    c_univ = {g: i for i, g in enumerate(cod.of_dim(degree))}
    nD, nC = len(d_univ), len(c_univ)
    phi = np.zeros((nD, nC), dtype=np.uint8)
    for g, i in d_univ.items():
        phi[i, c_univ[int(f.assignment[g])]] = 1

    z_d_s = _cycles(dom, s, degree, d_univ, nD)
    z_d_t = _cycles(dom, t, degree, d_univ, nD)
    z_c_s = _cycles(cod, s, degree, c_univ, nC)
    b_d_t = _chain_boundary(dom, t, degree, d_univ, nD)
    b_c_s = _chain_boundary(cod, s, degree, c_univ, nC)
    b_c_t = _chain_boundary(cod, t, degree, c_univ, nC)

    # V_s: cycles of the domain at s whose image already bounds in the codomain at s
    w_s = (z_d_s @ phi) % 2
    r_b, piv = gf2.rref(b_c_s)
    w_red = w_s.copy()
    for r, c in enumerate(piv):
        hit = w_red[:, c].astype(bool)
        if hit.any():
            w_red[hit] ^= r_b[r]
    # coefficient vectors c with c * w_red = 0, i.e. w_red^T c^T = 0
    cnull = gf2.nullspace(w_red.T)
    v_s = (cnull @ z_d_s) % 2 if cnull.shape[0] else np.zeros((0, nD), dtype=np.uint8)

    def quot_rank(X, Y):
        return gf2.rank(gf2.stack([X, Y], X.shape[1])) - gf2.rank(Y)

    ker_rank = quot_rank(v_s, b_d_t)
    im_rank = quot_rank((z_d_s @ phi) % 2, b_c_t)
    w_t = gf2.stack([(z_d_t @ phi) % 2, b_c_t], nC)
    cok_rank = quot_rank(z_c_s, w_t)
    return ker_rank, im_rank, cok_rank
