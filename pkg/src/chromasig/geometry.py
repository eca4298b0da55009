"""Geometric kernel: enclosing balls, color lifting, Cech and Delaunay-Cech filtrations."""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass

import numpy as np

from .complexes import FilteredComplex, InputError, LabelledPointCloud, RefusalError
from .delaunay import delaunay

MEB_TOL = 1e-9
CECH_ORACLE_LIMIT = 16
MAX_SPECIES = 4


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def contains(self, point, tol: float = MEB_TOL) -> bool:
        return float(np.linalg.norm(np.asarray(point) - self.center)) <= self.radius + tol * (1.0 + self.radius)


def _ball_from_support(support: list[np.ndarray]) -> Ball | None:
    """Smallest ball with all support points on its boundary, or None if degenerate."""
    if not support:
        return Ball(np.zeros(0), -1.0)
    p0 = support[0]
    if len(support) == 1:
        return Ball(p0.copy(), 0.0)
    E = np.array([p - p0 for p in support[1:]])
    A = 2.0 * (E @ E.T)
    b = (E * E).sum(axis=1)
    try:
        lam = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        return None
    center = p0 + lam @ E
    return Ball(center, float(np.linalg.norm(center - p0)))


def _robust_support_ball(support: list[np.ndarray]) -> Ball:
    """Smallest ball enclosing a (nearly) degenerate support set, by subset scan."""
    best = None
    for r in range(1, len(support) + 1):
        for sub in itertools.combinations(range(len(support)), r):
            b = _ball_from_support([support[i] for i in sub])
            if b is None:
                continue
            if all(b.contains(p) for p in support):
                if best is None or b.radius < best.radius:
                    best = b
    return best if best is not None else Ball(support[-1].copy(), 0.0)


def _welzl(pts: list[np.ndarray], support: list[np.ndarray], k: int) -> Ball:
    if not pts or len(support) == k + 1:
        ball = _ball_from_support(support)
        if ball is None:
            ball = _robust_support_ball(support)
        return ball
    p = pts[-1]
    ball = _welzl(pts[:-1], support, k)
    if ball.radius >= 0 and (ball.center.size and ball.contains(p)):
        return ball
    return _welzl(pts[:-1], support + [p], k)


def min_enclosing_ball(points) -> Ball:
    """Smallest enclosing ball by Welzl's move-to-front recursion.

    Deterministic: points are visited in a fixed seeded shuffle of input order.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[0] == 0:
        raise InputError("min_enclosing_ball needs at least one point")
    k = pts.shape[1]
    if k > 8:
        raise InputError(f"dimension {k} exceeds the supported maximum 8")
    rows = [pts[i] for i in range(pts.shape[0])]
    if len(rows) > 3:
        rng = np.random.default_rng(0x5EED)
        order = rng.permutation(len(rows))
        rows = [rows[i] for i in order]
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(rows) + 100))
    try:
        ball = _welzl(rows, [], k)
    finally:
        sys.setrecursionlimit(old)
    return ball


def edge_values(points: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Half the endpoint distance for each edge (MEB radius of two points)."""
    d = points[edges[:, 0]] - points[edges[:, 1]]
    return 0.5 * np.sqrt((d * d).sum(axis=1))


def triangle_values(points: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """MEB radius of each point triple: half the longest edge if that ball
    already covers the third point, else the circumradius."""
    a = points[tris[:, 0]]
    b = points[tris[:, 1]]
    c = points[tris[:, 2]]
    ab = ((a - b) ** 2).sum(1)
    bc = ((b - c) ** 2).sum(1)
    ca = ((c - a) ** 2).sum(1)
    # rotate so that (p, q) is the longest edge and w the remaining point
    lengths = np.stack([ab, bc, ca], axis=1)
    imax = lengths.argmax(axis=1)
    p = np.where((imax == 0)[:, None], a, np.where((imax == 1)[:, None], b, c))
    q = np.where((imax == 0)[:, None], b, np.where((imax == 1)[:, None], c, a))
    w = np.where((imax == 0)[:, None], c, np.where((imax == 1)[:, None], a, b))
    mid = 0.5 * (p + q)
    r_half = 0.5 * np.sqrt(lengths.max(axis=1))
    covered = ((w - mid) ** 2).sum(1) <= (r_half * (1 + MEB_TOL)) ** 2 + MEB_TOL
    # circumcenter via the 2x2 Gram system in the triangle plane
    u = q - p
    v = w - p
    uu = (u * u).sum(1)
    vv = (v * v).sum(1)
    uv = (u * v).sum(1)
    det = uu * vv - uv * uv
    det = np.where(det == 0, 1.0, det)  # degenerate: covered branch applies
    alpha = 0.5 * (uu * vv - vv * uv) / det
    beta = 0.5 * (uu * vv - uu * uv) / det
    center = p + alpha[:, None] * u + beta[:, None] * v
    r_circ = np.sqrt(((center - p) ** 2).sum(1))
    return np.where(covered, r_half, r_circ)


def simplex_filtration_values(points: np.ndarray, simplices: list[tuple[int, ...]]) -> np.ndarray:
    """MEB radius of the vertex set of each simplex (vectorized for dim <= 2).

    Values are nudged up to the max over facets where float noise between the
    closed forms and the Welzl path would otherwise break monotonicity.
    """
    values = np.zeros(len(simplices))
    by_size: dict[int, list[int]] = {}
    for i, s in enumerate(simplices):
        by_size.setdefault(len(s), []).append(i)
    for size, idxs in sorted(by_size.items()):
        if size == 1:
            continue
        arr = np.array([simplices[i] for i in idxs])
        if size == 2:
            values[idxs] = edge_values(points, arr)
        elif size == 3:
            values[idxs] = triangle_values(points, arr)
        else:
            for i in idxs:
                values[i] = min_enclosing_ball(points[list(simplices[i])]).radius
    # A simplex's MEB is realized on a support subset that lies inside some
    # facet, so its true value equals the facet max whenever they are within
    # float noise of each other; snapping to the facet max (bitwise) makes
    # mathematically-equal values identical and keeps the filtration monotone.
    value_of = {}
    for size, idxs in sorted(by_size.items()):
        for i in idxs:
            s = simplices[i]
            if size > 1:
                floor = max(value_of[s[:k] + s[k + 1:]] for k in range(size))
                if values[i] < floor * (1.0 + 1e-12) + 1e-15:
                    values[i] = floor
            value_of[s] = values[i]
    return values


def lift(cloud: LabelledPointCloud, scale: float = 1.0) -> np.ndarray:
    """One-hot color lift: color 0 maps to the zero offset, color i to scale*e_i.

    Output dimension is d + (species_count - 1).
    """
    if scale <= 0:
        raise InputError("lift scale must be positive")
    s = cloud.species_count - 1
    extra = np.zeros((len(cloud), max(s, 0)))
    for i, lab in enumerate(cloud.labels):
        if lab > 0:
            extra[i, lab - 1] = scale
    return np.hstack([cloud.points, extra])


def cech_filtration(cloud: LabelledPointCloud, max_dim: int,
                    oracle_limit: int = CECH_ORACLE_LIMIT) -> FilteredComplex:
    """Full Cech filtration by brute-force subset enumeration (test oracle).

    Exponential in the number of points; refuses inputs above ``oracle_limit``.
    """
    n = len(cloud)
    if n > oracle_limit:
        raise RefusalError(f"cech_filtration is a brute-force oracle limited to {oracle_limit} points, got {n}")
    if max_dim < 0:
        raise InputError("max_dim must be >= 0")
    simplices: list[tuple[int, ...]] = []
    for size in range(1, max_dim + 2):
        simplices.extend(itertools.combinations(range(n), size))
    values = simplex_filtration_values(cloud.points, simplices)
    return FilteredComplex(zip(simplices, values), cloud.labels,
                           species_count=cloud.species_count)


def chromatic_delcech(cloud: LabelledPointCloud, max_dim: int,
                      lift_scale: float = 1.0) -> FilteredComplex:
    """Chromatic Delaunay-Cech filtration.

    The complex is the Delaunay triangulation of the one-hot lifted points,
    truncated to dimension <= max_dim; each simplex is valued at the MEB
    radius of its original (unlifted) vertex coordinates.  Persistence
    diagrams agree with the Cech filtration of the same cloud.
    """
    if cloud.species_count > MAX_SPECIES:
        raise RefusalError(f"species_count {cloud.species_count} exceeds the lift cap {MAX_SPECIES}")
    if len(cloud) == 0:
        raise InputError("cloud must contain at least one point")
    lifted = lift(cloud, lift_scale)
    if lifted.shape[1] > 5:
        raise RefusalError(f"lift dimension {lifted.shape[1]} exceeds the Delaunay cap 5")
    groups = [np.nonzero(cloud.labels == c)[0].tolist()
              for c in range(cloud.species_count)]
    dc = delaunay(lifted, flat_groups=[g for g in groups if len(g) >= 2])
    simplices = dc.all_simplices(max_dim)
    values = simplex_filtration_values(cloud.points, simplices)
    return FilteredComplex(zip(simplices, values), cloud.labels,
                           species_count=cloud.species_count)
