"""Labelled point clouds, filtered simplicial complexes, and filtered chain maps."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


class InputError(ValueError):
    """An operation was called with arguments that violate its contract."""


class RefusalError(InputError):
    """An operation refused to run because an input exceeds a stated size limit."""


@dataclass(frozen=True)
class Simplex:
    """A single simplex: strictly increasing vertex ids plus the set of its colors."""

    vertices: tuple[int, ...]
    colors: frozenset[int]

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1


class LabelledPointCloud:
    """Finite point set in R^2 or R^3 where each point carries a species label.

    Labels index into a species universe ``0..species_count-1``; a cloud may be
    missing some species of the universe entirely (those combinations are
    zero-filled downstream).  Exact duplicates with the same label are dropped
    with a warning; duplicates with different labels are kept.
    """

    __slots__ = ("points", "labels", "species_count")

    def __init__(self, points, labels, species_count: Optional[int] = None):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise InputError(f"points must be an (n, d) array with d in {{2, 3}}, got shape {pts.shape}")
        labs = np.asarray(labels, dtype=np.intp)
        if labs.shape != (pts.shape[0],):
            raise InputError("labels must have one entry per point")
        if not np.all(np.isfinite(pts)):
            raise InputError("point coordinates must be finite")
        if pts.shape[0] and labs.min() < 0:
            raise InputError("labels must be non-negative")
        observed = int(labs.max()) + 1 if pts.shape[0] else 0
        if species_count is None:
            species_count = observed
        elif species_count < observed:
            raise InputError(f"species_count {species_count} smaller than max label {observed - 1}")

        seen: dict[tuple, int] = {}
        keep = []
        for i in range(pts.shape[0]):
            key = (labs[i].item(), *pts[i].tolist())
            if key in seen:
                warnings.warn(f"dropping duplicate point {pts[i].tolist()} with label {labs[i]}", stacklevel=3)
            else:
                seen[key] = i
                keep.append(i)
        if len(keep) != pts.shape[0]:
            pts = pts[keep]
            labs = labs[keep]
        pts.setflags(write=False)
        labs.setflags(write=False)
        self.points = pts
        self.labels = labs
        self.species_count = int(species_count)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def species_sizes(self) -> np.ndarray:
        """Number of points of each species in the universe."""
        return np.bincount(self.labels, minlength=self.species_count)

    def restrict(self, species: Sequence[int]) -> "LabelledPointCloud":
        """Sub-cloud of the given species, with labels remapped to 0..len(species)-1.

        Species are taken in sorted order; point order is preserved.
        """
        species = sorted(set(int(s) for s in species))
        for s in species:
            if not 0 <= s < self.species_count:
                raise InputError(f"unknown species {s}")
        remap = {s: i for i, s in enumerate(species)}
        mask = np.isin(self.labels, species)
        new_labels = np.array([remap[int(l)] for l in self.labels[mask]], dtype=np.intp)
        return LabelledPointCloud(self.points[mask], new_labels, species_count=len(species))


class FilteredComplex:
    """Simplicial complex with monotone filtration values and a fixed total order.

    Simplices are sorted by ``(value, dimension, vertex list)`` so faces always
    precede cofaces and the order is independent of input listing order.
    Instances are immutable after construction.
    """

    __slots__ = ("simplices", "values", "dims", "vertex_labels", "species_count",
                 "inclusion", "_index", "_by_dim")

    def __init__(self,
                 simplices: Iterable[tuple[Sequence[int], float]],
                 vertex_labels: Sequence[int],
                 species_count: Optional[int] = None,
                 inclusion: Optional["FilteredChainMap"] = None,
                 validate: bool = True):
        entries = sorted((float(v), len(s) - 1, tuple(int(x) for x in s)) for s, v in simplices)
        self.simplices: tuple[tuple[int, ...], ...] = tuple(e[2] for e in entries)
        self.values = np.array([e[0] for e in entries], dtype=np.float64)
        self.dims = np.array([e[1] for e in entries], dtype=np.intp)
        self.values.setflags(write=False)
        self.dims.setflags(write=False)
        self.vertex_labels = tuple(int(l) for l in vertex_labels)
        if species_count is None:
            species_count = max(self.vertex_labels, default=-1) + 1
        self.species_count = int(species_count)
        self.inclusion = inclusion
        self._index = {s: i for i, s in enumerate(self.simplices)}
        by_dim: dict[int, list[int]] = {}
        for i, d in enumerate(self.dims):
            by_dim.setdefault(int(d), []).append(i)
        self._by_dim = by_dim
        if validate:
            self._validate()

    def _validate(self) -> None:
        if len(self._index) != len(self.simplices):
            raise InputError("duplicate simplices")
        nv = len(self.vertex_labels)
        for i, s in enumerate(self.simplices):
            if any(s[k] >= s[k + 1] for k in range(len(s) - 1)):
                raise InputError(f"simplex {s} is not strictly increasing")
            if s[0] < 0 or s[-1] >= nv:
                raise InputError(f"simplex {s} has vertices outside 0..{nv - 1}")
            if len(s) > 1:
                v = self.values[i]
                for k in range(len(s)):
                    face = s[:k] + s[k + 1:]
                    j = self._index.get(face)
                    if j is None:
                        raise InputError(f"missing face {face} of {s}")
                    if self.values[j] > v:
                        raise InputError(f"filtration not monotone: value({face}) > value({s})")
        for v in range(nv):
            if (v,) not in self._index:
                raise InputError(f"vertex {v} not present in the complex")

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def dim(self) -> int:
        return int(self.dims.max()) if len(self.simplices) else -1

    @property
    def max_value(self) -> float:
        return float(self.values.max()) if len(self.simplices) else 0.0

    def index(self, verts: Sequence[int]) -> int:
        return self._index[tuple(verts)]

    def __contains__(self, verts) -> bool:
        return tuple(verts) in self._index

    def of_dim(self, d: int) -> list[int]:
        """Indices of all d-simplices, in the total order."""
        return self._by_dim.get(d, [])

    def colors(self, verts: Sequence[int]) -> frozenset[int]:
        return frozenset(self.vertex_labels[v] for v in verts)

    def simplex(self, i: int) -> Simplex:
        s = self.simplices[i]
        return Simplex(s, self.colors(s))

    def critical_values(self) -> np.ndarray:
        return np.unique(self.values)


class FilteredChainMap:
    """Dimension-preserving, face-commuting simplex assignment between filtered complexes.

    The assignment is induced by a vertex map, so face-commutation is automatic
    once every domain simplex maps to a codomain simplex of the same dimension.
    """

    __slots__ = ("domain", "codomain", "vertex_map", "assignment", "descriptor")

    def __init__(self, domain: FilteredComplex, codomain: FilteredComplex,
                 vertex_map: Sequence[int], validate: bool = True):
        self.domain = domain
        self.codomain = codomain
        self.descriptor = None
        self.vertex_map = tuple(int(v) for v in vertex_map)
        if len(self.vertex_map) != len(domain.vertex_labels):
            raise InputError("vertex_map must cover every domain vertex")
        assignment = np.empty(len(domain), dtype=np.intp)
        for i, s in enumerate(domain.simplices):
            img = self.map_simplex(s)
            j = codomain._index.get(img)
            if j is None:
                raise InputError(f"image {img} of domain simplex {s} is not in the codomain")
            assignment[i] = j
        assignment.setflags(write=False)
        self.assignment = assignment
        if validate:
            self._validate()

    def map_simplex(self, verts: Sequence[int]) -> tuple[int, ...]:
        img = tuple(sorted(self.vertex_map[v] for v in verts))
        if len(set(img)) != len(verts):
            raise InputError(f"map collapses simplex {tuple(verts)}; dimension not preserved")
        return img

    def _validate(self) -> None:
        nv = len(self.codomain.vertex_labels)
        for v in self.vertex_map:
            if not 0 <= v < nv:
                raise InputError(f"vertex image {v} outside codomain")
        bad = self.codomain.values[self.assignment] > self.domain.values + 0.0
        if np.any(bad):
            i = int(np.nonzero(bad)[0][0])
            raise InputError(
                f"filtration-incompatible: value(f({self.domain.simplices[i]})) "
                f"= {self.codomain.values[self.assignment[i]]} > {self.domain.values[i]}")

    def is_simplexwise_injective(self) -> bool:
        return len(set(self.assignment.tolist())) == len(self.assignment)

    def is_value_preserving(self) -> bool:
        return bool(np.all(self.codomain.values[self.assignment] == self.domain.values))


def subcomplex_by_colors(K: FilteredComplex, colors: Iterable[int]) -> FilteredComplex:
    """Induced subcomplex on the vertices whose label lies in ``colors``.

    Vertices are re-indexed (ascending by old id); the injection back into K is
    recorded on the result as ``.inclusion``.
    """
    colors = set(int(c) for c in colors)
    if not colors:
        raise InputError("color set must be nonempty")
    for c in colors:
        if not 0 <= c < K.species_count:
            raise InputError(f"unknown label {c}")
    old_verts = [v for v, l in enumerate(K.vertex_labels) if l in colors]
    new_id = {v: i for i, v in enumerate(old_verts)}
    keep = set(old_verts)
    sub_simplices = []
    for s, val in zip(K.simplices, K.values):
        if all(v in keep for v in s):
            sub_simplices.append((tuple(new_id[v] for v in s), float(val)))
    sub = FilteredComplex(sub_simplices,
                          vertex_labels=[K.vertex_labels[v] for v in old_verts],
                          species_count=K.species_count)
    inc = FilteredChainMap(sub, K, old_verts)
    sub.inclusion = inc
    return sub


def disjoint_union(parts: Sequence[FilteredComplex]) -> tuple[FilteredComplex, list[FilteredChainMap]]:
    """Disjoint union of filtered complexes with vertex sets shifted apart.

    Returns the union (re-sorted into the total order) and one injection per part.
    """
    if not parts:
        raise InputError("disjoint_union needs at least one part")
    labels: list[int] = []
    simplices: list[tuple[tuple[int, ...], float]] = []
    offsets = []
    for part in parts:
        off = len(labels)
        offsets.append(off)
        labels.extend(part.vertex_labels)
        for s, val in zip(part.simplices, part.values):
            simplices.append((tuple(v + off for v in s), float(val)))
    union = FilteredComplex(simplices, labels,
                            species_count=max(p.species_count for p in parts))
    injections = [
        FilteredChainMap(part, union, [v + off for v in range(len(part.vertex_labels))])
        for part, off in zip(parts, offsets)
    ]
    return union, injections


def mapping_cylinder(f: FilteredChainMap) -> tuple[FilteredComplex, FilteredChainMap]:
    """Mapping cylinder of a filtered chain map, with the domain embedded as a subcomplex.

    Vertex order: all domain vertices (original ids) precede all codomain
    vertices (shifted by the domain vertex count).  Each cylinder simplex takes
    the max of the values of its constituent domain/codomain faces, which keeps
    the filtration monotone.  The cylinder deformation-retracts to the codomain.
    """
    dom, cod = f.domain, f.codomain
    nd = len(dom.vertex_labels)
    cells: dict[tuple[int, ...], float] = {}

    def put(verts: tuple[int, ...], value: float) -> None:
        old = cells.get(verts)
        if old is None or value < old:
            cells[verts] = value

    for s, val in zip(cod.simplices, cod.values):
        put(tuple(v + nd for v in s), float(val))

    for s, val in zip(dom.simplices, dom.values):
        p = len(s) - 1
        val = float(val)
        # traverse the simplex in an order that makes the vertex map monotone,
        # so prism cells of adjacent simplices glue along common faces; every
        # cell generated here requires all of s, hence carries s's value (the
        # same cell generated from a smaller simplex keeps the smaller value)
        order = sorted(s, key=lambda v: (f.vertex_map[v], v))
        img = [f.vertex_map[v] for v in order]  # strictly increasing
        for i in range(p + 1):
            top = tuple(sorted(order[:i + 1]))
            put(top + tuple(v + nd for v in img[i:]), val)
            if i < p:  # gap cell between consecutive prisms
                put(top + tuple(v + nd for v in img[i + 1:]), val)
        put(s, val)  # top copy

    cyl = FilteredComplex(cells.items(),
                          vertex_labels=list(dom.vertex_labels) + list(cod.vertex_labels),
                          species_count=max(dom.species_count, cod.species_count))
    j = FilteredChainMap(dom, cyl, list(range(nd)))
    return cyl, j
