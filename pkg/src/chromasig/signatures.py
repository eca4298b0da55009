"""Persistent-statistics vectorization and assembly of signature vectors.

Every diagram is summarized by eight statistics (mean, std, median, range,
10th/25th/75th/90th percentiles) of up to four derived quantities (birth,
death, lifespan, midlife) plus the feature count and the persistent entropy.
Degree-0 domain and image diagrams drop the birth/lifespan/midlife blocks
since components are born at zero, leaving death statistics only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import InputError, LabelledPointCloud
from .geometry import chromatic_delcech
from .reduction import PersistenceDiagram, diagrams
from .sixpack import k_chromatic_gluing_map, six_pack

STAT_NAMES = ("mean", "std", "median", "range", "p10", "p25", "p75", "p90")
QUANTITIES = ("birth", "death", "lifespan", "midlife")
FULL_LEN = 34    # 8 stats x 4 quantities + count + entropy
REDUCED_LEN = 10  # 8 stats of death + count + entropy

# block layouts: (diagram name, degree, layout)
SINGLE_BLOCKS = (("domain", 0, "reduced"), ("domain", 1, "full"))
PACK_BLOCKS = (("kernel", 0, "full"), ("kernel", 1, "full"),
               ("image", 0, "reduced"), ("image", 1, "full"),
               ("cokernel", 1, "full"))
SINGLE_LEN = REDUCED_LEN + FULL_LEN            # 44
PACK_LEN = REDUCED_LEN + 4 * FULL_LEN          # 146


class AbsentCombinationError(InputError):
    """A species combination is missing or undersized in this cloud."""


@dataclass(frozen=True)
class DiagramStatistics:
    layout: tuple[str, ...]
    values: np.ndarray


@dataclass(frozen=True)
class SignatureVector:
    combination: tuple[int, ...]
    values: np.ndarray
    block_index: tuple[tuple[str, int, int], ...]   # (block name, start, stop)
    entry_names: tuple[tuple[str, str], ...]        # (diagram name, statistic)


def _capped(D: PersistenceDiagram, cap: float) -> np.ndarray:
    # sorted so statistics are bitwise invariant to the point listing order
    pts = np.array(sorted(D.points), dtype=np.float64).reshape(-1, 2)
    if len(pts):
        pts[np.isinf(pts[:, 1]), 1] = cap
    return pts


def persistent_entropy(D: PersistenceDiagram, cap: float) -> float:
    """Shannon entropy (natural log) of the normalized capped lifetimes."""
    if cap <= 0:
        raise InputError("cap must be positive")
    pts = np.array(sorted(D.points), dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return 0.0
    life = np.minimum(pts[:, 1], cap) - pts[:, 0]
    life = life[life > 0]
    total = life.sum()
    if total <= 0 or len(life) <= 1:
        return 0.0
    p = life / total
    return float(-(p * np.log(p)).sum())


def _stats8(x: np.ndarray) -> list[float]:
    return [float(x.mean()), float(x.std()), float(np.median(x)),
            float(x.max() - x.min()),
            float(np.percentile(x, 10)), float(np.percentile(x, 25)),
            float(np.percentile(x, 75)), float(np.percentile(x, 90))]


def statistics_layout(layout: str) -> tuple[str, ...]:
    quantities = QUANTITIES if layout == "full" else ("death",)
    names = [f"{q}_{s}" for q in quantities for s in STAT_NAMES]
    return tuple(names + ["count", "entropy"])


def diagram_statistics(D: PersistenceDiagram, layout: str, cap: float) -> DiagramStatistics:
    """Fixed-layout statistics of one diagram; infinite deaths replaced by cap.

    The empty diagram maps to the all-zero vector.
    """
    if layout not in ("full", "reduced"):
        raise InputError(f"unknown layout {layout!r}")
    if cap <= 0:
        raise InputError("cap must be positive")
    names = statistics_layout(layout)
    pts = _capped(D, cap)
    if len(pts) == 0:
        return DiagramStatistics(names, np.zeros(len(names)))
    births = pts[:, 0]
    deaths = pts[:, 1]
    out: list[float] = []
    if layout == "full":
        quantities = [births, deaths, deaths - births, 0.5 * (births + deaths)]
    else:
        quantities = [deaths]
    for q in quantities:
        out.extend(_stats8(q))
    out.append(float(len(pts)))
    out.append(persistent_entropy(D, cap))
    return DiagramStatistics(names, np.array(out))


def _pack_blocks(cloud: LabelledPointCloud, max_dim: int, cap_factor: float,
                 lift_scale: float):
    """Diagrams for one combination: (blocks, named diagrams dict, cap)."""
    if cloud.species_count == 1:
        cx = chromatic_delcech(cloud, max_dim, lift_scale)
        dgms = diagrams(cx, max_dim - 1)
        named = {("domain", d): dgms[d] for d in range(len(dgms))}
        cap = cap_factor * max(cx.max_value, 1e-12)
        return SINGLE_BLOCKS, named, cap
    f = k_chromatic_gluing_map(cloud, cloud.species_count - 1, max_dim, lift_scale)
    pack = six_pack(f, max_degree=max_dim - 1)
    named = {}
    for name in ("kernel", "image", "cokernel", "domain", "codomain"):
        for d, dgm in enumerate(getattr(pack, name)):
            named[(name, d)] = dgm
    cap = cap_factor * max(f.codomain.max_value, 1e-12)
    return PACK_BLOCKS, named, cap


def signature_for_combination(cloud: LabelledPointCloud, combo, max_dim: int = 2,
                              cap_factor: float = 1.25, lift_scale: float = 1.0,
                              min_species_size: int = 3) -> SignatureVector:
    """Signature vector of one species combination of size 1..3.

    Singles use the domain diagrams of the species alone; pairs (triples) use
    the six-pack of the 1-chromatic (2-chromatic) gluing map on the restricted
    cloud.  Raises AbsentCombinationError when a species is missing or has
    fewer than min_species_size points (the caller zero-fills).
    """
    combo = tuple(sorted(int(c) for c in combo))
    if not 1 <= len(combo) <= 3:
        raise InputError("combination size must be 1..3")
    if combo[0] < 0:
        raise InputError(f"unknown species {combo[0]}")
    sizes = cloud.species_sizes()
    for c in combo:
        if c >= cloud.species_count or sizes[c] < min_species_size:
            have = sizes[c] if c < cloud.species_count else 0
            raise AbsentCombinationError(
                f"species {c} has {have} < {min_species_size} points")
    sub = cloud.restrict(combo)
    blocks, named, cap = _pack_blocks(sub, max_dim, cap_factor, lift_scale)
    values: list[float] = []
    block_index: list[tuple[str, int, int]] = []
    entry_names: list[tuple[str, str]] = []
    for name, deg, layout in blocks:
        stats = diagram_statistics(named[(name, deg)], layout, cap)
        start = len(values)
        values.extend(stats.values.tolist())
        block_index.append((f"{name}_deg{deg}", start, len(values)))
        entry_names.extend((f"{name}_deg{deg}", s) for s in stats.layout)
    return SignatureVector(combo, np.array(values), tuple(block_index), tuple(entry_names))


def combination_length(size: int) -> int:
    return SINGLE_LEN if size == 1 else PACK_LEN


def enumerate_combinations(universe, max_combo: int) -> list[tuple[int, ...]]:
    """Singles, then pairs, then triples, each sorted lexicographically."""
    import itertools

    uni = sorted(int(u) for u in universe)
    out: list[tuple[int, ...]] = []
    for size in range(1, max_combo + 1):
        out.extend(itertools.combinations(uni, size))
    return out


def zero_signature(combo) -> SignatureVector:
    combo = tuple(sorted(int(c) for c in combo))
    blocks = SINGLE_BLOCKS if len(combo) == 1 else PACK_BLOCKS
    values: list[float] = []
    block_index: list[tuple[str, int, int]] = []
    entry_names: list[tuple[str, str]] = []
    for name, deg, layout in blocks:
        names = statistics_layout(layout)
        start = len(values)
        values.extend([0.0] * len(names))
        block_index.append((f"{name}_deg{deg}", start, len(values)))
        entry_names.extend((f"{name}_deg{deg}", s) for s in names)
    return SignatureVector(combo, np.array(values), tuple(block_index), tuple(entry_names))


def assemble_feature_vector(cloud: LabelledPointCloud, species_universe, max_combo: int,
                            max_dim: int = 2, cap_factor: float = 1.25,
                            lift_scale: float = 1.0, min_species_size: int = 3):
    """Concatenated signature over all combinations of the species universe.

    Absent or undersized combinations contribute zero blocks, so the vector
    length depends only on the universe size and max_combo.  Returns the
    vector and a manifest of (combination, diagram, statistic) per entry.
    """
    if max_combo not in (1, 2, 3):
        raise InputError("max_combo must be 1, 2, or 3")
    combos = enumerate_combinations(species_universe, max_combo)
    parts: list[np.ndarray] = []
    manifest: list[tuple[tuple[int, ...], str, str]] = []
    for combo in combos:
        try:
            sig = signature_for_combination(cloud, combo, max_dim=max_dim,
                                            cap_factor=cap_factor, lift_scale=lift_scale,
                                            min_species_size=min_species_size)
        except AbsentCombinationError:
            sig = zero_signature(combo)
        parts.append(sig.values)
        manifest.extend((combo, dname, stat) for dname, stat in sig.entry_names)
    vector = np.concatenate(parts) if parts else np.zeros(0)
    return vector, manifest
