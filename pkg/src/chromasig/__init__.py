"""Multiscale multi-species spatial signatures from labelled point clouds.

Pipeline: chromatic Delaunay-Cech filtrations of colored points, gluing maps
over k-subsets of species, kernel/image/cokernel persistence diagram packs,
and fixed-layout statistical vectorizations per species combination.
"""

from .complexes import (
    FilteredChainMap,
    FilteredComplex,
    InputError,
    LabelledPointCloud,
    RefusalError,
    Simplex,
    disjoint_union,
    mapping_cylinder,
    subcomplex_by_colors,
)
from .geometry import (
    Ball,
    cech_filtration,
    chromatic_delcech,
    lift,
    min_enclosing_ball,
)
from .delaunay import DelaunayComplex, delaunay, delaunay_bruteforce
from .reduction import (
    BoundaryMatrix,
    Pairing,
    PersistenceDiagram,
    boundary_matrix,
    diagrams,
    reduce,
)
from .sixpack import (
    SixPack,
    k_chromatic_gluing_map,
    k_chromatic_inclusion_map,
    rank_oracle,
    six_pack,
)
from .signatures import (
    AbsentCombinationError,
    DiagramStatistics,
    SignatureVector,
    assemble_feature_vector,
    diagram_statistics,
    persistent_entropy,
    signature_for_combination,
)
from .cli import RunConfig, ingest_csv

__all__ = [
    "AbsentCombinationError",
    "Ball",
    "BoundaryMatrix",
    "DelaunayComplex",
    "DiagramStatistics",
    "FilteredChainMap",
    "FilteredComplex",
    "InputError",
    "LabelledPointCloud",
    "Pairing",
    "PersistenceDiagram",
    "RefusalError",
    "RunConfig",
    "SignatureVector",
    "Simplex",
    "SixPack",
    "assemble_feature_vector",
    "boundary_matrix",
    "cech_filtration",
    "chromatic_delcech",
    "delaunay",
    "delaunay_bruteforce",
    "diagram_statistics",
    "diagrams",
    "disjoint_union",
    "ingest_csv",
    "k_chromatic_gluing_map",
    "k_chromatic_inclusion_map",
    "lift",
    "mapping_cylinder",
    "min_enclosing_ball",
    "persistent_entropy",
    "rank_oracle",
    "reduce",
    "signature_for_combination",
    "six_pack",
    "subcomplex_by_colors",
]

__version__ = "0.1.0"
