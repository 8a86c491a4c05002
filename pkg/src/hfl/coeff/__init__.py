"""Truncated U-coefficient rings, GF(2) linear algebra, homology, towers,
and spectral sequences."""

from .ring import TruncatedRing, RingElement, RingMatrix, RingError, elem_mul
from .complexes import (GradedComplex, FlatComplex, ComplexError, flatten,
                        homology_ranks, total_homology_rank, morse_reduce,
                        homology_map_rank, is_quasi_iso)
from .towers import TowerProfile, TowerError, infer_towers, ranks_stabilized
from .spectral import FilteredComplex, FilteredComplexError, spectral_sequence

__all__ = [
    "TruncatedRing", "RingElement", "RingMatrix", "RingError", "elem_mul",
    "GradedComplex", "FlatComplex", "ComplexError", "flatten",
    "homology_ranks", "total_homology_rank", "morse_reduce",
    "homology_map_rank", "is_quasi_iso",
    "TowerProfile", "TowerError", "infer_towers", "ranks_stabilized",
    "FilteredComplex", "FilteredComplexError", "spectral_sequence",
]
