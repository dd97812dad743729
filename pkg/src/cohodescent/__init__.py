"""Betti numbers of images of simplicial maps via the cohomological descent double complex."""

__version__ = "0.1.0"

from .bicomplex import DoubleComplex, Page, page, total_complex, truncate, validate_double_complex
from .complexes import CochainComplex, ComplexMorphism, cohomology_dims, direct_sum, validate_complex, validate_morphism
from .descent import (
    BettiVector,
    DescentProblem,
    betti_of_image,
    build_descent_double_complex,
    descent_inequality,
    direct_betti,
    e2_degeneration_report,
    verify_mv_exactness,
)
from .ratlinalg import QMatrix, kernel_basis, matmul, rank
from .simpsets import SComplex, SimplexTerm, SSet, VertexMap, fibered_power, nerve_of_complex

__all__ = [
    "BettiVector", "CochainComplex", "ComplexMorphism", "DescentProblem", "DoubleComplex", "Page",
    "QMatrix", "SComplex", "SSet", "SimplexTerm", "VertexMap", "betti_of_image",
    "build_descent_double_complex", "cohomology_dims", "descent_inequality", "direct_betti", "direct_sum",
    "e2_degeneration_report", "fibered_power", "kernel_basis", "matmul", "nerve_of_complex", "page", "rank",
    "total_complex", "truncate", "validate_complex", "validate_double_complex", "validate_morphism",
    "verify_mv_exactness",
]
