"""F2 linear algebra and finite-dimensional path algebras."""

from .algebra import (
    Algebra,
    Element,
    PathAlgebra,
    QuiverPresentation,
    TensorAlgebra,
    ZERO,
    associativity_failures,
    build_algebra,
    invert_name_map,
    multiply,
    reserved_algebra,
    strand_algebra_torus,
    tensor_algebra,
    torus_algebra,
    torus_iso,
    trivial_algebra,
)
from .linalg import BitMatrix, nullspace, rank, solve_linear

__all__ = [
    "Algebra", "BitMatrix", "Element", "PathAlgebra", "QuiverPresentation", "TensorAlgebra",
    "ZERO", "associativity_failures", "build_algebra", "invert_name_map", "multiply",
    "nullspace", "rank", "reserved_algebra", "solve_linear", "strand_algebra_torus",
    "tensor_algebra", "torus_algebra", "torus_iso", "trivial_algebra",
]
