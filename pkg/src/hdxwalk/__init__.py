"""Weighted simplicial complexes, high-order random walks, and checks of their spectral bounds."""

__version__ = "0.1.0"

from .cochains import Cochain, inner_product, localize, norm, project_C0
from .complex import (
    SimplicialComplex,
    WeightFunction,
    build_from_top_faces,
    homogeneous_weight,
    link,
    simplex,
    validate,
)
from .decomposition import decompose, verify_decomposition
from .generators import complete_complex, random_pure_complex, regular_graph_matching
from .mixing import FaceSet, check_binary_mixing, check_mixing_bounds, local_thinness, second_eigenvalue_on_C0
from .operators import (
    assemble_codifferential,
    assemble_differential,
    assemble_lower_walk,
    assemble_nonlazy_upper,
    assemble_upper_walk,
    verify_factorizations,
)
from .spectra import check_descent, garland_terms, profile

__all__ = [
    "__version__",
    "Cochain",
    "inner_product",
    "localize",
    "norm",
    "project_C0",
    "SimplicialComplex",
    "WeightFunction",
    "build_from_top_faces",
    "homogeneous_weight",
    "link",
    "simplex",
    "validate",
    "decompose",
    "verify_decomposition",
    "complete_complex",
    "random_pure_complex",
    "regular_graph_matching",
    "FaceSet",
    "check_binary_mixing",
    "check_mixing_bounds",
    "local_thinness",
    "second_eigenvalue_on_C0",
    "assemble_codifferential",
    "assemble_differential",
    "assemble_lower_walk",
    "assemble_nonlazy_upper",
    "assemble_upper_walk",
    "verify_factorizations",
    "check_descent",
    "garland_terms",
    "profile",
]
