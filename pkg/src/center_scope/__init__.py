"""Drinfeld center sizes and induction matrices from fusion-ring data."""

__version__ = "0.1.0"

from .cyclotomic import (
    CycloNumber,
    RationalPolynomial,
    divides_as_algebraic_integer,
    galois_conjugates,
    is_algebraic_integer,
    is_d_number,
    make,
    minimal_polynomial,
    to_complex_approx,
    zeta,
)
from .fusion_data import (
    BimoduleBlock,
    DecompositionProblem,
    FusionRing,
    TwoCategoryData,
    build_gram_matrix,
    build_problem,
    global_dimension,
    validate,
)
from .solver import SolverConfig, search_all, verify_decomposition
