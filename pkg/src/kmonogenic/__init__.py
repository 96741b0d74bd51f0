"""Exact arithmetic for the k-monogenic differential complex on R^6.

The fiber algebra lives in :mod:`tensor_core`, scalar polynomials and the
Gaussian pairing in :mod:`poly_field`, the operators D_l and their adjoints in
:mod:`complex_ops`, symbols in :mod:`symbol`, and polynomial solving in
:mod:`resolution`.
"""

from .exact import ExactComplex
from .tensor_core import CanonicalTensor, FiberBasis, IndexProfile, contract, inner, nullspace_basis
from .poly_field import Poly6, gaussian_inner
from .complex_ops import (
    ContractViolation,
    HypothesisError,
    Section,
    D,
    D_star_full,
    box,
    estimate_check,
    random_section,
    section_inner,
    section_norm2,
    theta_restricted,
)
from .symbol import CompatibilityError, DegenerateCovector, build_M, exactness_report, sigma
from .resolution import SolveResult, TheoremContradiction, assemble, solve

__version__ = "0.1.0"

__all__ = [
    "ExactComplex",
    "CanonicalTensor",
    "FiberBasis",
    "IndexProfile",
    "contract",
    "inner",
    "nullspace_basis",
    "Poly6",
    "gaussian_inner",
    "Section",
    "ContractViolation",
    "HypothesisError",
    "D",
    "D_star_full",
    "theta_restricted",
    "box",
    "estimate_check",
    "random_section",
    "section_inner",
    "section_norm2",
    "CompatibilityError",
    "DegenerateCovector",
    "build_M",
    "exactness_report",
    "sigma",
    "SolveResult",
    "TheoremContradiction",
    "assemble",
    "solve",
]
