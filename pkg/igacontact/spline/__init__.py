"""Univariate B-spline foundations: knot vectors, basis functions, refinement and quadrature."""
from .knots import (
    KnotVector,
    BasisEval,
    InvalidKnotVector,
    KnotDomainError,
    find_span,
    find_spans,
    eval_basis,
    eval_basis_batch,
    uniform_interior_knots,
    graded_interior_knots,
)
from .refine import (
    RefinementError,
    insert_knot,
    insert_knots,
    elevate_degree,
    to_homogeneous,
    from_homogeneous,
)
from .quadrature import QuadratureRule, QuadratureRangeError, gauss_legendre
