"""
Exact algebra kernel: rationals, intervals, polynomials and real roots.
"""
from .intervals import RatInterval, interval_eval, point_eval
from .poly import (
    MultiPoly,
    UniPoly,
    arithmetic,
    as_univariate,
    coefficients_in,
    derivative,
    discriminant,
    make_poly,
    primitive_integer,
    resultant,
    squarefree_part,
    substitute,
    sylvester_resultant,
)
from .rational import Rational, simplest_rational, to_rational
from .realroots import (
    AlgebraicNumber,
    count_roots_in,
    isolate_real_roots,
    positive_roots,
    refine,
    sign_at,
)

__all__ = [
    "AlgebraicNumber",
    "MultiPoly",
    "RatInterval",
    "Rational",
    "UniPoly",
    "arithmetic",
    "as_univariate",
    "coefficients_in",
    "count_roots_in",
    "derivative",
    "discriminant",
    "interval_eval",
    "isolate_real_roots",
    "make_poly",
    "point_eval",
    "positive_roots",
    "primitive_integer",
    "refine",
    "resultant",
    "sign_at",
    "simplest_rational",
    "squarefree_part",
    "substitute",
    "sylvester_resultant",
    "to_rational",
]
