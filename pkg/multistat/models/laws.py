"""
Linear conservation laws c . x = k of a polynomial vector field.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from sympy import Poly

from ..core.poly import arithmetic, constant, make_poly, symbol
from ..core.rational import format_rational, to_domain, to_rational


@dataclass(frozen=True)
class ConservationLaw:
    """Coefficient vector over the model variables plus the name of its total."""
    variables: Tuple[str, ...]
    coefficients: Tuple[Fraction, ...]
    constant: str

    def __post_init__(self):
        coefficients = tuple(to_rational(c) for c in self.coefficients)
        if len(coefficients) != len(self.variables):
            raise ValueError("one coefficient per variable is required")
        if not any(coefficients):
            raise ValueError("a conservation law needs a nonzero coefficient")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_mapping(cls, variables: Sequence[str], mapping: Dict[str, Fraction],
                     constant_name: str) -> "ConservationLaw":
        return cls(tuple(variables), tuple(mapping.get(v, Fraction(0)) for v in variables),
                   constant_name)

    def as_dict(self) -> Dict[str, Fraction]:
        """Nonzero coefficients keyed by variable."""
        return {v: c for v, c in zip(self.variables, self.coefficients) if c}

    @property
    def support(self) -> Tuple[str, ...]:
        return tuple(v for v, c in zip(self.variables, self.coefficients) if c)

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coefficients)

    def linear_form(self, names: Sequence[str]) -> Poly:
        """sum c_i x_i as a polynomial in `names`."""
        total = constant(0, names)
        for v, c in self.as_dict().items():
            total = arithmetic(total, make_poly(c.numerator * symbol(v) / c.denominator, names), "add")
        return total

    def polynomial(self, names: Sequence[str]) -> Poly:
        """sum c_i x_i - k, the law as an equation = 0."""
        return arithmetic(self.linear_form(names), make_poly(symbol(self.constant), names), "sub")

    def residual(self, field: Sequence[Poly]) -> Poly:
        """sum c_i f_i; zero exactly when the law is a first integral."""
        if len(field) != len(self.variables):
            raise ValueError("vector field and law have different lengths")
        names = [str(g) for g in field[0].gens] if field else list(self.variables)
        total = constant(0, names)
        for c, f in zip(self.coefficients, field):
            if c:
                total = arithmetic(total, f.mul_ground(to_domain(c)), "add")
        return total

    def __str__(self) -> str:
        parts = []
        for v, c in self.as_dict().items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            text = v if mag == 1 else f"{format_rational(mag)}*{v}"
            parts.append((sign, text))
        first_sign, first = parts[0]
        body = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            body += f" {sign} {text}"
        return f"{body} = {self.constant}"
