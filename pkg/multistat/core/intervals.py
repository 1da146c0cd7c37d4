"""
Exact rational interval arithmetic and polynomial enclosure.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Tuple

from sympy import Poly

from .rational import to_rational


@dataclass(frozen=True)
class RatInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_rational(self.lo), to_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value) -> "RatInterval":
        value = to_rational(value)
        return cls(value, value)

    @classmethod
    def around(cls, center, radius) -> "RatInterval":
        center, radius = to_rational(center), to_rational(radius)
        return cls(center - radius, center + radius)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value) -> bool:
        value = to_rational(value)
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_nonpositive(self) -> bool:
        return self.hi <= 0

    def __add__(self, other: "RatInterval") -> "RatInterval":
        other = _coerce(other)
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "RatInterval":
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other: "RatInterval") -> "RatInterval":
        return self + (-_coerce(other))

    def __rsub__(self, other: "RatInterval") -> "RatInterval":
        return _coerce(other) - self

    def __mul__(self, other: "RatInterval") -> "RatInterval":
        other = _coerce(other)
        products = (
            self.lo * other.lo, self.lo * other.hi,
            self.hi * other.lo, self.hi * other.hi,
        )
        return RatInterval(min(products), max(products))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RatInterval":
        if exponent < 0:
            raise ValueError("negative powers are not supported")
        if exponent == 0:
            return RatInterval(Fraction(1), Fraction(1))
        lo_p, hi_p = self.lo ** exponent, self.hi ** exponent
        if exponent % 2 == 1:
            return RatInterval(lo_p, hi_p)
        if self.lo >= 0:
            return RatInterval(lo_p, hi_p)
        if self.hi <= 0:
            return RatInterval(hi_p, lo_p)
        return RatInterval(Fraction(0), max(lo_p, hi_p))

    def __truediv__(self, other: "RatInterval") -> "RatInterval":
        other = _coerce(other)
        if other.contains_zero():
            raise ZeroDivisionError("divisor interval contains zero")
        return self * RatInterval(1 / other.hi, 1 / other.lo)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _coerce(value) -> RatInterval:
    if isinstance(value, RatInterval):
        return value
    return RatInterval.point(value)


@lru_cache(maxsize=4096)
def _compiled_terms(p: Poly) -> Tuple[Tuple[str, ...], List[Tuple[Fraction, Tuple[int, ...]]]]:
    names = tuple(str(g) for g in p.gens)
    terms = [(to_rational(coeff), monom) for monom, coeff in p.terms()]
    return names, terms


def interval_eval(p: Poly, box: Mapping[str, RatInterval]) -> RatInterval:
    """Enclose p over the box; the result contains p(point) for every point in it."""
    names, terms = _compiled_terms(p)
    if p.is_zero:
        return RatInterval(Fraction(0), Fraction(0))

    # Only variables that occur need an entry
    used = {i for _, monom in terms for i, e in enumerate(monom) if e}
    missing = [names[i] for i in used if names[i] not in box]
    if missing:
        raise ValueError(f"box has no entry for {', '.join(sorted(missing))}")

    powers: Dict[Tuple[int, int], RatInterval] = {}
    lo = hi = Fraction(0)
    for coeff, monom in terms:
        term = RatInterval(coeff, coeff)
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = box[names[i]] ** e
                term = term * powers[key]
        lo += term.lo
        hi += term.hi
    return RatInterval(lo, hi)


def point_eval(p: Poly, point: Mapping[str, Fraction]) -> Fraction:
    """Exact value of p at a rational point."""
    names, terms = _compiled_terms(p)
    total = Fraction(0)
    for coeff, monom in terms:
        value = coeff
        for i, e in enumerate(monom):
            if e:
                value *= to_rational(point[names[i]]) ** e
        total += value
    return total
