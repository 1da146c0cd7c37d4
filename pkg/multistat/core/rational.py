"""
Exact rational helpers shared by the kernel.

`fractions.Fraction` is the public Rational type; sympy's QQ elements are
used only inside polynomials.
"""
from decimal import Context, Decimal
from fractions import Fraction
from typing import Any, Optional, Union

import sympy
from sympy import QQ

Rational = Fraction
RationalLike = Union[Fraction, int, str]


def to_rational(value: Any) -> Fraction:
    """Convert ints, decimal/fraction strings, sympy and domain numbers exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(text)
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact input; pass a decimal string")
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        # PythonMPQ, gmpy2.mpq, gmpy2.mpz
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(int(value))


def to_domain(value: Any):
    """Convert to a QQ domain element."""
    q = to_rational(value)
    return QQ(q.numerator, q.denominator)


def to_sympy(value: Any) -> sympy.Rational:
    """Convert to a sympy Rational."""
    q = to_rational(value)
    return sympy.Rational(q.numerator, q.denominator)


def format_rational(value: Fraction) -> str:
    """Serialize as "num/den" (or "num" for integers)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def decimal_string(value: Fraction, digits: int = 6) -> str:
    """Render with `digits` significant digits."""
    ctx = Context(prec=max(digits, 1))
    quotient = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    return format(quotient, "f")


def simplest_rational(lo: Fraction, hi: Fraction) -> Fraction:
    """Simplest rational strictly inside (lo, hi), by Stern-Brocot descent."""
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -_simplest_above(-hi, -lo)
    return _simplest_above(lo, hi)


def _simplest_above(lo: Fraction, hi: Optional[Fraction]) -> Fraction:
    """Simplest rational in (lo, hi) for lo >= 0; hi None means unbounded."""
    whole = lo.numerator // lo.denominator
    if hi is None or whole + 1 < hi:
        return Fraction(whole + 1)
    # no integer inside: continue with the reciprocal of the fractional part
    upper = None if lo == whole else 1 / (lo - whole)
    return whole + 1 / _simplest_above(1 / (hi - whole), upper)
