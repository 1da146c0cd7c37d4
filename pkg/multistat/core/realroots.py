"""
Exact univariate real-root isolation, counting and refinement over QQ.

Isolation runs sympy's real-root isolator on the squarefree part; the
returned intervals are normalized so that every root is either a
degenerate rational interval or sits strictly inside an interval whose
endpoints give a strict sign change.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import sympy
from sympy import Poly, QQ

from ..errors import ZeroPoly
from .intervals import RatInterval
from .poly import squarefree_part
from .rational import decimal_string, to_rational, to_sympy

logger = logging.getLogger(__name__)

OPENNESS = ("open", "closed", "left-open", "right-open")
_MAX_SEPARATION_STEPS = 100_000


def _check_univariate(p: Poly) -> Poly:
    if len(p.gens) != 1:
        raise ValueError(f"expected a univariate polynomial, got generators {p.gens}")
    return p


def _integer_coeffs(p: Poly) -> List[int]:
    """Integer coefficients of a positive multiple of p, highest degree first."""
    _, q = p.set_domain(QQ).clear_denoms(convert=True)
    return [int(c) for c in q.all_coeffs()]


def _sign_of_coeffs(coeffs: Sequence[int], x: Fraction) -> int:
    """Sign of the polynomial with integer coefficients `coeffs` at x."""
    num, den = x.numerator, x.denominator
    acc = coeffs[0]
    den_power = 1
    for c in coeffs[1:]:
        den_power *= den
        acc = acc * num + c * den_power
    return (acc > 0) - (acc < 0)


def sign_at_rational(p: Poly, x) -> int:
    """Exact sign of a univariate polynomial at a rational point."""
    if p.is_zero:
        return 0
    return _sign_of_coeffs(_integer_coeffs(p), to_rational(x))


@dataclass(frozen=True)
class AlgebraicNumber:
    """A real root pinned by a squarefree integer polynomial and an isolating interval."""
    defining: Poly
    interval: RatInterval

    @property
    def is_rational(self) -> bool:
        return self.interval.is_point

    @property
    def lo(self) -> Fraction:
        return self.interval.lo

    @property
    def hi(self) -> Fraction:
        return self.interval.hi

    def is_positive(self) -> bool:
        """Strict positivity, decided exactly."""
        return _strictly_positive(split_at(self, Fraction(0)))

    def approximate(self, digits: int = 6) -> str:
        """Decimal rendering correct to `digits` significant digits."""
        return approximate(self, digits)

    def __str__(self) -> str:
        return f"root of {self.defining.as_expr()} in {self.interval}"


def isolate_real_roots(p: Poly) -> List[AlgebraicNumber]:
    """One isolating interval per distinct real root, increasing."""
    _check_univariate(p)
    if p.is_zero:
        raise ZeroPoly("cannot isolate the roots of the zero polynomial")
    if p.degree() < 1:
        return []

    s = squarefree_part(p)
    coeffs = _integer_coeffs(s)
    roots: List[AlgebraicNumber] = []
    for (a, b), _ in s.intervals():
        lo, hi = to_rational(a), to_rational(b)
        if lo == hi:
            roots.append(AlgebraicNumber(s, RatInterval.point(lo)))
            continue
        # an endpoint may itself be a root reported by a neighbouring interval
        for end in (lo, hi):
            if _sign_of_coeffs(coeffs, end) == 0:
                roots.append(AlgebraicNumber(s, RatInterval.point(end)))
        roots.extend(_roots_inside(s, coeffs, lo, hi))

    roots.sort(key=lambda r: (r.lo, r.hi))
    roots = _separate(roots)
    expected = count_roots_in(s)
    if len(roots) != expected:
        logger.error(f"Isolated {len(roots)} roots of {s.as_expr()}, Sturm count is {expected}")
        raise ArithmeticError(f"root isolation found {len(roots)} of {expected} real roots")
    return roots


def _roots_inside(s: Poly, coeffs: Sequence[int], lo: Fraction,
                  hi: Fraction) -> List[AlgebraicNumber]:
    """Isolate the roots strictly between lo and hi with nonzero endpoint signs."""
    n = count_roots_in(s, lo, hi, "open")
    if n == 0:
        return []
    if n > 1:
        mid = (lo + hi) / 2
        found = _roots_inside(s, coeffs, lo, mid) + _roots_inside(s, coeffs, mid, hi)
        if _sign_of_coeffs(coeffs, mid) == 0:
            found.append(AlgebraicNumber(s, RatInterval.point(mid)))
        return found

    while _sign_of_coeffs(coeffs, lo) == 0 or _sign_of_coeffs(coeffs, hi) == 0:
        mid = (lo + hi) / 2
        if _sign_of_coeffs(coeffs, mid) == 0:
            return [AlgebraicNumber(s, RatInterval.point(mid))]
        if count_roots_in(s, mid, hi, "open") == 1:
            lo = mid
        else:
            hi = mid
    return [AlgebraicNumber(s, RatInterval(lo, hi))]


def _separate(roots: List[AlgebraicNumber]) -> List[AlgebraicNumber]:
    """Merge duplicates and shrink neighbouring intervals until they are disjoint.

    All roots share one squarefree defining polynomial, and every proper
    interval holds exactly one root with nonzero signs at both endpoints.
    """
    result = sorted(roots, key=lambda r: (r.lo, r.hi))
    i = 0
    steps = 0
    while i + 1 < len(result):
        steps += 1
        if steps > _MAX_SEPARATION_STEPS:
            logger.error(f"Root separation did not converge for {len(result)} roots")
            raise ArithmeticError("root separation did not converge")
        left, right = result[i], result[i + 1]
        if left.hi < right.lo:
            i += 1
            continue

        if left.is_rational and right.is_rational:
            # sorted and overlapping: the same point
            del result[i + 1]
        elif left.is_rational or right.is_rational:
            # a root inside an isolating interval is that interval's root
            del result[i + 1 if left.is_rational else i]
        elif count_roots_in(left.defining, min(left.lo, right.lo), max(left.hi, right.hi),
                            "closed") == 1:
            del result[i + 1 if left.interval.width <= right.interval.width else i]
        else:
            result[i], result[i + 1] = _bisect(left), _bisect(right)
        result.sort(key=lambda r: (r.lo, r.hi))
        i = 0
    return result


def _bisect(a: AlgebraicNumber) -> AlgebraicNumber:
    """Halve an open isolating interval once."""
    if a.is_rational:
        return a
    coeffs = _integer_coeffs(a.defining)
    lo, hi = a.lo, a.hi
    mid = (lo + hi) / 2
    s_mid = _sign_of_coeffs(coeffs, mid)
    if s_mid == 0:
        return AlgebraicNumber(a.defining, RatInterval.point(mid))
    if _sign_of_coeffs(coeffs, lo) * s_mid < 0:
        return AlgebraicNumber(a.defining, RatInterval(lo, mid))
    return AlgebraicNumber(a.defining, RatInterval(mid, hi))


def refine(a: AlgebraicNumber, width) -> AlgebraicNumber:
    """Bisect until the isolating interval is no wider than `width`."""
    width = to_rational(width)
    if width <= 0:
        raise ValueError("refinement width must be positive")
    if a.is_rational or a.interval.width <= width:
        return a

    coeffs = _integer_coeffs(a.defining)
    lo, hi = a.lo, a.hi
    s_lo = _sign_of_coeffs(coeffs, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = _sign_of_coeffs(coeffs, mid)
        if s_mid == 0:
            return AlgebraicNumber(a.defining, RatInterval.point(mid))
        if s_lo * s_mid < 0:
            hi = mid
        else:
            lo, s_lo = mid, s_mid
    return AlgebraicNumber(a.defining, RatInterval(lo, hi))


def split_at(a: AlgebraicNumber, x) -> AlgebraicNumber:
    """Shrink the interval so that x is not an interior point, keeping the root."""
    x = to_rational(x)
    if a.is_rational or not (a.lo < x < a.hi):
        return a
    coeffs = _integer_coeffs(a.defining)
    s_x = _sign_of_coeffs(coeffs, x)
    if s_x == 0:
        return AlgebraicNumber(a.defining, RatInterval.point(x))
    if _sign_of_coeffs(coeffs, a.lo) * s_x < 0:
        return AlgebraicNumber(a.defining, RatInterval(a.lo, x))
    return AlgebraicNumber(a.defining, RatInterval(x, a.hi))


def _strictly_positive(root: AlgebraicNumber) -> bool:
    # after split_at(root, 0) an open interval never has 0 inside
    return root.lo > 0 or (root.lo == 0 and not root.is_rational)


def positive_roots(p: Poly) -> List[AlgebraicNumber]:
    """Isolated roots that are strictly positive, with intervals inside (0, inf)."""
    result = []
    for root in isolate_real_roots(p):
        root = split_at(root, Fraction(0))
        if _strictly_positive(root):
            result.append(root)
    return result


def count_roots_in(
    p: Poly,
    lo=None,
    hi=None,
    openness: str = "open",
) -> int:
    """Distinct real roots in an interval by Sturm sequences; None means unbounded."""
    _check_univariate(p)
    if p.is_zero:
        raise ZeroPoly("cannot count the roots of the zero polynomial")
    if openness not in OPENNESS:
        raise ValueError(f"openness must be one of {OPENNESS}")
    if p.degree() < 1:
        return 0

    s = squarefree_part(p)
    lo = None if lo is None else to_rational(lo)
    hi = None if hi is None else to_rational(hi)
    if lo is not None and hi is not None and lo > hi:
        raise ValueError(f"empty interval ({lo}, {hi})")

    count = int(s.count_roots(
        None if lo is None else to_sympy(lo),
        None if hi is None else to_sympy(hi),
    ))

    coeffs = _integer_coeffs(s)
    lo_root = lo is not None and _sign_of_coeffs(coeffs, lo) == 0
    hi_root = hi is not None and _sign_of_coeffs(coeffs, hi) == 0
    if lo is not None and lo == hi:
        return int(lo_root and openness == "closed")
    if lo_root and openness in ("open", "left-open"):
        count -= 1
    if hi_root and openness in ("open", "right-open"):
        count -= 1
    return count


def sign_at(p: Poly, a: AlgebraicNumber) -> int:
    """Exact sign of p at an algebraic number: gcd test for zero, then refinement."""
    _check_univariate(p)
    if p.is_zero:
        return 0
    if a.is_rational:
        return sign_at_rational(p, a.lo)

    # rename into the generator of the defining polynomial
    q = Poly(p.all_coeffs(), a.defining.gens[0], domain=QQ)
    g = sympy.gcd(q, a.defining.set_domain(QQ))
    if g.degree() >= 1 and count_roots_in(g, a.lo, a.hi, "open") > 0:
        return 0

    current = a
    while count_roots_in(q, current.lo, current.hi, "closed") > 0:
        current = _bisect(current)
        if current.is_rational:
            return sign_at_rational(q, current.lo)
    return sign_at_rational(q, current.interval.midpoint)


def approximate(a: AlgebraicNumber, digits: int = 6) -> str:
    """Decimal string of the root, refined until `digits` significant digits are stable."""
    if a.is_rational:
        return decimal_string(a.lo, digits)
    current = a
    while True:
        lo_text = decimal_string(current.lo, digits)
        hi_text = decimal_string(current.hi, digits)
        if lo_text == hi_text:
            return lo_text
        target = current.interval.width / 1024
        magnitude = max(abs(current.lo), abs(current.hi))
        floor = magnitude / Fraction(10) ** (digits + 6) if magnitude else Fraction(1, 10 ** 40)
        if current.interval.width <= floor:
            return decimal_string(current.interval.midpoint, digits)
        current = refine(current, max(target, floor))


def separate_roots(roots: Sequence[AlgebraicNumber]) -> List[AlgebraicNumber]:
    """Order roots of pairwise coprime polynomials into disjoint increasing intervals."""
    result = sorted(roots, key=lambda r: (r.lo, r.hi))
    changed = True
    while changed:
        changed = False
        for i in range(len(result) - 1):
            left, right = result[i], result[i + 1]
            if left.hi < right.lo:
                continue
            if left.is_rational and right.is_rational:
                if left.lo == right.lo:
                    raise ValueError(f"repeated root {left.lo}")
                continue
            result[i], result[i + 1] = _bisect(left), _bisect(right)
            changed = True
        result.sort(key=lambda r: (r.lo, r.hi))
    return result
