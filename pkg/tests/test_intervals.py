from fractions import Fraction

import pytest
from sympy import QQ, Poly, Rational, symbols

from multistat.core.intervals import RatInterval, interval_eval, point_eval

X, Y = symbols("x y")


def _random_poly(rng):
    data = {}
    for _ in range(rng.randint(1, 6)):
        monom = (rng.randint(0, 3), rng.randint(0, 3))
        data[monom] = QQ(rng.randint(-9, 9), rng.randint(1, 4))
    return Poly.from_dict(data, X, Y, domain=QQ)


def _random_interval(rng):
    lo = Fraction(rng.randint(-20, 20), rng.randint(1, 5))
    return RatInterval(lo, lo + Fraction(rng.randint(0, 10), rng.randint(1, 5)))


class TestRatInterval:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            RatInterval(Fraction(2), Fraction(1))

    def test_multiplication(self):
        product = RatInterval(1, 2) * RatInterval(-3, 4)
        assert (product.lo, product.hi) == (-6, 8)

    def test_even_power_across_zero(self):
        square = RatInterval(-2, 3) ** 2
        assert (square.lo, square.hi) == (0, 9)

    def test_division_by_zero_interval(self):
        with pytest.raises(ZeroDivisionError):
            RatInterval(1, 2) / RatInterval(-1, 1)

    def test_division(self):
        q = RatInterval(1, 2) / RatInterval(2, 4)
        assert (q.lo, q.hi) == (Fraction(1, 4), 1)

    def test_predicates(self):
        iv = RatInterval.around(Fraction(1, 2), Fraction(1, 4))
        assert iv.is_positive()
        assert not iv.contains_zero()
        assert iv.midpoint == Fraction(1, 2)
        assert iv.width == Fraction(1, 2)
        assert RatInterval.point(3).is_point


def test_point_eval_is_exact():
    p = Poly(X ** 2 * Y - Rational(1, 3) * Y + 2, X, Y, domain=QQ)
    assert point_eval(p, {"x": Fraction(1, 2), "y": Fraction(3)}) == Fraction(7, 4)


def test_missing_box_entry():
    p = Poly(X + Y, X, Y, domain=QQ)
    with pytest.raises(ValueError):
        interval_eval(p, {"x": RatInterval.point(1)})


def test_unused_variable_needs_no_entry():
    p = Poly(X + 1, X, Y, domain=QQ)
    assert interval_eval(p, {"x": RatInterval(0, 1)}) == RatInterval(1, 2)


def test_interval_inclusion_fuzz(rng):
    # 500 polynomials x 20 points
    for _ in range(500):
        p = _random_poly(rng)
        box = {"x": _random_interval(rng), "y": _random_interval(rng)}
        enclosure = interval_eval(p, box)
        for _ in range(20):
            point = {
                name: iv.lo + iv.width * Fraction(rng.randint(0, 100), 100)
                for name, iv in box.items()
            }
            assert enclosure.contains(point_eval(p, point))
