from fractions import Fraction

import pytest

from multistat.core.rational import (
    decimal_string,
    format_rational,
    simplest_rational,
    to_domain,
    to_rational,
)


@pytest.mark.parametrize("value, expected", [
    ("0.02", Fraction(1, 50)),
    ("3/4", Fraction(3, 4)),
    (" 15 ", Fraction(15)),
    (7, Fraction(7)),
    ("1e-30", Fraction(1, 10 ** 30)),
])
def test_to_rational_is_exact(value, expected):
    assert to_rational(value) == expected


@pytest.mark.parametrize("value", [0.1, True])
def test_to_rational_rejects_inexact_input(value):
    with pytest.raises(TypeError):
        to_rational(value)


def test_domain_round_trip():
    assert to_rational(to_domain("-5/12")) == Fraction(-5, 12)


def test_format_rational():
    assert format_rational(Fraction(3)) == "3"
    assert format_rational(Fraction(-1, 2)) == "-1/2"


@pytest.mark.parametrize("value, digits, expected", [
    (Fraction(1, 3), 6, "0.333333"),
    (Fraction(409253, 1000), 6, "409.253"),
    (Fraction(2, 3), 3, "0.667"),
])
def test_decimal_string(value, digits, expected):
    assert decimal_string(value, digits) == expected


class TestSimplestRational:
    def test_stern_brocot(self):
        assert simplest_rational(Fraction(1, 3), Fraction(1, 2)) == Fraction(2, 5)

    def test_integer_preferred(self):
        assert simplest_rational(Fraction(5, 2), Fraction(4)) == 3

    def test_zero_inside(self):
        assert simplest_rational(Fraction(-3, 2), Fraction(1, 7)) == 0

    def test_negative_interval(self):
        assert simplest_rational(Fraction(-4), Fraction(-5, 2)) == -3

    def test_strictly_inside(self, rng):
        for _ in range(200):
            a = Fraction(rng.randint(-1000, 1000), rng.randint(1, 50))
            b = a + Fraction(rng.randint(1, 100), rng.randint(1, 500))
            q = simplest_rational(a, b)
            assert a < q < b

    def test_empty_interval(self):
        with pytest.raises(ValueError):
            simplest_rational(Fraction(1), Fraction(1))
