from fractions import Fraction

import pytest

from multistat.errors import LawViolation, NoNonnegativeBasis
from multistat.models import ConservationLaw, parse_expression
from multistat.services.conservation_service import (
    contains_law,
    elementary_vectors,
    linear_first_integrals,
    nonnegative_basis,
    resolve_laws,
    same_span,
    verify_laws,
)

TOY_VARS = ("x1", "x2", "x3")


def _law(coefficients, name="c1"):
    return ConservationLaw(TOY_VARS, tuple(Fraction(c) for c in coefficients), name)


class TestToyModel:
    def test_first_integrals(self, toy_model):
        laws = linear_first_integrals(toy_model.vector_field(), toy_model.variables)
        assert [law.coefficients for law in laws] == [(1, 0, 1), (0, 1, 1)]
        assert [law.constant for law in laws] == ["c1", "c2"]
        assert same_span(laws, toy_model.laws)

    def test_contains_law(self, toy_model):
        assert contains_law(toy_model.laws, {"x1": 1, "x2": 1, "x3": 2})
        assert not contains_law(toy_model.laws, {"x1": 1})

    def test_declared_laws_verified(self, toy_model):
        laws = resolve_laws(toy_model.vector_field(), toy_model.variables, toy_model.laws)
        assert laws == toy_model.laws

    def test_residual_with_zero_coefficient(self, toy_model):
        law = _law((1, 0, 1))
        assert law.residual(toy_model.vector_field()).is_zero
        assert not _law((1, 0, 0)).residual(toy_model.vector_field()).is_zero

    def test_violation(self, toy_model):
        with pytest.raises(LawViolation):
            verify_laws(toy_model.vector_field(), [_law((1, 0, 0))])

    def test_no_first_integrals(self):
        field = [parse_expression(v, TOY_VARS) for v in ("-x1", "x1 - x2", "x2*x3")]
        assert linear_first_integrals(field, TOY_VARS) == []


class TestNonnegativeBasis:
    def test_mixed_signs_become_nonnegative(self):
        basis = nonnegative_basis([_law((1, -1, 0), "t1"), _law((0, 1, 1), "t2")])
        assert [law.coefficients for law in basis] == [(1, 0, 1), (0, 1, 1)]
        assert [law.constant for law in basis] == ["t1", "t2"]

    def test_elementary_vectors(self):
        vectors = set(elementary_vectors([_law((1, 0, 1)), _law((0, 1, 1))]))
        assert vectors == {(0, 1, 1), (1, 0, 1), (1, -1, 0)}

    def test_no_nonnegative_basis(self):
        with pytest.raises(NoNonnegativeBasis):
            nonnegative_basis([_law((1, -1, 0))])

    def test_empty(self):
        assert nonnegative_basis([]) == []


class TestModel26:
    def test_declared_laws_hold(self, model26):
        verify_laws(model26.vector_field(), model26.laws)

    def test_computed_laws_match_declared(self, model26):
        computed = resolve_laws(model26.vector_field(), model26.variables, compute=True)
        assert len(computed) == 3
        assert all(law.is_nonnegative() for law in computed)
        assert same_span(computed, model26.laws)

    def test_known_laws_in_span(self, model26):
        field = model26.vector_field()
        computed = linear_first_integrals(field, model26.variables)
        assert contains_law(computed, {"x5": 1, "x8": 1, "x9": 1, "x10": 1, "x11": 1})
        assert contains_law(computed, {"x4": 1, "x6": 1, "x7": 1})

    def test_nonnegative_basis_is_declared_laws(self, model26):
        laws = linear_first_integrals(model26.vector_field(), model26.variables)
        basis = nonnegative_basis(laws)
        assert {law.coefficients for law in basis} == {law.coefficients for law in model26.laws}
        assert all(set(law.coefficients) == {0, 1} for law in basis)

    def test_variable_order_does_not_matter(self, model26, rng):
        field = model26.vector_field()
        reference = linear_first_integrals(field, model26.variables)
        for _ in range(5):
            order = list(range(len(model26.variables)))
            rng.shuffle(order)
            names = [model26.variables[i] for i in order]
            shuffled = linear_first_integrals([field[i] for i in order], names)
            restored = [ConservationLaw.from_mapping(model26.variables, law.as_dict(), law.constant)
                        for law in shuffled]
            assert same_span(restored, reference)


class TestModel28:
    def test_declared_laws_hold(self, model28):
        assert [law.constant for law in model28.laws] == ["k28", "k29", "k30"]
        verify_laws(model28.vector_field(), model28.laws)

    def test_computed_laws_match_declared(self, model28):
        computed = resolve_laws(model28.vector_field(), model28.variables, compute=True)
        assert len(computed) == 3
        assert {law.coefficients for law in computed} == {law.coefficients for law in model28.laws}

    def test_known_laws_in_span(self, model28):
        computed = linear_first_integrals(model28.vector_field(), model28.variables)
        assert contains_law(computed, {"x5": 1, "x7": 1, "x8": 1, "x9": 1, "x10": 1})
        assert not contains_law(computed, {"x5": 1, "x7": 1})
