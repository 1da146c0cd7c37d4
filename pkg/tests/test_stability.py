import asyncio
from dataclasses import replace
from fractions import Fraction

import pytest

from multistat.core.poly import make_poly
from multistat.errors import LawsNotSolvable
from multistat.services.pointsolve_service import RecordStatus, enclose, solve_at_point
from multistat.services.stability_service import (
    LAMBDA,
    Stability,
    StabilityService,
    analyze_point,
    char_poly,
    classify_record,
    reduced_jacobian,
    rhp_count,
    solve_laws,
)
from multistat.utils.config import SolverConfig, StabilityConfig


def _lam(expr):
    return make_poly(expr, [LAMBDA])


class TestCharPoly:
    def test_scalar(self):
        assert char_poly([[-1]]) == _lam("lam + 1")

    def test_rotation(self):
        assert char_poly([[0, 1], [-1, 0]]) == _lam("lam^2 + 1")

    def test_rational_entries(self):
        p = char_poly([[Fraction(1, 2), 0], [3, -2]])
        assert p == _lam("(lam - 1/2)*(lam + 2)")

    def test_not_square(self):
        with pytest.raises(ValueError):
            char_poly([[1, 2], [3]])


class TestRouth:
    @pytest.mark.parametrize("expr, count, verdict", [
        ("lam + 1", 0, Stability.STABLE),
        ("lam - 1", 1, Stability.UNSTABLE),
        ("-lam - 1", 0, Stability.STABLE),
        ("lam^2 + lam - 2", 1, Stability.UNSTABLE),
        ("lam^3 + 2*lam^2 + 3*lam + 1", 0, Stability.STABLE),
        ("lam^3 - lam^2 + 2", 2, Stability.UNSTABLE),
        ("(lam + 1)*(lam + 2)*(lam + 3)*(lam + 4)", 0, Stability.STABLE),
        ("(lam - 1)*(lam - 2)*(lam + 4)", 2, Stability.UNSTABLE),
    ])
    def test_counts(self, expr, count, verdict):
        result = rhp_count(_lam(expr))
        assert result.rhp_count == count
        assert result.classification == verdict

    def test_constant(self):
        assert rhp_count(_lam("3")).classification == Stability.STABLE

    @pytest.mark.parametrize("expr", ["lam^2 + 1", "lam^2 - lam", "lam^3 + lam^2 + lam + 1"])
    def test_zero_pivot_undetermined(self, expr):
        result = rhp_count(_lam(expr))
        assert result.rhp_count is None
        assert result.classification == Stability.UNDETERMINED
        assert str(result) == "undetermined"

    def test_zero_polynomial(self):
        with pytest.raises(ValueError):
            rhp_count(_lam("0"))

    def test_str(self):
        assert str(rhp_count(_lam("lam - 1"))) == "unstable (1 in right half-plane)"


class TestReducedJacobian:
    def test_toy(self, toy_model):
        jacobian = reduced_jacobian(toy_model, eliminate=["x2", "x3"])
        assert jacobian.variables == ["x1"]
        assert jacobian.size == 1
        # d/dx1 of (c1 - x1)/2 - x1*(c2 - c1 + x1)
        p = char_poly(jacobian, {"x1": 1, "c1": 2, "c2": 1})
        assert p == _lam("lam + 3/2")

    def test_solve_laws(self, toy_model):
        solved = solve_laws(toy_model.laws, ["x2", "x3"], toy_model.names)
        assert solved["x3"] == make_poly("c1 - x1", toy_model.names)
        assert solved["x2"] == make_poly("c2 - c1 + x1", toy_model.names)

    def test_count_mismatch(self, toy_model):
        with pytest.raises(LawsNotSolvable):
            reduced_jacobian(toy_model, eliminate=["x1"])

    def test_unknown_variable(self, toy_model):
        with pytest.raises(LawsNotSolvable):
            reduced_jacobian(toy_model, eliminate=["x1", "x9"])

    def test_singular(self, model26):
        with pytest.raises(LawsNotSolvable):
            reduced_jacobian(model26, eliminate=["x1", "x2", "x3"])

    def test_model26_default_elimination(self, model26):
        jacobian = reduced_jacobian(model26, eliminate=StabilityConfig().eliminate)
        assert jacobian.size == 8
        assert "x1" not in jacobian.variables


class TestReferencePointStability:
    def test_verdicts(self, model26, reduced26, fixture_set):
        expected = {}
        for point in fixture_set.reference_points():
            expected.setdefault(point["parameters"]["k19"], []).append(point)
        for k19, points in expected.items():
            analysis = analyze_point(model26, reduced26, points[0]["parameters"])
            positive = [r for r in analysis.records if r.positivity == RecordStatus.ALL_POSITIVE]
            assert len(positive) == len(points)
            for point in points:
                x1 = point["values"]["x1"]
                record = min(positive, key=lambda r: abs(r.midpoint("x1") - x1))
                assert record.stability.classification.value == point["stability"]
            assert analysis.bistable == (k19 == 500)

    def test_unstable_point_has_one_positive_eigenvalue(self, model26, reduced26):
        jacobian = reduced_jacobian(model26, eliminate=StabilityConfig().eliminate)
        records = solve_at_point(reduced26, {"k17": 100, "k18": 50, "k19": 500})
        verdicts = sorted((classify_record(r, jacobian, reduced26) for r in records),
                          key=lambda v: v.classification.value)
        assert [v.classification for v in verdicts] == [Stability.STABLE, Stability.STABLE,
                                                       Stability.UNSTABLE]
        unstable = verdicts[-1]
        assert unstable.rhp_count == 1
        assert sum(1 for z in unstable.eigenvalues if z.real > 0) == 1

    def test_verdicts_stable_under_refinement(self, model26, reduced26):
        jacobian = reduced_jacobian(model26, eliminate=StabilityConfig().eliminate)
        records = solve_at_point(reduced26, {"k17": 100, "k18": 50, "k19": 500})
        for record in (r for r in records if r.positivity == RecordStatus.ALL_POSITIVE):
            verdicts = []
            for width in (Fraction(1, 10 ** 4), Fraction(1, 10 ** 8)):
                coarse = replace(record, enclosures=enclose(record, reduced26, width))
                verdicts.append(classify_record(coarse, jacobian, reduced26, start_width=width))
            assert verdicts[0].classification == verdicts[1].classification
            assert verdicts[0].classification != Stability.UNDETERMINED

    def test_service(self, model26, reduced26):
        service = StabilityService(StabilityConfig(), SolverConfig())
        analysis = asyncio.run(service.analyze(model26, reduced26, {"k17": 100, "k18": 50, "k19": 200}))
        assert len(analysis.records) == 1
        assert not analysis.bistable
        assert service.get_stats()["undetermined"] == 0
