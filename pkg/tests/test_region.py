import asyncio
from fractions import Fraction

import pytest

from multistat.core.poly import degree_in, make_poly, same_up_to_constant
from multistat.errors import NotLinear
from multistat.services.elimination_service import ReducedSystem
from multistat.services.pointsolve_service import SampleRange, grid_sample
from multistat.services.region_service import (
    CellClass,
    RegionService,
    boundary_conjecture_check,
    boundary_polynomial,
    build_open_cad,
    classify_region,
    eliminate_linear,
    interval_samples,
    project,
    raster_segments,
)
from multistat.utils.config import RegionConfig, SamplingConfig, SolverConfig

NAMES = ["x", "y", "a", "b"]


@pytest.fixture
def quadratic_system():
    """x = y with y^2 - a*y + b = 0: two positive solutions exactly when a > 0, b > 0, a^2 > 4b."""
    return ReducedSystem(
        equations=[make_poly("x - y", NAMES), make_poly("y^2 - a*y + b", NAMES)],
        variables=["x", "y"], parameters=["a", "b"], trace=[], cover=["x", "y"], eliminated=[],
    )


@pytest.fixture
def quadratic_region(quadratic_system):
    cps = eliminate_linear(quadratic_system, {})
    ps = project(cps.core, cps.core_variable, cps.parameters)
    cells = build_open_cad(ps, "a")
    report = classify_region(cells, cps, quadratic_system, ps, "a", extra_samples=3, seed=1)
    return cps, ps, report


class TestLinearElimination:
    def test_quadratic(self, quadratic_system):
        cps = eliminate_linear(quadratic_system, {})
        assert (cps.variable, cps.core_variable) == ("x", "y")
        assert same_up_to_constant(cps.core, make_poly("y^2 - a*y + b", NAMES))
        assert cps.parameters == ["a", "b"]

    def test_no_linear_equation(self):
        rs = ReducedSystem(
            equations=[make_poly("x^2 + y^2 - a", NAMES), make_poly("x^2 - y^2 - 1", NAMES)],
            variables=["x", "y"], parameters=["a"], trace=[], cover=["x", "y"], eliminated=[],
        )
        with pytest.raises(NotLinear):
            eliminate_linear(rs, {})

    def test_model26_core(self, reduced26, fixture_set):
        cps = eliminate_linear(reduced26, {"k18": 50})
        assert cps.variable == "x4"
        assert cps.core_variable == "x5"
        assert cps.parameters == ["k17", "k19"]
        assert degree_in(cps.core, "x5") == 6
        assert same_up_to_constant(cps.core, fixture_set.region_polynomial("core"))


class TestOpenCad:
    def test_projection(self, quadratic_region):
        _, ps, _ = quadratic_region
        expected = [make_poly(e, ["a", "b"]) for e in ("a", "b", "a^2 - 4*b")]
        assert len(ps) == 3
        for e in expected:
            assert any(same_up_to_constant(e, p) for p in ps.polynomials)

    def test_cells(self, quadratic_region):
        _, _, report = quadratic_region
        summary = report.summary()
        assert summary["cells"] == 6
        assert summary["multistationary"] == 1
        assert summary["no_solution"] == 1
        assert summary["not_in_quadrant"] == 4
        assert summary["undetermined"] == 0

    def test_samples_are_interior(self, quadratic_region):
        _, ps, report = quadratic_region
        for cell in report.cells:
            assert 0 not in cell.signs
            assert len(cell.description(ps)) == 3

    def test_delineability_spot_checks(self, quadratic_region):
        _, _, report = quadratic_region
        quadrant = [c for c in report.cells if c.in_quadrant()]
        assert quadrant and all(c.delineable for c in quadrant)

    def test_locate(self, quadratic_region):
        _, _, report = quadratic_region
        assert report.locate({"a": 5, "b": 1}).classification == CellClass.MULTISTATIONARY
        assert report.locate({"a": 5, "b": 10}).classification == CellClass.NO_SOLUTION
        assert report.locate({"a": 2, "b": 1}) is None

    def test_raster(self, quadratic_region):
        _, _, report = quadratic_region
        segments = raster_segments(report, {"a": [0, 10], "b": [0, 10]}, columns=2)
        assert segments
        assert {s[3] for s in segments} == {CellClass.MULTISTATIONARY, CellClass.NO_SOLUTION}
        assert all(0 <= s[1] < s[2] <= 10 for s in segments)

    def test_bad_base_axis(self, quadratic_region):
        _, ps, _ = quadratic_region
        with pytest.raises(ValueError):
            build_open_cad(ps, "k17")

    def test_interval_samples_without_roots(self):
        assert interval_samples([]) == [(None, None, Fraction(0))]


class TestBoundary:
    def test_discriminant_fallback(self, quadratic_region):
        cps, _, _ = quadratic_region
        boundary, found = boundary_polynomial(cps)
        assert not found
        assert same_up_to_constant(boundary, make_poly("a^2 - 4*b", ["a", "b"]))

    def test_degree_pattern(self, quadratic_region):
        cps, _, _ = quadratic_region
        _, found = boundary_polynomial(cps, {"a": 2, "b": 1})
        assert found

    def test_probes(self, quadratic_system, quadratic_region):
        cps, _, _ = quadratic_region
        boundary, _ = boundary_polynomial(cps)
        [result] = boundary_conjecture_check(quadratic_system, boundary,
                                             [({"a": 5, "b": 1}, {"a": 5, "b": 10})], {})
        assert result.counts == (2, 0)
        assert result.sign_flip
        assert result.consistent


@pytest.fixture(scope="module")
def model26_region(reduced26):
    service = RegionService(RegionConfig(delineability_samples=3), SolverConfig(), threads=4)
    _, report = asyncio.run(service.analyze(reduced26, {"k18": 50}, base_axis="k17"))
    return report


@pytest.mark.slow
class TestModel26Region:
    def test_multistationary_region(self, model26_region):
        report = model26_region
        assert report.locate({"k17": 100, "k19": 500}).classification == CellClass.MULTISTATIONARY
        assert report.locate({"k17": 100, "k19": 200}).classification == CellClass.ONE_SOLUTION
        assert report.summary()["multistationary"] > 0

    def test_boundary_probe_across_k17_transition(self, reduced26, fixture_set):
        cps = eliminate_linear(reduced26, {"k18": 50})
        boundary, found = boundary_polynomial(cps, fixture_set.boundary_degrees())
        assert found
        [result] = boundary_conjecture_check(
            reduced26, boundary, [({"k17": 85, "k19": 500}, {"k17": 87, "k19": 500})], {"k18": 50},
        )
        assert result.counts == (1, 3)
        assert result.consistent

    def test_quadrant_cell_count(self, model26_region):
        quadrant = [c for c in model26_region.cells if c.in_quadrant()]
        assert 139 / 3 <= len(quadrant) <= 139 * 3

    def test_every_quadrant_cell_is_delineable(self, model26_region):
        quadrant = [c for c in model26_region.cells if c.in_quadrant()]
        assert quadrant
        assert all(c.delineable for c in quadrant)

    def test_cells_agree_with_point_solving(self, model26_region, reduced26, fixture_set):
        box = fixture_set.sampling_ranges()["model26_region"]
        ranges = [SampleRange.parse(f"{name}={box[name]}") for name in ("k19", "k17")]
        fixed = {k: Fraction(v) for k, v in box["fixed"].items()}
        result = grid_sample(reduced26, ranges, fixed, sampling=SamplingConfig(threads=4))
        expected = {0: CellClass.NO_SOLUTION, 1: CellClass.ONE_SOLUTION}
        located = 0
        for entry in result.entries:
            cell = model26_region.locate(entry.point)
            if cell is None:
                continue
            located += 1
            assert cell.classification == expected.get(entry.count, CellClass.MULTISTATIONARY), entry.point
        assert located > len(result.entries) // 2

    def test_boundary_separates_three_edges(self, reduced26, fixture_set):
        cps = eliminate_linear(reduced26, {"k18": 50})
        boundary, _ = boundary_polynomial(cps, fixture_set.boundary_degrees())
        pairs = [
            ({"k17": 85, "k19": 500}, {"k17": 87, "k19": 500}),
            ({"k17": 110, "k19": 500}, {"k17": Fraction(223, 2), "k19": 500}),
            ({"k17": 100, "k19": 409}, {"k17": 100, "k19": 410}),
        ]
        results = boundary_conjecture_check(reduced26, boundary, pairs, {"k18": 50})
        assert [r.counts for r in results] == [(1, 3), (3, 1), (1, 3)]
        assert all(r.sign_flip for r in results)
