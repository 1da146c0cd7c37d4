import shutil
from fractions import Fraction

import pytest

from multistat.core.poly import degree_in, variables
from multistat.errors import FixtureChecksumMismatch
from multistat.models import load_fixtures, resolve_model
from multistat.models.fixtures import DATA_DIR


@pytest.fixture
def fixture_copy(tmp_path):
    for name in ("fixtures.yaml", "fixtures.yaml.sha256"):
        shutil.copy(DATA_DIR / name, tmp_path / name)
    return tmp_path / "fixtures.yaml"


def test_bundled_checksum_matches():
    assert load_fixtures().data["break_point"]["variable"] == "k19"


def test_copy_loads(fixture_copy):
    assert load_fixtures(fixture_copy).break_point_interval() == (409, 410)


def test_modified_copy_rejected(fixture_copy):
    text = fixture_copy.read_text().replace('approximate_root: "409.253"', 'approximate_root: "409.254"')
    fixture_copy.write_text(text)
    with pytest.raises(FixtureChecksumMismatch):
        load_fixtures(fixture_copy)
    # verification can be switched off explicitly
    assert load_fixtures(fixture_copy, verify=False).data["break_point"]["approximate_root"] == "409.254"


def test_unknown_bundled_model():
    with pytest.raises(OSError):
        resolve_model("model27")


class TestSections:
    def test_break_point_degree(self, fixture_set):
        assert fixture_set.break_point_polynomial().degree() == 10

    def test_blind_spot_degrees(self, fixture_set):
        assert fixture_set.blind_spot_polynomial("quadratic").degree() == 2
        assert fixture_set.blind_spot_polynomial("quartic").degree() == 4

    def test_constraint_polynomial(self, fixture_set):
        bivariate = fixture_set.constraint_polynomial()
        assert degree_in(bivariate, "x1") == 6
        assert fixture_set.constraint_polynomial(500).degree() == 6

    def test_solution_formulas_cover_eliminated_variables(self, fixture_set):
        steps = fixture_set.solution_formulas()
        assert [v for v, _, _ in steps] == [f"x{i}" for i in range(2, 12)]
        for _, num, den in steps:
            assert not den.is_zero
            assert "k17" not in variables(num) and "k18" not in variables(num)

    @pytest.mark.parametrize("model, expected", [
        ("model26", ["x4", "x5"]),
        ("model28", ["x5", "x6"]),
    ])
    def test_reduced_systems(self, fixture_set, model, expected):
        equations, names, parameters = fixture_set.reduced_system(model)
        assert len(equations) == 2
        assert names == expected
        assert len(parameters) == 3

    def test_region_system(self, fixture_set):
        assert degree_in(fixture_set.region_polynomial("core"), "x5") == 6
        assert degree_in(fixture_set.region_polynomial("linear_equation"), "x4") == 1
        assert fixture_set.boundary_degrees() == {"k17": 14, "k19": 10}

    def test_reference_points(self, fixture_set):
        points = fixture_set.reference_points()
        assert [p["name"] for p in points] == ["x200", "x500_1", "x500_2", "x500_3"]
        assert [p["stability"] for p in points] == ["stable", "stable", "unstable", "stable"]
        first = points[0]
        assert first["parameters"] == {"k17": 100, "k18": 50, "k19": 200}
        assert first["values"]["x1"] == Fraction(906512, 10000)
        assert first["digits"]["x1"] == 6
        assert first["digits"]["x7"] == 6
        assert len(first["values"]) == 11
