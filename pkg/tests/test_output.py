import json
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from multistat.core.intervals import RatInterval
from multistat.core.poly import make_poly
from multistat.core.realroots import isolate_real_roots
from multistat.output import (
    emit_svg,
    fixed_point_reports,
    grid_frame,
    grid_points,
    rational_text,
    reduced_system_report,
    roots_report,
    write_grid_csv,
    write_json,
)
from multistat.services.pointsolve_service import (
    GridEntry,
    GridResult,
    PointStatus,
    SampleRange,
    solve_at_point,
)
from multistat.services.region_service import CellClass


@pytest.fixture
def grid():
    ranges = [SampleRange.parse("k19=200:500:300"), SampleRange.parse("k17=95:100:5")]
    entries = [
        GridEntry(0, {"k19": Fraction(200), "k17": Fraction(95)}, 1, PointStatus.OK),
        GridEntry(1, {"k19": Fraction(200), "k17": Fraction(100)}, 1, PointStatus.OK),
        GridEntry(2, {"k19": Fraction(500), "k17": Fraction(95)}, 3, PointStatus.OK),
        GridEntry(3, {"k19": Fraction(500), "k17": Fraction(100)}, 0, PointStatus.DEGENERATE, "x"),
    ]
    return GridResult(ranges=ranges, fixed={"k18": Fraction(50)}, entries=entries)


def _ids(document):
    root = ET.fromstring(document)
    return {el.get("id") for el in root.iter() if el.get("id")}


class TestGridCsv:
    def test_frame(self, grid):
        frame = grid_frame(grid)
        assert list(frame.columns) == ["k19", "k17", "count", "status"]
        assert frame["count"].tolist() == [1, 1, 3, 0]
        assert frame["status"].tolist() == ["ok", "ok", "ok", "degenerate"]

    def test_file_uses_lf(self, grid, tmp_path):
        path = write_grid_csv(grid, tmp_path / "grid.csv")
        data = path.read_bytes()
        assert b"\r\n" not in data
        lines = data.decode().splitlines()
        assert lines[0] == "k19,k17,count,status"
        assert lines[1] == "200,95,1,ok"
        assert len(lines) == 5


class TestJson:
    def test_rational_text(self):
        assert rational_text(Fraction(3)) == "3/1"
        assert rational_text(Fraction(-2, 6)) == "-1/3"
        assert rational_text(None) is None

    def test_roots_report(self, tmp_path):
        p = make_poly("x^2 - 2", ["x"])
        report = roots_report(p, isolate_real_roots(p), digits=4)
        path = write_json(report, tmp_path / "roots.json")
        data = json.loads(path.read_text())
        assert data["polynomial"] == "x^2 - 2"
        assert len(data["roots"]) == 2
        root = data["roots"][1]
        lo, hi = Fraction(root["lo"]), Fraction(root["hi"])
        assert lo ** 2 <= 2 <= hi ** 2

    def test_reduced_system_report(self, reduced26):
        report = reduced_system_report(reduced26, "model26")
        assert report.cover == ["x4", "x5"]
        assert len(report.formulas) == 9
        assert ["x1", "x4"] in report.edges
        assert len(report.equations) == 2

    def test_fixed_point_report(self, reduced26):
        records = solve_at_point(reduced26, {"k17": 100, "k18": 50, "k19": 200})
        [report] = fixed_point_reports(records, digits=6)
        assert report.status == "all_positive"
        assert report.parameters["k19"] == "200/1"
        assert report.coordinates["x1"].decimal == "90.6512"
        assert report.stability is None
        json.loads(report.model_dump_json())


class TestSvg:
    def test_empty_document(self):
        document = emit_svg()
        root = ET.fromstring(document)
        assert root.tag.endswith("svg")

    def test_glyphs(self, grid):
        points, axes = grid_points(grid)
        assert axes == ("k19", "k17")
        assert len(points) == 3
        ids = _ids(emit_svg(points=points, axes=axes))
        assert {"glyph-disc", "glyph-box"} <= ids
        assert "glyph-diamond" not in ids

    def test_unsolved_points_are_crosses(self, grid, caplog):
        with caplog.at_level("WARNING", logger="multistat.output.svg"):
            points, axes = grid_points(grid)
        assert [p[2] for p in points] == [1, 3, None]
        assert "1 of 3 grid points were not solved" in caplog.text
        ids = _ids(emit_svg(points=points, axes=axes))
        assert "glyph-unsolved" in ids

    def test_other_counts_are_diamonds(self):
        ids = _ids(emit_svg(points=[(Fraction(1), Fraction(1), 5)]))
        assert "glyph-diamond" in ids

    def test_areas(self):
        segments = [
            (Fraction(1), Fraction(0), Fraction(1), CellClass.ONE_SOLUTION),
            (Fraction(1), Fraction(1), Fraction(2), CellClass.MULTISTATIONARY),
            (Fraction(2), Fraction(0), Fraction(2), CellClass.ONE_SOLUTION),
            (Fraction(3), Fraction(0), Fraction(2), CellClass.NO_SOLUTION),
        ]
        ids = _ids(emit_svg(segments=segments, window=((0, 4), (0, 2))))
        assert {f"area-{i}" for i in range(4)} <= ids

    def test_deterministic(self, grid):
        points, axes = grid_points(grid)
        assert emit_svg(points=points, axes=axes) == emit_svg(points=points, axes=axes)

    def test_needs_two_parameters(self):
        result = GridResult(ranges=[SampleRange.parse("k19=1:2:1")], fixed={})
        with pytest.raises(ValueError):
            grid_points(result)
