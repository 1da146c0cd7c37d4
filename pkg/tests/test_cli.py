import json
from fractions import Fraction

import click
import pytest
from click.testing import CliRunner

from multistat.cli import cli, parse_assignments


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, *args):
    return runner.invoke(cli, list(args), obj={})


def test_parse_assignments():
    values = parse_assignments(["k17=100,k18=0.5", "k19=1/3"])
    assert values == {"k17": Fraction(100), "k18": Fraction(1, 2), "k19": Fraction(1, 3)}


@pytest.mark.parametrize("items", [["k17"], ["k17=abc"]])
def test_parse_assignments_rejects_bad_items(items):
    with pytest.raises(click.BadParameter):
        parse_assignments(items)


class TestRoots:
    def test_break_point(self, runner):
        result = _run(runner, "roots", "break-point")
        assert result.exit_code == 0, result.output
        assert result.output.startswith("1 real root(s) of ")
        assert "~ 409.253" in result.output

    def test_blind_spot(self, runner):
        result = _run(runner, "--digits", "8", "roots", "blind-spot-quadratic", "--positive")
        assert result.exit_code == 0, result.output
        assert "~ 16473.33" in result.output

    def test_file(self, runner, tmp_path):
        path = tmp_path / "p.poly"
        path.write_text("x^2 - 2  # two roots\n")
        out = tmp_path / "roots.json"
        result = _run(runner, "roots", str(path), "--out", str(out))
        assert result.exit_code == 0, result.output
        assert "2 real root(s) of x^2 - 2" in result.output
        assert len(json.loads(out.read_text())["roots"]) == 2

    def test_bivariate_file(self, runner, tmp_path):
        path = tmp_path / "p.poly"
        path.write_text("x*y - 1\n")
        assert _run(runner, "roots", str(path)).exit_code == 2

    def test_missing_source(self, runner):
        assert _run(runner, "roots", "no-such-thing").exit_code == 2


class TestReduce:
    def test_model26(self, runner, tmp_path):
        out = tmp_path / "reduced.json"
        result = _run(runner, "reduce", "model26", "--certify", "--out", str(out))
        assert result.exit_code == 0, result.output
        assert "cover: x4, x5" in result.output
        assert "certificate: no vertex cover of size 1 exists" in result.output
        assert "E1: " in result.output and "E2: " in result.output
        data = json.loads(out.read_text())
        assert data["cover"] == ["x4", "x5"]
        assert len(data["formulas"]) == 9

    def test_pivot_order_option(self, runner, tmp_path):
        path = tmp_path / "toy.model"
        path.write_text(
            "vars x1 x2 x3\nparams k1 k2 c1 c2\n"
            "ode x1 = k2*x3 - k1*x1*x2\node x2 = k2*x3 - k1*x1*x2\node x3 = k1*x1*x2 - k2*x3\n"
            "law x1 + x3 = c1\nlaw x2 + x3 = c2\nvalue k1 = 1\nvalue k2 = 0.5\n"
        )
        for order in ("laws-last", "fewest-terms"):
            result = _run(runner, "reduce", str(path), "--pivot-order", order)
            assert result.exit_code == 0, result.output
            assert "cover: x1" in result.output
            assert "E1: " in result.output and "E2: " not in result.output
        assert _run(runner, "reduce", str(path), "--pivot-order", "random").exit_code == 2

    def test_syntax_error(self, runner, tmp_path):
        path = tmp_path / "bad.model"
        path.write_text("vars x\nparams k\node x = k*x x\n")
        result = _run(runner, "reduce", str(path))
        assert result.exit_code == 2
        assert "error: ModelSyntaxError: line 3" in result.output

    def test_bad_config(self, runner, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text("")
        assert _run(runner, "--config", str(path), "reduce", "model26").exit_code == 2


class TestSolve:
    def test_three_states(self, runner, tmp_path):
        out = tmp_path / "records.json"
        result = _run(runner, "solve", "model26", "--fix", "k17=100,k18=50", "--at", "k19=500",
                      "--out", str(out))
        assert result.exit_code == 0, result.output
        assert "3 positive steady state(s)" in result.output
        assert len(json.loads(out.read_text())) == 3

    def test_missing_parameter(self, runner):
        result = _run(runner, "solve", "model26", "--fix", "k17=100,k18=50")
        assert result.exit_code == 2
        assert "k19" in result.output

    def test_stability(self, runner):
        result = _run(runner, "stability", "model26", "--fix", "k17=100,k18=50", "--at", "k19=500")
        assert result.exit_code == 0, result.output
        assert result.output.count("-> stable") == 2
        assert result.output.count("-> unstable") == 1
        assert "bistable" in result.output


def test_sample(runner, tmp_path):
    out = tmp_path / "grid.csv"
    svg = tmp_path / "grid.svg"
    result = _run(runner, "sample", "model26", "--range", "k19=200:500:300",
                  "--range", "k17=100:110:10", "--fix", "k18=50",
                  "--out", str(out), "--svg", str(svg))
    assert result.exit_code == 0, result.output
    assert "ok: 4" in result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "k19,k17,count,status"
    assert len(lines) == 5
    assert svg.read_text().lstrip().startswith("<?xml")


def test_sample_unfixed_parameter(runner, tmp_path):
    result = _run(runner, "sample", "model26", "--range", "k19=200:500:300",
                  "--out", str(tmp_path / "grid.csv"))
    assert result.exit_code == 2
