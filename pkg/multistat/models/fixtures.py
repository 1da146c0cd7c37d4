"""
Bundled models and reference fixtures.
"""
import hashlib
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml
from sympy import Poly

from ..core.poly import as_univariate, make_poly, substitute_values, symbol, univariate_from_coeffs
from ..core.rational import to_rational
from ..errors import FixtureChecksumMismatch
from .model_file import ModelFile, load_model, parse_expression

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
BUNDLED_MODELS = ("model26", "model28")
FORMULA_NAMES = [f"x{i}" for i in range(1, 12)] + ["k17", "k18", "k19"]
REGION_NAMES = ["x4", "x5", "k17", "k19"]


def bundled_model_path(name: str) -> Path:
    """Path of a bundled model file by name."""
    if name not in BUNDLED_MODELS:
        raise ValueError(f"Unknown bundled model: {name}")
    return DATA_DIR / f"{name}.model"


def resolve_model(source: Union[str, Path]) -> ModelFile:
    """Load a bundled model by name or a model file by path."""
    if str(source) in BUNDLED_MODELS:
        return load_model(bundled_model_path(str(source)))
    return load_model(source)


def _checksum(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class FixtureSet:
    """Reference polynomials and values, checksummed against transcription drift."""
    data: Dict[str, Any]

    def break_point_polynomial(self) -> Poly:
        """The degree-10 polynomial whose unique real root is the k19 break point."""
        section = self.data["break_point"]
        return univariate_from_coeffs(section["coefficients"], section["variable"])

    def break_point_interval(self) -> Tuple[Fraction, Fraction]:
        lo, hi = self.data["break_point"]["isolating_interval"]
        return to_rational(lo), to_rational(hi)

    def blind_spot_polynomial(self, kind: str) -> Poly:
        """`quadratic` or `quartic` k19 constraint."""
        section = self.data["blind_spots"][kind]
        var = section["variable"]
        return as_univariate(parse_expression(section["polynomial"], [var]), var)

    def blind_spot_root(self, kind: str) -> Fraction:
        return to_rational(self.data["blind_spots"][kind]["approximate_root"])

    def constraint_polynomial(self, k19=None) -> Poly:
        """f(x1, k19); univariate in x1 when k19 is given."""
        section = self.data["constraint_polynomial"]
        names = [section["variable"], section["parameter"]]
        total = make_poly(0, names)
        x1 = make_poly(symbol(names[0]), names)
        for i, text in enumerate(section["coefficients"]):
            total = total + parse_expression(text, names) * x1 ** i
        if k19 is None:
            return total
        return as_univariate(substitute_values(total, {names[1]: to_rational(k19)}), names[0])

    def solution_formulas(self) -> List[Tuple[str, Poly, Poly]]:
        """(variable, numerator, denominator) in back-substitution order."""
        steps = []
        for step in self.data["solution_formulas"]["steps"]:
            steps.append((
                step["variable"],
                parse_expression(step["numerator"], FORMULA_NAMES),
                parse_expression(step["denominator"], FORMULA_NAMES),
            ))
        return steps

    def reduced_system(self, model: str) -> Tuple[List[Poly], List[str], List[str]]:
        """(equations, variables, parameters) of a published reduced system."""
        section = self.data["reduced_systems"][model]
        names = section["variables"] + section["parameters"]
        equations = [parse_expression(e, names) for e in section["equations"]]
        return equations, list(section["variables"]), list(section["parameters"])

    def region_polynomial(self, key: str) -> Poly:
        """`linear_equation`, `core` or `exclusion_d1` over (x4, x5, k17, k19)."""
        return parse_expression(self.data["region_system"][key], REGION_NAMES)

    def boundary_degrees(self) -> Dict[str, int]:
        return dict(self.data["region_system"]["boundary_degrees"])

    def reference_points(self) -> List[Dict[str, Any]]:
        """Published steady states with exact decimal values."""
        points = []
        for point in self.data["reference_points"]["points"]:
            fixed = {k: to_rational(v) for k, v in self.data["reference_points"]["fixed"].items()}
            fixed["k19"] = to_rational(point["k19"])
            points.append({
                "name": point["name"],
                "parameters": fixed,
                "stability": point["stability"],
                "values": {k: to_rational(v) for k, v in point["values"].items()},
                "digits": {k: len(v.replace(".", "").replace("-", "").lstrip("0"))
                           for k, v in point["values"].items()},
            })
        return points

    def transitions(self) -> Dict[str, Dict[str, Any]]:
        return dict(self.data["transitions"])

    def sampling_ranges(self) -> Dict[str, Dict[str, Any]]:
        return dict(self.data["sampling_ranges"])


def load_fixtures(path: Optional[Union[str, Path]] = None, verify: bool = True) -> FixtureSet:
    """Load the fixture file, checking it against its recorded sha256."""
    fixture_path = Path(path) if path else DATA_DIR / "fixtures.yaml"
    checksum_path = fixture_path.with_name(fixture_path.name + ".sha256")

    if verify:
        expected = checksum_path.read_text().split()[0]
        actual = _checksum(fixture_path)
        if actual != expected:
            logger.error(f"Fixture checksum mismatch for {fixture_path}: {actual} != {expected}")
            raise FixtureChecksumMismatch(
                f"{fixture_path.name} checksum {actual} does not match {expected}"
            )

    with open(fixture_path) as f:
        data = yaml.safe_load(f)
    return FixtureSet(data=data)
