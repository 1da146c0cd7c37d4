"""
Serialization of analysis results: canonical polynomial text, CSV grids and JSON reports.

Exact rationals are written to JSON as "num/den" strings; decimal renderings
sit next to them for reading.
"""
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field

from ..core.intervals import RatInterval
from ..core.poly import canonical_text
from ..core.rational import decimal_string
from ..core.realroots import AlgebraicNumber
from ..services.elimination_service import ReducedSystem
from ..services.pointsolve_service import FixedPointRecord, GridResult
from ..services.region_service import CorePolynomialSystem, ProbeResult, RegionReport

logger = logging.getLogger(__name__)

__all__ = [
    "canonical_text",
    "rational_text",
    "grid_frame",
    "write_grid_csv",
    "reduced_system_report",
    "fixed_point_reports",
    "region_report",
    "roots_report",
    "write_json",
]


def rational_text(value: Optional[Fraction]) -> Optional[str]:
    """Exact "num/den" form; None stays None."""
    if value is None:
        return None
    return f"{value.numerator}/{value.denominator}"


class IntervalModel(BaseModel):
    lo: str
    hi: str
    decimal: str

    @classmethod
    def from_interval(cls, iv: RatInterval, digits: int) -> "IntervalModel":
        return cls(lo=rational_text(iv.lo), hi=rational_text(iv.hi),
                   decimal=decimal_string(iv.midpoint, digits))


class FormulaModel(BaseModel):
    variable: str
    numerator: str
    denominator: str


class ReducedSystemModel(BaseModel):
    model: str
    variables: List[str]
    parameters: List[str]
    cover: List[str]
    eliminated: List[str]
    equations: List[str]
    formulas: List[FormulaModel]
    side_conditions: List[str] = Field(default_factory=list)
    edges: List[List[str]] = Field(default_factory=list)


class StabilityModel(BaseModel):
    classification: str
    rhp_count: Optional[int] = None
    eigenvalues: List[str] = Field(default_factory=list)


class FixedPointModel(BaseModel):
    parameters: Dict[str, str]
    status: str
    coordinates: Dict[str, IntervalModel]
    stability: Optional[StabilityModel] = None


class CellModel(BaseModel):
    base_index: int
    stack_index: int
    sample: Dict[str, str]
    base_bounds: List[Optional[str]]
    stack_bounds: List[Optional[str]]
    classification: str
    solutions: int
    delineable: Optional[bool] = None
    conditions: List[str] = Field(default_factory=list)


class ProbeModel(BaseModel):
    first: Dict[str, str]
    second: Dict[str, str]
    counts: List[int]
    signs: List[int]
    consistent: bool


class RegionReportModel(BaseModel):
    parameters: List[str]
    base_axis: str
    fixed: Dict[str, str]
    core_variable: str
    linear_equation: str
    core: str
    projection: List[str]
    summary: Dict[str, int]
    cells: List[CellModel]
    boundary: Optional[str] = None
    probes: List[ProbeModel] = Field(default_factory=list)


class RootModel(BaseModel):
    lo: str
    hi: str
    decimal: str


class RootsModel(BaseModel):
    polynomial: str
    roots: List[RootModel]


def grid_frame(result: GridResult, digits: int = 6) -> pd.DataFrame:
    """One row per lattice point: swept parameters, count, status."""
    names = result.parameter_names
    rows = []
    for entry in sorted(result.entries, key=lambda e: e.index):
        row = {k: decimal_string(entry.point[k], digits) for k in names}
        row["count"] = entry.count
        row["status"] = entry.status.value
        rows.append(row)
    return pd.DataFrame(rows, columns=names + ["count", "status"])


def write_grid_csv(result: GridResult, path: Union[str, Path], digits: int = 6) -> Path:
    path = Path(path)
    frame = grid_frame(result, digits)
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} grid points to {path}")
    return path


def reduced_system_report(rs: ReducedSystem, model_name: str) -> ReducedSystemModel:
    formulas = [
        FormulaModel(variable=step.variable,
                     numerator=canonical_text(step.numerator, normalize=False),
                     denominator=canonical_text(step.denominator, normalize=False))
        for step in rs.trace
    ]
    edges = [list(e) for e in rs.graph.sorted_edges()] if rs.graph is not None else []
    return ReducedSystemModel(
        model=model_name,
        variables=list(rs.variables),
        parameters=list(rs.parameters),
        cover=list(rs.cover),
        eliminated=list(rs.eliminated),
        equations=[canonical_text(e) for e in rs.equations],
        formulas=formulas,
        side_conditions=[f"{canonical_text(c.polynomial)} > 0" for c in rs.side_conditions],
        edges=edges,
    )


def _stability_model(verdict) -> Optional[StabilityModel]:
    if verdict is None:
        return None
    return StabilityModel(
        classification=verdict.classification.value,
        rhp_count=verdict.rhp_count,
        eigenvalues=[f"{z.real:.6g}{z.imag:+.6g}j" for z in verdict.eigenvalues],
    )


def fixed_point_reports(records: Sequence[FixedPointRecord], digits: int = 6) -> List[FixedPointModel]:
    return [
        FixedPointModel(
            parameters={k: rational_text(v) for k, v in r.parameters.items()},
            status=r.positivity.value,
            coordinates={k: IntervalModel.from_interval(iv, digits)
                         for k, iv in r.enclosures.items()},
            stability=_stability_model(r.stability),
        )
        for r in records
    ]


def region_report(report: RegionReport, cps: CorePolynomialSystem,
                  boundary=None, probes: Sequence[ProbeResult] = ()) -> RegionReportModel:
    cells = [
        CellModel(
            base_index=c.base_index,
            stack_index=c.stack_index,
            sample={k: rational_text(v) for k, v in c.sample.items()},
            base_bounds=[rational_text(b) for b in c.base_bounds],
            stack_bounds=[rational_text(b) for b in c.stack_bounds],
            classification=c.classification.value,
            solutions=c.solutions,
            delineable=c.delineable,
            conditions=c.description(report.projection),
        )
        for c in report.cells
    ]
    return RegionReportModel(
        parameters=list(report.parameters),
        base_axis=report.base_axis,
        fixed={k: rational_text(v) for k, v in report.fixed.items()},
        core_variable=cps.core_variable,
        linear_equation=canonical_text(cps.linear_equation),
        core=canonical_text(cps.core),
        projection=[canonical_text(p) for p in report.projection.polynomials],
        summary=report.summary(),
        cells=cells,
        boundary=None if boundary is None else canonical_text(boundary),
        probes=[
            ProbeModel(first={k: rational_text(v) for k, v in p.first.items()},
                       second={k: rational_text(v) for k, v in p.second.items()},
                       counts=list(p.counts), signs=list(p.signs), consistent=p.consistent)
            for p in probes
        ],
    )


def roots_report(polynomial, roots: Sequence[AlgebraicNumber], digits: int = 6) -> RootsModel:
    return RootsModel(
        polynomial=canonical_text(polynomial),
        roots=[RootModel(lo=rational_text(r.lo), hi=rational_text(r.hi),
                         decimal=r.approximate(digits)) for r in roots],
    )


def write_json(report: BaseModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote report to {path}")
    return path
