"""
Stability service: Routh-Hurwitz classification of steady states.

The conservation laws are solved for a chosen set of variables, the
vector field is restricted to the remaining variables and its Jacobian is
built symbolically. At a steady state the Jacobian is evaluated at rational
points of the enclosure and the characteristic polynomial is computed
exactly; the Routh table counts eigenvalues with positive real part.
"""
import asyncio
import logging
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
from sympy import Poly, QQ
from sympy.polys.matrices import DomainMatrix

from ..core.intervals import RatInterval, point_eval
from ..core.poly import constant, derivative, make_poly, substitute, symbol, univariate_from_coeffs
from ..core.rational import to_domain, to_rational
from ..errors import LawsNotSolvable, MultistatError
from ..models.laws import ConservationLaw
from ..models.model_file import ModelFile
from ..utils.config import SolverConfig, StabilityConfig
from .elimination_service import ReducedSystem
from .pointsolve_service import FixedPointRecord, RecordStatus, enclose, solve_at_point

logger = logging.getLogger(__name__)

LAMBDA = "lam"


class Stability(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNDETERMINED = "undetermined"


@dataclass
class StabilityVerdict:
    """Number of eigenvalues with positive real part, or None when undecided."""
    rhp_count: Optional[int]
    classification: Stability
    eigenvalues: List[complex] = field(default_factory=list)

    def __str__(self) -> str:
        if self.rhp_count is None:
            return self.classification.value
        return f"{self.classification.value} ({self.rhp_count} in right half-plane)"


@dataclass
class ReducedJacobian:
    """Jacobian of the law-reduced vector field over the surviving variables."""
    variables: List[str]
    entries: List[List[Poly]]
    eliminated: Dict[str, Poly]

    @property
    def size(self) -> int:
        return len(self.variables)

    def evaluate(self, point: Mapping[str, Fraction]) -> DomainMatrix:
        rows = [[to_domain(point_eval(e, point)) for e in row] for row in self.entries]
        n = self.size
        return DomainMatrix(rows, (n, n), QQ)


def solve_laws(laws: Sequence[ConservationLaw], eliminate: Sequence[str],
               names: Sequence[str]) -> Dict[str, Poly]:
    """Express the `eliminate` variables through the laws as linear polynomials."""
    eliminate = list(eliminate)
    if len(laws) != len(eliminate):
        raise LawsNotSolvable(f"{len(laws)} laws cannot determine {len(eliminate)} variables")
    if not laws:
        return {}
    variables = laws[0].variables
    missing = [v for v in eliminate if v not in variables]
    if missing:
        raise LawsNotSolvable(f"unknown variables {', '.join(missing)}")

    index = [variables.index(v) for v in eliminate]
    a = DomainMatrix([[to_domain(law.coefficients[i]) for i in index] for law in laws],
                     (len(laws), len(eliminate)), QQ)
    if a.rank() < len(eliminate):
        logger.error(f"Laws are singular in {eliminate}")
        raise LawsNotSolvable(f"the laws do not determine {', '.join(eliminate)}")
    inverse = a.inv().to_list()

    # law j: sum_E c_je x_e = k_j - sum_rest c_ji x_i
    rhs = []
    for law in laws:
        r = make_poly(symbol(law.constant), names)
        for v, c in zip(variables, law.coefficients):
            if c and v not in eliminate:
                r = r - make_poly(symbol(v), names).mul_ground(to_domain(c))
        rhs.append(r)

    solved = {}
    for row, v in zip(inverse, eliminate):
        total = constant(0, names)
        for coeff, r in zip(row, rhs):
            if coeff:
                total = total + r.mul_ground(coeff)
        solved[v] = total
    return solved


def reduced_jacobian(model: ModelFile, laws: Optional[Sequence[ConservationLaw]] = None,
                     eliminate: Optional[Sequence[str]] = None) -> ReducedJacobian:
    """Jacobian of the vector field after solving the laws for `eliminate`."""
    laws = list(model.laws if laws is None else laws)
    eliminate = list(eliminate or [])
    names = model.names
    for law in laws:
        if law.constant not in names:
            names = names + [law.constant]

    solved = solve_laws(laws, eliminate, names)
    field_polys = [make_poly(f.as_expr(), names) for f in model.bound_vector_field()]
    surviving = [v for v in model.variables if v not in eliminate]

    reduced = []
    for v, f in zip(model.variables, field_polys):
        if v in eliminate:
            continue
        for e, value in solved.items():
            f = substitute(f, e, value)
        reduced.append(f)

    entries = [[derivative(f, x) for x in surviving] for f in reduced]
    logger.debug(f"Reduced Jacobian of size {len(surviving)} after eliminating {eliminate}")
    return ReducedJacobian(surviving, entries, solved)


def char_poly(jacobian, point: Optional[Mapping[str, Any]] = None) -> Poly:
    """det(lam*I - J) with exact rational coefficients.

    `jacobian` is either a ReducedJacobian evaluated at `point` or a square
    matrix of rationals given as nested lists.
    """
    if isinstance(jacobian, ReducedJacobian):
        point = {k: to_rational(v) for k, v in (point or {}).items()}
        matrix = jacobian.evaluate(point)
    else:
        rows = [[to_domain(v) for v in row] for row in jacobian]
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("the matrix is not square")
        matrix = DomainMatrix(rows, (len(rows), len(rows)), QQ)
    coeffs = matrix.charpoly()
    return univariate_from_coeffs([to_rational(c) for c in reversed(coeffs)], LAMBDA)


def rhp_count(p: Poly) -> StabilityVerdict:
    """Roots with positive real part from the Routh table; zero pivots are undetermined."""
    if p.is_zero:
        raise ValueError("the zero polynomial has no Routh table")
    coeffs = [to_rational(c) for c in p.all_coeffs()]
    if coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    n = len(coeffs) - 1
    if n == 0:
        return StabilityVerdict(0, Stability.STABLE)

    width = n // 2 + 1
    first = coeffs[0::2] + [Fraction(0)] * (width - len(coeffs[0::2]))
    second = coeffs[1::2] + [Fraction(0)] * (width - len(coeffs[1::2]))
    column = [first[0]]
    rows = [first, second]
    for _ in range(n):
        upper, lower = rows[-2], rows[-1]
        if lower[0] == 0:
            return StabilityVerdict(None, Stability.UNDETERMINED)
        column.append(lower[0])
        nxt = [
            (lower[0] * upper[j + 1] - upper[0] * lower[j + 1]) / lower[0]
            for j in range(width - 1)
        ] + [Fraction(0)]
        rows.append(nxt)

    changes = sum(1 for a, b in zip(column, column[1:]) if (a > 0) != (b > 0))
    verdict = Stability.STABLE if changes == 0 else Stability.UNSTABLE
    return StabilityVerdict(changes, verdict)


def numeric_eigenvalues(jacobian: ReducedJacobian, point: Mapping[str, Fraction]) -> List[complex]:
    """Floating-point eigenvalues, for display only."""
    matrix = np.array([[float(point_eval(e, point)) for e in row] for row in jacobian.entries],
                      dtype=float)
    values = np.linalg.eigvals(matrix)
    return sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))


def _corner(enclosures: Mapping[str, RatInterval], which: str) -> Dict[str, Fraction]:
    return {k: (iv.lo if which == "lo" else iv.hi) for k, iv in enclosures.items()}


def _verdict_at(jacobian: ReducedJacobian, enclosures: Mapping[str, RatInterval],
                parameters: Mapping[str, Fraction]) -> StabilityVerdict:
    verdicts = []
    for which in ("mid", "lo", "hi"):
        if which == "mid":
            point = {k: iv.midpoint for k, iv in enclosures.items()}
        else:
            point = _corner(enclosures, which)
        verdicts.append(rhp_count(char_poly(jacobian, {**parameters, **point})))
    counts = {v.rhp_count for v in verdicts}
    if None in counts or len(counts) != 1:
        return StabilityVerdict(None, Stability.UNDETERMINED)
    return verdicts[0]


def classify_record(record: FixedPointRecord, jacobian: ReducedJacobian, rs: ReducedSystem,
                    budget: int = 4, start_width=None) -> StabilityVerdict:
    """Verdict at one steady state, refining the enclosure until it is stable to perturbation."""
    if record.positivity != RecordStatus.ALL_POSITIVE:
        return StabilityVerdict(None, Stability.UNDETERMINED)
    width = to_rational(start_width) if start_width is not None else Fraction(1, 10 ** 12)
    enclosures = dict(record.enclosures)
    verdict = StabilityVerdict(None, Stability.UNDETERMINED)
    for _ in range(budget + 1):
        needed = {v: enclosures[v] for v in jacobian.variables}
        verdict = _verdict_at(jacobian, needed, record.parameters)
        if verdict.classification != Stability.UNDETERMINED:
            break
        width = width / Fraction(10) ** 6
        enclosures = enclose(record, rs, width)
    midpoint = {**record.parameters,
                **{v: enclosures[v].midpoint for v in jacobian.variables}}
    verdict.eigenvalues = numeric_eigenvalues(jacobian, midpoint)
    return verdict


def classify_fixed_points(records: Sequence[FixedPointRecord], jacobian: ReducedJacobian,
                          rs: ReducedSystem, budget: int = 4) -> List[FixedPointRecord]:
    """Attach a stability verdict to every record."""
    for record in records:
        record.stability = classify_record(record, jacobian, rs, budget)
        logger.debug(f"Stability verdict: {record.stability}")
    return list(records)


def is_bistable(records: Sequence[FixedPointRecord]) -> bool:
    """Two or more certified positive stable steady states."""
    stable = [r for r in records
              if r.stability is not None and r.stability.classification == Stability.STABLE]
    return len(stable) >= 2


@dataclass
class PointAnalysis:
    """Steady states at a parameter point with their stability verdicts."""
    parameters: Dict[str, Fraction]
    records: List[FixedPointRecord]

    @property
    def bistable(self) -> bool:
        return is_bistable(self.records)


def analyze_point(model: ModelFile, rs: ReducedSystem, values: Mapping[str, Any],
                  solver: Optional[SolverConfig] = None,
                  config: Optional[StabilityConfig] = None) -> PointAnalysis:
    """Solve at a parameter point and classify every positive steady state."""
    config = config or StabilityConfig()
    params = {k: to_rational(v) for k, v in values.items()}
    records = solve_at_point(rs, params, solver)
    jacobian = reduced_jacobian(model, model.laws, config.eliminate)
    classify_fixed_points(records, jacobian, rs, config.budget)
    return PointAnalysis(params, records)


class StabilityService:
    """Asynchronous front end for stability classification."""

    def __init__(self, config: StabilityConfig, solver: SolverConfig):
        self.config = config
        self.solver = solver
        self.stats = {
            'points_analyzed': 0,
            'records_classified': 0,
            'undetermined': 0,
            'errors': 0
        }

    async def analyze(self, model: ModelFile, rs: ReducedSystem,
                      values: Mapping[str, Any]) -> PointAnalysis:
        start_time = datetime.utcnow()
        try:
            analysis = await asyncio.to_thread(analyze_point, model, rs, values,
                                               self.solver, self.config)
        except MultistatError as e:
            logger.error(f"Stability analysis failed at {dict(values)}: {e}")
            self.stats['errors'] += 1
            raise

        self.stats['points_analyzed'] += 1
        self.stats['records_classified'] += len(analysis.records)
        self.stats['undetermined'] += sum(
            1 for r in analysis.records
            if r.stability is None or r.stability.classification == Stability.UNDETERMINED
        )
        duration = (datetime.utcnow() - start_time).total_seconds()
        logger.info(f"Stability analysis completed in {duration:.2f}s")
        return analysis

    def get_stats(self) -> Dict[str, int]:
        return dict(self.stats)
