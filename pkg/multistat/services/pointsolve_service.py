"""
Point solving service: positive steady states of a reduced system at fixed
parameter values, and lattice sampling over parameter boxes.

At a parameter point the reduced system is two equations in two unknowns.
One unknown is eliminated by a resultant, the positive roots of the
resultant are isolated exactly, each root is paired with its partner
coordinate and the elimination trace recovers the remaining coordinates.
"""
import asyncio
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy import Poly

from ..core.intervals import RatInterval, interval_eval
from ..core.poly import (
    as_univariate, coefficients_in, degree_in, derivative, resultant, variables as poly_variables,
)
from ..core.realroots import (
    AlgebraicNumber, positive_roots, refine, sign_at,
)
from ..core.rational import decimal_string, format_rational, to_rational
from ..errors import (
    DenominatorStraddlesZero, MultistatError, NotBivariate, ResultantVanishes,
)
from ..utils.config import SamplingConfig, SolverConfig
from .elimination_service import BackSubstitution, ReducedSystem, back_substitute

logger = logging.getLogger(__name__)

# refinement stages while pairing, as powers of ten above the final width
PAIRING_STAGES = (30, 24, 18, 12, 6, 0)


class RecordStatus(str, Enum):
    ALL_POSITIVE = "all_positive"
    REJECTED = "rejected"
    UNDETERMINED = "undetermined"


class PointStatus(str, Enum):
    OK = "ok"
    UNDETERMINED = "undetermined"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class SampleRange:
    """Arithmetic progression start, start+step, ... <= stop for one parameter."""
    name: str
    start: Fraction
    stop: Fraction
    step: Fraction

    def __post_init__(self):
        start, stop, step = (to_rational(v) for v in (self.start, self.stop, self.step))
        if step <= 0:
            raise ValueError(f"step of {self.name} must be positive")
        if start > stop:
            raise ValueError(f"range of {self.name} is empty: {start} > {stop}")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "stop", stop)
        object.__setattr__(self, "step", step)

    @classmethod
    def parse(cls, text: str) -> "SampleRange":
        """Parse `name=start:stop:step`."""
        name, eq, spec = text.partition("=")
        parts = spec.split(":")
        if not eq or len(parts) != 3 or not name.strip():
            raise ValueError(f"expected name=start:stop:step, got {text!r}")
        return cls(name.strip(), *(to_rational(p) for p in parts))

    def values(self) -> List[Fraction]:
        count = int((self.stop - self.start) // self.step) + 1
        return [self.start + i * self.step for i in range(count)]

    def __len__(self) -> int:
        return len(self.values())


@dataclass(frozen=True)
class PairEnclosure:
    """How to enclose a solution's two surviving coordinates at any width.

    `alpha` is a root of the resultant in `x`. The partner `y` is either an
    isolated root `beta`, or the quotient -c0/c1 of a linear equation.
    """
    x: str
    y: str
    alpha: AlgebraicNumber
    beta: Optional[AlgebraicNumber] = None
    c0: Optional[Poly] = None
    c1: Optional[Poly] = None

    def box_at(self, width: Fraction) -> Dict[str, RatInterval]:
        alpha = refine(self.alpha, width)
        if self.beta is not None:
            return {self.x: alpha.interval, self.y: refine(self.beta, width).interval}
        box = {self.x: alpha.interval}
        den = interval_eval(self.c1, box)
        if den.contains_zero():
            raise DenominatorStraddlesZero(self.y)
        return {self.x: alpha.interval, self.y: (-interval_eval(self.c0, box)) / den}


@dataclass
class FixedPointRecord:
    """A positive-candidate steady state with exact enclosures."""
    parameters: Dict[str, Fraction]
    enclosures: Dict[str, RatInterval]
    positivity: RecordStatus
    pair: PairEnclosure
    stability: Optional[Any] = None

    def midpoint(self, name: str) -> Fraction:
        return self.enclosures[name].midpoint

    def as_dict(self, digits: int = 6) -> Dict[str, Any]:
        return {
            'parameters': {k: format_rational(v) for k, v in self.parameters.items()},
            'coordinates': {k: decimal_string(iv.midpoint, digits)
                            for k, iv in self.enclosures.items()},
            'positivity': self.positivity.value,
            'stability': None if self.stability is None else str(self.stability),
        }


def choose_elimination_variable(equations: Sequence[Poly], names: Sequence[str]) -> str:
    """Prefer a variable in which some equation is linear, then the lower maximal degree."""
    for v in names:
        if any(degree_in(e, v) == 1 for e in equations):
            return v
    return min(names, key=lambda v: (max(degree_in(e, v) for e in equations), names.index(v)))


def _check_shape(equations: Sequence[Poly], names: Sequence[str]) -> None:
    if len(equations) != 2 or len(names) != 2:
        raise NotBivariate(f"expected 2 equations in 2 unknowns, got {len(equations)} in {len(names)}")
    for e in equations:
        extra = [v for v in poly_variables(e) if v not in names]
        if extra:
            raise NotBivariate(f"unbound parameters remain: {', '.join(extra)}")


def _stage_widths(final: Fraction) -> List[Fraction]:
    return [final * Fraction(10) ** k for k in PAIRING_STAGES]


def _linear_partner(equations: Sequence[Poly], y: str) -> Optional[Tuple[Poly, Poly]]:
    for e in equations:
        if degree_in(e, y) == 1:
            c0, c1 = coefficients_in(e, y)
            return c0, c1
    return None


def _pair_linear(x: str, y: str, alpha: AlgebraicNumber, c0: Poly, c1: Poly,
                 final: Fraction) -> Tuple[Optional[PairEnclosure], RecordStatus]:
    """The partner is -c0/c1 at alpha; decide its sign by refinement."""
    pair = PairEnclosure(x=x, y=y, alpha=alpha, c0=c0, c1=c1)
    enclosed = False
    for width in _stage_widths(final):
        try:
            beta = pair.box_at(width)[y]
        except DenominatorStraddlesZero:
            continue
        enclosed = True
        if beta.is_positive():
            return pair, RecordStatus.ALL_POSITIVE
        if beta.is_nonpositive():
            return None, RecordStatus.REJECTED
    if not enclosed:
        return None, RecordStatus.UNDETERMINED
    return pair, RecordStatus.UNDETERMINED


def _pair_generic(equations: Sequence[Poly], x: str, y: str, alpha: AlgebraicNumber,
                  partners: Sequence[AlgebraicNumber],
                  final: Fraction) -> Tuple[Optional[PairEnclosure], RecordStatus]:
    """Keep partners whose joint box still admits a zero of both equations."""
    alive = list(partners)
    for width in _stage_widths(final):
        a = refine(alpha, width)
        survivors = []
        for b in alive:
            b = refine(b, width)
            box = {x: a.interval, y: b.interval}
            if all(interval_eval(e, box).contains_zero() for e in equations):
                survivors.append(b)
        alive = survivors
        if not alive:
            return None, RecordStatus.REJECTED
    if len(alive) == 1:
        return PairEnclosure(x=x, y=y, alpha=alpha, beta=alive[0]), RecordStatus.ALL_POSITIVE
    logger.debug(f"{len(alive)} partners for {x} in {alpha.interval} at width {final}")
    return PairEnclosure(x=x, y=y, alpha=alpha, beta=alive[0]), RecordStatus.UNDETERMINED


def solve_at_point(
    rs: ReducedSystem,
    values: Mapping[str, Any],
    solver: Optional[SolverConfig] = None,
    eliminate: Optional[str] = None,
) -> List[FixedPointRecord]:
    """All positive solutions of the reduced system at a parameter point.

    Rejected candidates are dropped; undetermined ones are returned with
    that status.
    """
    solver = solver or SolverConfig()
    params = {k: to_rational(v) for k, v in values.items()}
    equations = rs.specialize(params)
    names = list(rs.variables)

    if any(e.is_zero for e in equations):
        raise ResultantVanishes("an equation vanishes identically at this point")
    if any(not poly_variables(e) for e in equations):
        # nonzero constant equation: no solutions
        return []
    _check_shape(equations, names)

    y = eliminate or choose_elimination_variable(equations, names)
    if y not in names:
        raise ValueError(f"{y} is not a surviving variable")
    x = next(v for v in names if v != y)

    r = resultant(equations[0], equations[1], y)
    if r.is_zero:
        raise ResultantVanishes(f"resultant in {x} vanishes identically")
    r_x = as_univariate(r, x)
    if r_x.degree() < 1:
        return []

    alphas = positive_roots(r_x)
    linear = _linear_partner(equations, y)
    partners: List[AlgebraicNumber] = []
    if linear is None:
        r_y = resultant(equations[0], equations[1], x)
        if r_y.is_zero:
            raise ResultantVanishes(f"resultant in {y} vanishes identically")
        partners = positive_roots(as_univariate(r_y, y)) if poly_variables(r_y) else []

    final = solver.pair_width_value
    point_box = {k: RatInterval.point(v) for k, v in params.items()}
    records: List[FixedPointRecord] = []
    for alpha in alphas:
        if linear is not None:
            pair, status = _pair_linear(x, y, alpha, linear[0], linear[1], final)
        else:
            pair, status = _pair_generic(equations, x, y, alpha, partners, final)
        if pair is None:
            if status == RecordStatus.UNDETERMINED:
                logger.warning(f"Partner of {x} in {alpha.interval} could not be enclosed")
                records.append(FixedPointRecord(params, {x: alpha.interval},
                                                RecordStatus.UNDETERMINED,
                                                PairEnclosure(x=x, y=y, alpha=alpha)))
            continue

        def refined(attempt: int, pair=pair) -> Dict[str, RatInterval]:
            return {**point_box, **pair.box_at(final / Fraction(10) ** (6 * attempt))}

        try:
            result = back_substitute(rs.trace, refined(0), solver.tolerance_value,
                                     refined, solver.refine_budget)
        except DenominatorStraddlesZero as e:
            logger.warning(f"Undetermined solution at {x} in {alpha.interval}: {e}")
            records.append(FixedPointRecord(params, {x: alpha.interval},
                                            RecordStatus.UNDETERMINED, pair))
            continue

        record = _record_from(params, result, status, pair)
        if record.positivity != RecordStatus.REJECTED:
            records.append(record)

    logger.debug(f"{sum(r.positivity == RecordStatus.ALL_POSITIVE for r in records)} positive "
                 f"solutions at {_point_label(params)}")
    return records


def _record_from(params: Dict[str, Fraction], result: BackSubstitution,
                 status: RecordStatus, pair: PairEnclosure) -> FixedPointRecord:
    enclosures = {k: v for k, v in result.enclosures.items() if k not in params}
    if result.any_nonpositive:
        positivity = RecordStatus.REJECTED
    elif status == RecordStatus.UNDETERMINED or not result.all_positive:
        positivity = RecordStatus.UNDETERMINED
    else:
        positivity = RecordStatus.ALL_POSITIVE
    return FixedPointRecord(params, enclosures, positivity, pair)


def enclose(record: FixedPointRecord, rs: ReducedSystem, width) -> Dict[str, RatInterval]:
    """Enclosures of every coordinate with the surviving pair refined to `width`."""
    box = {k: RatInterval.point(v) for k, v in record.parameters.items()}
    box.update(record.pair.box_at(to_rational(width)))
    result = back_substitute(rs.trace, box)
    return {k: v for k, v in result.enclosures.items() if k not in record.parameters}


def _point_label(point: Mapping[str, Fraction]) -> str:
    return ", ".join(f"{k}={format_rational(v)}" for k, v in point.items())


def count_positive(records: Sequence[FixedPointRecord]) -> int:
    return sum(1 for r in records if r.positivity == RecordStatus.ALL_POSITIVE)


def point_has_double_root(rs: ReducedSystem, values: Mapping[str, Any],
                          records: Sequence[FixedPointRecord]) -> bool:
    """True when an accepted coordinate is a multiple root of its resultant."""
    if not records:
        return False
    params = {k: to_rational(v) for k, v in values.items()}
    equations = rs.specialize(params)
    pair = records[0].pair
    r = as_univariate(resultant(equations[0], equations[1], pair.y), pair.x)
    g = r.gcd(derivative(r, pair.x))
    if g.degree() < 1:
        return False
    return any(sign_at(g, rec.pair.alpha) == 0 for rec in records)


@dataclass
class GridEntry:
    index: int
    point: Dict[str, Fraction]
    count: int
    status: PointStatus
    message: str = ""


@dataclass
class GridResult:
    """One entry per lattice point, in lattice order."""
    ranges: List[SampleRange]
    fixed: Dict[str, Fraction]
    entries: List[GridEntry] = field(default_factory=list)

    @property
    def parameter_names(self) -> List[str]:
        return [r.name for r in self.ranges]

    def counts(self) -> Dict[Tuple[Fraction, ...], int]:
        return {tuple(e.point[n] for n in self.parameter_names): e.count for e in self.entries}

    def status_counts(self) -> Dict[str, int]:
        totals: Dict[str, int] = {}
        for e in self.entries:
            totals[e.status.value] = totals.get(e.status.value, 0) + 1
        return totals


def lattice(ranges: Sequence[SampleRange]) -> List[Dict[str, Fraction]]:
    """Lattice points in row-major order over the ranges."""
    names = [r.name for r in ranges]
    return [dict(zip(names, values)) for values in itertools.product(*(r.values() for r in ranges))]


def evaluate_point(rs: ReducedSystem, index: int, point: Mapping[str, Fraction],
                   fixed: Mapping[str, Fraction], solver: SolverConfig,
                   eliminate: Optional[str] = None) -> GridEntry:
    """Solve at one lattice point, turning failures into status flags."""
    values = {**fixed, **point}
    try:
        records = solve_at_point(rs, values, solver, eliminate)
    except ResultantVanishes as e:
        return GridEntry(index, dict(point), 0, PointStatus.DEGENERATE, str(e))
    except DenominatorStraddlesZero as e:
        return GridEntry(index, dict(point), 0, PointStatus.UNDETERMINED, str(e))

    count = count_positive(records)
    if any(r.positivity == RecordStatus.UNDETERMINED for r in records):
        return GridEntry(index, dict(point), count, PointStatus.UNDETERMINED,
                         "unresolved candidate solution")
    if point_has_double_root(rs, values, records):
        return GridEntry(index, dict(point), count, PointStatus.DEGENERATE,
                         "solution on a multiple root")
    return GridEntry(index, dict(point), count, PointStatus.OK)


# Worker-process state, set once per process by the pool initializer
_WORKER: Dict[str, Any] = {}


def _init_worker(rs: ReducedSystem, fixed: Dict[str, Fraction], solver: SolverConfig,
                 eliminate: Optional[str]) -> None:
    _WORKER.update(rs=rs, fixed=fixed, solver=solver, eliminate=eliminate)


def _worker_task(task: Tuple[int, Dict[str, Fraction]]) -> GridEntry:
    index, point = task
    return evaluate_point(_WORKER["rs"], index, point, _WORKER["fixed"],
                          _WORKER["solver"], _WORKER["eliminate"])


def grid_sample(
    rs: ReducedSystem,
    ranges: Sequence[SampleRange],
    fixed: Mapping[str, Any],
    solver: Optional[SolverConfig] = None,
    sampling: Optional[SamplingConfig] = None,
    eliminate: Optional[str] = None,
) -> GridResult:
    """Count positive solutions at every lattice point of the ranges."""
    solver = solver or SolverConfig()
    sampling = sampling or SamplingConfig()
    fixed = {k: to_rational(v) for k, v in fixed.items()}
    ranges = list(ranges)

    swept = {r.name for r in ranges}
    missing = [k for k in rs.parameters if k not in swept and k not in fixed]
    if missing:
        raise ValueError(f"parameters neither swept nor fixed: {', '.join(missing)}")
    overlap = swept & set(fixed)
    if overlap:
        raise ValueError(f"parameters both swept and fixed: {', '.join(sorted(overlap))}")

    tasks = list(enumerate(lattice(ranges)))
    logger.info(f"Sampling {len(tasks)} lattice points with {sampling.threads} worker(s)")

    if sampling.threads <= 1 or len(tasks) <= 1:
        entries = [evaluate_point(rs, i, p, fixed, solver, eliminate) for i, p in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=sampling.threads,
            initializer=_init_worker,
            initargs=(rs, fixed, solver, eliminate),
        ) as executor:
            entries = list(executor.map(_worker_task, tasks, chunksize=max(sampling.chunk_size, 1)))

    entries.sort(key=lambda e: e.index)
    result = GridResult(ranges=ranges, fixed=fixed, entries=entries)
    logger.info(f"Sampling finished: {result.status_counts()}")
    return result


class SamplingService:
    """Asynchronous front end for point solving and grid sampling."""

    def __init__(self, solver: SolverConfig, sampling: SamplingConfig):
        self.solver = solver
        self.sampling = sampling
        self.stats = {
            'points_solved': 0,
            'grids_sampled': 0,
            'lattice_points': 0,
            'errors': 0
        }

    async def solve(self, rs: ReducedSystem, values: Mapping[str, Any],
                    eliminate: Optional[str] = None) -> List[FixedPointRecord]:
        start_time = datetime.utcnow()
        try:
            records = await asyncio.to_thread(solve_at_point, rs, values, self.solver, eliminate)
        except MultistatError as e:
            logger.error(f"Solving at {dict(values)} failed: {e}")
            self.stats['errors'] += 1
            raise
        self.stats['points_solved'] += 1
        duration = (datetime.utcnow() - start_time).total_seconds()
        logger.debug(f"Point solve completed in {duration:.2f}s")
        return records

    async def sample(self, rs: ReducedSystem, ranges: Sequence[SampleRange],
                     fixed: Mapping[str, Any], eliminate: Optional[str] = None) -> GridResult:
        start_time = datetime.utcnow()
        result = await asyncio.to_thread(grid_sample, rs, ranges, fixed, self.solver,
                                         self.sampling, eliminate)
        self.stats['grids_sampled'] += 1
        self.stats['lattice_points'] += len(result.entries)
        duration = (datetime.utcnow() - start_time).total_seconds()
        logger.info(f"Grid of {len(result.entries)} points completed in {duration:.2f}s")
        return result

    def get_stats(self) -> Dict[str, int]:
        return dict(self.stats)
