"""
Region service: two-parameter multistationarity regions by open CAD.

The reduced system is specialized to all but two parameters. One unknown
is solved from a linear equation, leaving a single core polynomial in the
other unknown and the two parameters. The core is projected onto the
parameter plane, the plane is decomposed into sign-invariant open cells and
each cell is classified by the number of certified positive solutions at
its sample point.
"""
import asyncio
import itertools
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy import Poly

from ..core.intervals import RatInterval, interval_eval, point_eval
from ..core.poly import (
    as_univariate, coefficients_in, degree_in, discriminant, leading_coefficient, make_poly,
    canonical_text, mentions, primitive_integer, resultant, same_up_to_constant, sign_definite,
    strip_monomial_content, substitute_rational, substitute_values, symbol,
    variables as poly_variables,
)
from ..core.rational import simplest_rational, to_rational
from ..core.realroots import (
    AlgebraicNumber, isolate_real_roots, positive_roots, refine, separate_roots,
)
from ..errors import (
    DegreeTooLow, DenominatorStraddlesZero, MultistatError, NotLinear, SpecializationCollapse,
)
from ..utils.config import RegionConfig, SolverConfig
from .cache_service import ResultCache
from .elimination_service import ReducedSystem, back_substitute
from .pointsolve_service import count_positive, solve_at_point

logger = logging.getLogger(__name__)


class CellClass(str, Enum):
    NO_SOLUTION = "no_solution"
    ONE_SOLUTION = "one_solution"
    MULTISTATIONARY = "multistationary"
    NOT_IN_QUADRANT = "not_in_quadrant"
    UNDETERMINED = "undetermined"


@dataclass
class CorePolynomialSystem:
    """variable = numerator / denominator, and core(core_variable, parameters) = 0."""
    variable: str
    core_variable: str
    numerator: Poly
    denominator: Poly
    core: Poly
    linear_equation: Poly
    parameters: List[str]
    fixed: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def names(self) -> List[str]:
        return [self.variable, self.core_variable] + self.parameters


def _indefinite_factors_in(p: Poly, name: str) -> Poly:
    """Product of irreducible factors that involve `name` and can change sign."""
    _, factors = p.factor_list()
    kept = [f for f, _ in factors if mentions(f, name) and sign_definite(f) == 0]
    if not kept:
        raise NotLinear(f"elimination left no factor in {name}")
    result = kept[0]
    for f in kept[1:]:
        result = result * f
    return primitive_integer(result)


def _subresultant_formula(e1: Poly, e2: Poly, var: str) -> Optional[Tuple[Poly, Poly]]:
    """Degree-one subresultant c1*var + c0, if the chain has one."""
    names = [str(g) for g in e1.gens]
    chain = sympy.subresultants(e1.as_expr(), e2.as_expr(), symbol(var))
    for expr in chain:
        s = make_poly(expr, names)
        if degree_in(s, var) == 1:
            c0, c1 = coefficients_in(s, var)
            return c0, c1
    return None


def eliminate_linear(rs: ReducedSystem, fix: Mapping[str, Any],
                     var: Optional[str] = None) -> CorePolynomialSystem:
    """Solve one unknown from a linear equation and return the core polynomial."""
    fixed = {k: to_rational(v) for k, v in fix.items()}
    equations = rs.specialize(fixed)
    if len(equations) != 2 or len(rs.variables) != 2:
        raise NotLinear(f"expected 2 equations in 2 unknowns, got {len(equations)}")
    parameters = [k for k in rs.parameters if k not in fixed]

    candidates = [var] if var else list(rs.variables)
    for v in candidates:
        core_var = next(u for u in rs.variables if u != v)
        for i, e in enumerate(equations):
            if degree_in(e, v) != 1:
                continue
            other = equations[1 - i]
            c0, c1 = coefficients_in(e, v)
            raw = substitute_rational(other, v, -c0, c1)
            core = _indefinite_factors_in(strip_monomial_content(raw), core_var)
            logger.info(f"Solved {v} linearly; core has degree {degree_in(core, core_var)} "
                        f"in {core_var}")
            return CorePolynomialSystem(v, core_var, -c0, c1, core, e, parameters, fixed)

    for v in candidates:
        core_var = next(u for u in rs.variables if u != v)
        formula = _subresultant_formula(equations[0], equations[1], v)
        if formula is None:
            continue
        c0, c1 = formula
        core = _indefinite_factors_in(resultant(equations[0], equations[1], v), core_var)
        linear = c0 + c1 * make_poly(symbol(v), [str(g) for g in c1.gens])
        logger.info(f"Solved {v} from a degree-one subresultant")
        return CorePolynomialSystem(v, core_var, -c0, c1, core, linear, parameters, fixed)

    raise NotLinear(f"no equation or subresultant is linear in {', '.join(candidates)}")


@dataclass
class ProjectionSet:
    """Squarefree primitive polynomials in the two parameters, distinct up to constants."""
    polynomials: List[Poly]
    parameters: List[str]

    @property
    def max_total_degree(self) -> int:
        return max((p.total_degree() for p in self.polynomials), default=0)

    def __len__(self) -> int:
        return len(self.polynomials)


def _add_projection(bucket: List[Poly], p: Poly, parameters: List[str], factor: bool) -> None:
    if p.is_zero:
        return
    p = make_poly(p.as_expr(), parameters)
    if not poly_variables(p):
        return
    p = primitive_integer(p.sqf_part())
    pieces = [f for f, _ in p.factor_list()[1]] if factor else [p]
    for f in pieces:
        if not poly_variables(f):
            continue
        f = primitive_integer(f)
        if not any(same_up_to_constant(f, g) for g in bucket):
            bucket.append(f)


def project(core: Poly, variable: str, parameters: Sequence[str],
            extra: Optional[Sequence[Poly]] = None, include_parameters: bool = True,
            factor: bool = True) -> ProjectionSet:
    """Coefficients, discriminant and resultants with `extra` of the core in `variable`."""
    parameters = list(parameters)
    if extra is None:
        extra = [make_poly(symbol(variable), [str(g) for g in core.gens])]
    bucket: List[Poly] = []

    for c in coefficients_in(core, variable):
        _add_projection(bucket, c, parameters, factor)
    try:
        _add_projection(bucket, discriminant(core, variable), parameters, factor)
    except DegreeTooLow:
        pass
    for q in extra:
        _add_projection(bucket, resultant(core, q, variable), parameters, factor)
    if include_parameters:
        for k in parameters:
            _add_projection(bucket, make_poly(symbol(k), parameters), parameters, factor)

    ps = ProjectionSet(bucket, parameters)
    logger.info(f"Projection set: {len(ps)} polynomials, max total degree {ps.max_total_degree}")
    return ps


def real_root_basis(polys: Sequence[Poly], name: str) -> List[AlgebraicNumber]:
    """Sorted, disjointly isolated distinct real roots of univariate polynomials."""
    factors: List[Poly] = []
    for p in polys:
        if p.is_zero or p.degree() < 1:
            continue
        for f, _ in p.factor_list()[1]:
            if f.degree() >= 1 and not any(same_up_to_constant(f, g) for g in factors):
                factors.append(f)
    roots = [r for f in factors for r in isolate_real_roots(f)]
    return separate_roots(roots)


def interval_samples(roots: Sequence[AlgebraicNumber]
                     ) -> List[Tuple[Optional[Fraction], Optional[Fraction], Fraction]]:
    """(lower bound, upper bound, sample) of every open interval between roots.

    Unbounded sides have bound None.
    """
    if not roots:
        return [(None, None, Fraction(0))]
    result = [(None, roots[0].lo, Fraction(math.floor(roots[0].lo) - 1))]
    for left, right in zip(roots, roots[1:]):
        result.append((left.hi, right.lo, simplest_rational(left.hi, right.lo)))
    result.append((roots[-1].hi, None, Fraction(math.ceil(roots[-1].hi) + 1)))
    return result


def base_polynomials(ps: ProjectionSet, base: str, other: str) -> List[Poly]:
    """Univariate polynomials in the base axis whose roots delimit the cylinders."""
    out: List[Poly] = []
    with_other = [p for p in ps.polynomials if mentions(p, other)]
    for p in ps.polynomials:
        if not mentions(p, other):
            out.append(p)
            continue
        out.append(leading_coefficient(p, other))
        if degree_in(p, other) >= 2:
            out.append(discriminant(p, other))
    for p, q in itertools.combinations(with_other, 2):
        out.append(resultant(p, q, other))
    univariate = []
    for p in out:
        if p.is_zero or not poly_variables(p):
            continue
        univariate.append(as_univariate(p, base))
    return univariate


@dataclass
class OpenCadCell:
    """A full-dimensional cell with an interior rational sample point."""
    base_index: int
    stack_index: int
    base_bounds: Tuple[Optional[Fraction], Optional[Fraction]]
    stack_bounds: Tuple[Optional[Fraction], Optional[Fraction]]
    sample: Dict[str, Fraction]
    signs: List[int]
    classification: CellClass = CellClass.UNDETERMINED
    solutions: int = 0
    delineable: Optional[bool] = None
    message: str = ""

    def in_quadrant(self) -> bool:
        return all(v > 0 for v in self.sample.values())

    def description(self, ps: ProjectionSet) -> List[str]:
        """Sign conditions that hold on the cell, in projection-set order."""
        ops = {1: "> 0", -1: "< 0"}
        return [f"{canonical_text(p)} {ops[s]}" for p, s in zip(ps.polynomials, self.signs)]


def _signs_at(ps: ProjectionSet, sample: Mapping[str, Fraction]) -> List[int]:
    signs = []
    for p in ps.polynomials:
        value = point_eval(p, sample)
        signs.append((value > 0) - (value < 0))
    return signs


def stack_over(ps: ProjectionSet, base: str, other: str,
               base_value: Fraction) -> List[AlgebraicNumber]:
    """Roots along the fiber base = base_value."""
    fibers = []
    for p in ps.polynomials:
        q = substitute_values(p, {base: base_value})
        if q.is_zero:
            raise SpecializationCollapse(f"{p.as_expr()} vanishes at {base} = {base_value}")
        if poly_variables(q):
            fibers.append(as_univariate(q, other))
    return real_root_basis(fibers, other)


def _stack_cells(ps: ProjectionSet, base: str, other: str, base_index: int,
                 bounds: Tuple[Optional[Fraction], Optional[Fraction]],
                 base_sample: Fraction) -> List[OpenCadCell]:
    try:
        roots = stack_over(ps, base, other, base_sample)
    except SpecializationCollapse as e:
        logger.warning(f"Base interval {base_index}: {e}")
        sample = {base: base_sample, other: Fraction(0)}
        return [OpenCadCell(base_index, 0, bounds, (None, None), sample, [],
                            CellClass.UNDETERMINED, message=str(e))]
    cells = []
    for j, (lo, hi, s) in enumerate(interval_samples(roots)):
        sample = {base: base_sample, other: s}
        signs = _signs_at(ps, sample)
        if 0 in signs:
            raise AssertionError(f"projection polynomial vanishes at sample {sample}")
        cells.append(OpenCadCell(base_index, j, bounds, (lo, hi), sample, signs))
    return cells


def _stack_task(args) -> List[OpenCadCell]:
    return _stack_cells(*args)


def build_open_cad(ps: ProjectionSet, base_axis: str, threads: int = 1) -> List[OpenCadCell]:
    """Full-dimensional cells of the open CAD of the parameter plane."""
    if not ps.polynomials:
        raise ValueError("projection set is empty")
    if base_axis not in ps.parameters or len(ps.parameters) != 2:
        raise ValueError(f"base axis {base_axis} must be one of two parameters {ps.parameters}")
    other = next(k for k in ps.parameters if k != base_axis)

    base_roots = real_root_basis(base_polynomials(ps, base_axis, other), base_axis)
    intervals = interval_samples(base_roots)
    logger.info(f"Base axis {base_axis}: {len(base_roots)} roots, {len(intervals)} open intervals")

    tasks = [(ps, base_axis, other, i, (lo, hi), s) for i, (lo, hi, s) in enumerate(intervals)]
    if threads <= 1 or len(tasks) <= 1:
        stacks = [_stack_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            stacks = list(executor.map(_stack_task, tasks))

    cells = [c for stack in stacks for c in stack]
    logger.info(f"Open CAD: {len(cells)} full-dimensional cells")
    return cells


def count_certified(cps: CorePolynomialSystem, rs: ReducedSystem, sample: Mapping[str, Fraction],
                    solver: SolverConfig) -> Tuple[int, int, bool]:
    """(positive core roots, certified positive solutions, undetermined) at a sample."""
    values = {**cps.fixed, **{k: to_rational(v) for k, v in sample.items()}}
    core = substitute_values(cps.core, values)
    if core.is_zero:
        raise SpecializationCollapse(f"core vanishes at {values}")
    if not poly_variables(core):
        return 0, 0, False
    roots = positive_roots(as_univariate(core, cps.core_variable))
    point_box = {k: RatInterval.point(v) for k, v in values.items()}
    num = substitute_values(cps.numerator, values)
    den = substitute_values(cps.denominator, values)

    certified, undetermined = 0, False
    for root in roots:
        def box_at(attempt: int, root=root) -> Dict[str, RatInterval]:
            width = solver.pair_width_value / Fraction(10) ** (6 * attempt)
            x = refine(root, width).interval
            d = interval_eval(den, {cps.core_variable: x})
            if d.contains_zero():
                raise DenominatorStraddlesZero(cps.variable)
            y = interval_eval(num, {cps.core_variable: x}) / d
            return {**point_box, cps.core_variable: x, cps.variable: y}

        try:
            box = box_at(0)
            if box[cps.variable].is_nonpositive():
                continue
            result = back_substitute(rs.trace, box, solver.tolerance_value, box_at,
                                     solver.refine_budget)
        except DenominatorStraddlesZero:
            undetermined = True
            continue
        if result.any_nonpositive:
            continue
        if result.all_positive:
            certified += 1
        else:
            undetermined = True
    return len(roots), certified, undetermined


def _classify(certified: int) -> CellClass:
    if certified >= 2:
        return CellClass.MULTISTATIONARY
    if certified == 1:
        return CellClass.ONE_SOLUTION
    return CellClass.NO_SOLUTION


def _random_inside(lo: Optional[Fraction], hi: Optional[Fraction], anchor: Fraction,
                   rng: random.Random) -> Fraction:
    lo = anchor - 1 if lo is None else lo
    hi = anchor + 1 if hi is None else hi
    return lo + (hi - lo) * Fraction(rng.randint(1, 999), 1000)


def classify_cell(cell: OpenCadCell, cps: CorePolynomialSystem, rs: ReducedSystem,
                  ps: ProjectionSet, base_axis: str, solver: SolverConfig,
                  extra_samples: int = 0, seed: int = 0) -> OpenCadCell:
    """Count certified positive solutions at the cell sample (and spot-check samples)."""
    if cell.message:
        return cell
    if not cell.in_quadrant():
        cell.classification = CellClass.NOT_IN_QUADRANT
        return cell
    try:
        _, certified, undetermined = count_certified(cps, rs, cell.sample, solver)
    except MultistatError as e:
        cell.classification, cell.message = CellClass.UNDETERMINED, str(e)
        return cell
    cell.solutions = certified
    cell.classification = CellClass.UNDETERMINED if undetermined else _classify(certified)

    if extra_samples and cell.classification != CellClass.UNDETERMINED:
        cell.delineable = _spot_check(cell, cps, rs, ps, base_axis, solver, extra_samples, seed)
    return cell


def _spot_check(cell: OpenCadCell, cps: CorePolynomialSystem, rs: ReducedSystem,
                ps: ProjectionSet, base: str, solver: SolverConfig, samples: int,
                seed: int) -> bool:
    other = next(k for k in ps.parameters if k != base)
    rng = random.Random(seed * 1000003 + cell.base_index * 1009 + cell.stack_index)
    for _ in range(samples):
        b = _random_inside(cell.base_bounds[0], cell.base_bounds[1], cell.sample[base], rng)
        if b <= 0:
            continue
        try:
            roots = stack_over(ps, base, other, b)
        except SpecializationCollapse:
            return False
        intervals = interval_samples(roots)
        if cell.stack_index >= len(intervals):
            return False
        lo, hi, s = intervals[cell.stack_index]
        o = _random_inside(lo, hi, s, rng)
        if o <= 0:
            continue
        try:
            _, certified, undetermined = count_certified(cps, rs, {base: b, other: o}, solver)
        except MultistatError:
            return False
        if undetermined or _classify(certified) != cell.classification:
            logger.warning(f"Cell ({cell.base_index}, {cell.stack_index}) changes class at "
                           f"{base}={b}, {other}={o}")
            return False
    return True


# Worker-process state for cell classification
_WORKER: Dict[str, Any] = {}


def _init_worker(cps, rs, ps, base_axis, solver, extra_samples, seed) -> None:
    _WORKER.update(cps=cps, rs=rs, ps=ps, base_axis=base_axis, solver=solver,
                   extra_samples=extra_samples, seed=seed)


def _classify_task(cell: OpenCadCell) -> OpenCadCell:
    return classify_cell(cell, _WORKER["cps"], _WORKER["rs"], _WORKER["ps"], _WORKER["base_axis"],
                         _WORKER["solver"], _WORKER["extra_samples"], _WORKER["seed"])


@dataclass
class RegionReport:
    """Classified cells of the parameter plane."""
    parameters: List[str]
    base_axis: str
    projection: ProjectionSet
    cells: List[OpenCadCell]
    fixed: Dict[str, Fraction]

    def summary(self) -> Dict[str, int]:
        totals: Dict[str, int] = {c.value: 0 for c in CellClass}
        for cell in self.cells:
            totals[cell.classification.value] += 1
        totals["cells"] = len(self.cells)
        return totals

    def locate(self, point: Mapping[str, Any]) -> Optional[OpenCadCell]:
        """The cell whose sign vector matches the point's, within the right base interval."""
        point = {k: to_rational(v) for k, v in point.items()}
        signs = _signs_at(self.projection, point)
        if 0 in signs:
            return None
        base_value = point[self.base_axis]
        for cell in self.cells:
            lo, hi = cell.base_bounds
            if lo is not None and base_value <= lo:
                continue
            if hi is not None and base_value >= hi:
                continue
            if cell.signs == signs:
                return cell
        return None


def classify_region(cells: Sequence[OpenCadCell], cps: CorePolynomialSystem, rs: ReducedSystem,
                    ps: ProjectionSet, base_axis: str, solver: Optional[SolverConfig] = None,
                    extra_samples: int = 0, seed: int = 0, threads: int = 1) -> RegionReport:
    """Classify every cell; quadrant cells by certified positive solution count."""
    solver = solver or SolverConfig()
    cells = list(cells)
    if threads <= 1 or len(cells) <= 1:
        classified = [classify_cell(c, cps, rs, ps, base_axis, solver, extra_samples, seed)
                      for c in cells]
    else:
        with ProcessPoolExecutor(
            max_workers=threads,
            initializer=_init_worker,
            initargs=(cps, rs, ps, base_axis, solver, extra_samples, seed),
        ) as executor:
            classified = list(executor.map(_classify_task, cells))

    report = RegionReport(list(ps.parameters), base_axis, ps, classified, dict(cps.fixed))
    logger.info(f"Region classification: {report.summary()}")
    return report


def boundary_polynomial(cps: CorePolynomialSystem,
                        degrees: Optional[Mapping[str, int]] = None) -> Tuple[Poly, bool]:
    """Discriminant factor with the given degree pattern, else the squarefree discriminant.

    The flag tells whether the factor was found.
    """
    disc = make_poly(discriminant(cps.core, cps.core_variable).as_expr(), cps.parameters)
    _, factors = disc.factor_list()
    if degrees:
        for f, _ in factors:
            if all(degree_in(f, k) == d for k, d in degrees.items()):
                return primitive_integer(f), True
    logger.warning("No discriminant factor with the requested degrees; using the whole discriminant")
    return primitive_integer(disc.sqf_part()), False


@dataclass
class ProbeResult:
    first: Dict[str, Fraction]
    second: Dict[str, Fraction]
    counts: Tuple[int, int]
    signs: Tuple[int, int]

    @property
    def straddles(self) -> bool:
        return self.counts[0] != self.counts[1]

    @property
    def sign_flip(self) -> bool:
        return self.signs[0] * self.signs[1] < 0

    @property
    def consistent(self) -> bool:
        return not self.straddles or self.sign_flip


def boundary_conjecture_check(rs: ReducedSystem, boundary: Poly,
                              probes: Sequence[Tuple[Mapping[str, Any], Mapping[str, Any]]],
                              fixed: Mapping[str, Any],
                              solver: Optional[SolverConfig] = None) -> List[ProbeResult]:
    """Compare solution counts and boundary signs across probe pairs."""
    fixed = {k: to_rational(v) for k, v in fixed.items()}
    results = []
    for a, b in probes:
        a = {k: to_rational(v) for k, v in a.items()}
        b = {k: to_rational(v) for k, v in b.items()}
        counts = tuple(count_positive(solve_at_point(rs, {**fixed, **p}, solver)) for p in (a, b))
        signs = []
        for p in (a, b):
            value = point_eval(boundary, {**fixed, **p})
            signs.append((value > 0) - (value < 0))
        result = ProbeResult(a, b, counts, tuple(signs))
        if not result.consistent:
            logger.warning(f"Boundary does not separate {a} and {b}: counts {counts}, signs {signs}")
        results.append(result)
    return results


def raster_segments(report: RegionReport, window: Mapping[str, Sequence[float]],
                    columns: int = 6) -> List[Tuple[Fraction, Fraction, Fraction, CellClass]]:
    """Vertical segments (base value, other lo, other hi, class) covering the window.

    Each bounded base interval inside the window is sampled at `columns`
    interior abscissae; stack boundaries there delimit the segments.
    """
    base = report.base_axis
    other = next(k for k in report.parameters if k != base)
    b_lo, b_hi = (to_rational(str(v)) for v in window[base])
    o_lo, o_hi = (to_rational(str(v)) for v in window[other])

    by_index: Dict[Tuple[int, int], OpenCadCell] = {
        (c.base_index, c.stack_index): c for c in report.cells
    }
    base_intervals = sorted({(c.base_index, c.base_bounds) for c in report.cells},
                            key=lambda t: t[0])
    segments = []
    for index, (lo, hi) in base_intervals:
        lo = b_lo if lo is None else max(lo, b_lo)
        hi = b_hi if hi is None else min(hi, b_hi)
        if lo >= hi:
            continue
        for k in range(columns):
            x = lo + (hi - lo) * Fraction(2 * k + 1, 2 * columns)
            try:
                roots = stack_over(report.projection, base, other, x)
            except SpecializationCollapse:
                continue
            for j, (s_lo, s_hi, _) in enumerate(interval_samples(roots)):
                y0 = o_lo if s_lo is None else max(s_lo, o_lo)
                y1 = o_hi if s_hi is None else min(s_hi, o_hi)
                cell = by_index.get((index, j))
                if cell is None or y0 >= y1:
                    continue
                segments.append((x, y0, y1, cell.classification))
    return segments


class RegionService:
    """Runs the region pipeline with cached projections."""

    def __init__(self, region: RegionConfig, solver: SolverConfig, threads: int = 1,
                 seed: int = 0, cache: Optional[ResultCache] = None):
        self.region = region
        self.solver = solver
        self.threads = threads
        self.seed = seed
        self.cache = cache or ResultCache()
        self.stats = {
            'regions': 0,
            'cells_classified': 0,
            'projection_cache_hits': 0,
            'errors': 0
        }

    async def project(self, cps: CorePolynomialSystem) -> ProjectionSet:
        key = self.cache.hash_key({
            'core': str(cps.core.as_expr()),
            'variable': cps.core_variable,
            'parameters': cps.parameters,
            'factor': self.region.factor_projection,
        })
        cached = await self.cache.get(key, domain="projection")
        if cached is not None:
            self.stats['projection_cache_hits'] += 1
            return cached
        ps = await asyncio.to_thread(project, cps.core, cps.core_variable, cps.parameters,
                                     None, True, self.region.factor_projection)
        await self.cache.set(key, ps, domain="projection")
        return ps

    async def analyze(self, rs: ReducedSystem, fixed: Mapping[str, Any],
                      base_axis: Optional[str] = None,
                      variable: Optional[str] = None) -> Tuple[CorePolynomialSystem, RegionReport]:
        """Linear elimination, projection, open CAD and classification."""
        base_axis = base_axis or self.region.base_axis
        start_time = datetime.utcnow()
        try:
            cps = await asyncio.to_thread(eliminate_linear, rs, fixed, variable)
            if len(cps.parameters) != 2:
                raise ValueError(f"exactly two free parameters are required, got {cps.parameters}")
            ps = await self.project(cps)
            cells = await asyncio.to_thread(build_open_cad, ps, base_axis, self.threads)
            report = await asyncio.to_thread(
                classify_region, cells, cps, rs, ps, base_axis, self.solver,
                self.region.delineability_samples, self.seed, self.threads,
            )
        except Exception as e:
            logger.error(f"Region analysis failed: {e}")
            self.stats['errors'] += 1
            raise

        self.stats['regions'] += 1
        self.stats['cells_classified'] += len(report.cells)
        duration = (datetime.utcnow() - start_time).total_seconds()
        logger.info(f"Region analysis of {len(report.cells)} cells completed in {duration:.2f}s")
        return cps, report

    def get_stats(self) -> Dict[str, int]:
        return dict(self.stats)
