"""
Elimination service: graph-guided parametric Gaussian elimination.

Variables are vertices of a dependency graph whose edges are the products
occurring in the equations. The complement of a minimum vertex cover is an
independent set; its variables occur linearly once the cover variables are
fixed, so they can be eliminated one at a time with pivots that are
sign-definite on the positive orthant.
"""
import asyncio
import itertools
import logging
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from sympy import Poly
from sympy.polys.polyerrors import ExactQuotientFailed

from ..core.intervals import RatInterval, interval_eval
from ..core.poly import (
    coefficients_in, constant, degree_in, mentions, names_of, primitive_integer,
    same_up_to_constant, sign_definite, strip_monomial_content, substitute_rational,
    substitute_values, term_count, unify, variables as poly_variables,
)
from ..core.rational import to_rational
from ..errors import CaseSplitRequired, DenominatorStraddlesZero, StuckNoLinearPivot
from ..models.model_file import ModelFile
from ..utils.config import MultistatConfig
from .cache_service import ResultCache
from .conservation_service import resolve_laws

logger = logging.getLogger(__name__)

TIE_BREAKS = ("first", "last")
PIVOT_ORDERS = ("laws-last", "fewest-terms")


class Positivity(str, Enum):
    """Sign status of a back-substituted coordinate."""
    POSITIVE = "positive"
    NONPOSITIVE = "nonpositive"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class DependencyGraph:
    """Variables as vertices; an edge joins two variables whose product occurs."""
    vertices: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]
    self_loops: FrozenSet[str] = frozenset()

    def index(self, name: str) -> int:
        return self.vertices.index(name)

    def neighbors(self, name: str) -> Set[str]:
        return {v for e in self.edges if name in e for v in e if v != name}

    def is_cover(self, cover: Set[str]) -> bool:
        if not self.self_loops <= set(cover):
            return False
        return all(u in cover or v in cover for u, v in self.edges)

    def sorted_edges(self) -> List[Tuple[str, str]]:
        return sorted(self.edges, key=lambda e: (self.index(e[0]), self.index(e[1])))


def build_graph(system: Sequence[Poly], variables: Sequence[str]) -> DependencyGraph:
    """Dependency graph over `variables`; other generators (parameters) are ignored."""
    position = {v: i for i, v in enumerate(variables)}
    edges = set()
    loops = set()
    for p in system:
        if p.is_zero:
            continue
        gens = names_of(p)
        for monom in p.monoms():
            occurring = [(gens[i], e) for i, e in enumerate(monom) if e and gens[i] in position]
            for name, e in occurring:
                if e >= 2:
                    loops.add(name)
            for (a, _), (b, _) in itertools.combinations(occurring, 2):
                pair = (a, b) if position[a] < position[b] else (b, a)
                edges.add(pair)
    graph = DependencyGraph(tuple(variables), frozenset(edges), frozenset(loops))
    logger.debug(f"Dependency graph: {len(edges)} edges, self-loops {sorted(loops)}")
    return graph


def _cover_key(cover) -> Tuple[str, ...]:
    return tuple(sorted(cover))


def min_vertex_cover(graph: DependencyGraph) -> Set[str]:
    """Minimum vertex cover by branch-and-bound on uncovered edges.

    Self-loop vertices are always in the cover. Among minimum covers the
    set whose sorted variable names compare smallest wins.
    """
    forced = set(graph.self_loops)
    remaining = [e for e in graph.sorted_edges() if e[0] not in forced and e[1] not in forced]

    best_size = len(graph.vertices) + 1
    best: List[FrozenSet[str]] = []

    def branch(chosen: FrozenSet[str], edges: List[Tuple[str, str]]):
        nonlocal best_size, best
        if len(chosen) > best_size:
            return
        if not edges:
            if len(chosen) < best_size:
                best_size, best = len(chosen), [chosen]
            elif len(chosen) == best_size:
                best.append(chosen)
            return
        # a matching lower bound: disjoint edges each need their own vertex
        used, matching = set(), 0
        for u, v in edges:
            if u not in used and v not in used:
                used.update((u, v))
                matching += 1
        if len(chosen) + matching > best_size:
            return
        u, v = edges[0]
        for pick in (u, v):
            rest = [e for e in edges if pick not in e]
            branch(chosen | {pick}, rest)

    branch(frozenset(forced), remaining)
    cover = min(best, key=_cover_key)
    logger.info(f"Minimum vertex cover: {sorted(cover, key=graph.index)}")
    return set(cover)


def brute_force_min_cover(graph: DependencyGraph) -> Set[str]:
    """Minimum cover by enumerating subsets in increasing size; used as a certificate."""
    forced = set(graph.self_loops)
    free = [v for v in graph.vertices if v not in forced]
    for size in range(len(free) + 1):
        covers = [
            forced | set(combo)
            for combo in itertools.combinations(free, size)
            if graph.is_cover(forced | set(combo))
        ]
        if covers:
            return set(min(covers, key=_cover_key))
    return set(graph.vertices)


@dataclass(frozen=True)
class EliminationStep:
    """variable = numerator / denominator, solved from `equation`."""
    variable: str
    equation: Poly
    numerator: Poly
    denominator: Poly
    pivot_sign: int

    def check(self) -> bool:
        """Substituting the formula into its equation gives zero."""
        return substitute_rational(self.equation, self.variable,
                                   self.numerator, self.denominator).is_zero


@dataclass(frozen=True)
class SideCondition:
    """polynomial > 0, the positivity requirement of an eliminated variable."""
    variable: str
    polynomial: Poly


@dataclass
class ReducedSystem:
    """Equations in the cover variables and free parameters, plus the elimination trace."""
    equations: List[Poly]
    variables: List[str]
    parameters: List[str]
    trace: List[EliminationStep]
    cover: List[str]
    eliminated: List[str]
    side_conditions: List[SideCondition] = field(default_factory=list)
    graph: Optional[DependencyGraph] = None

    @property
    def names(self) -> List[str]:
        return self.variables + self.parameters

    def specialize(self, values: Mapping[str, Fraction]) -> List[Poly]:
        """Equations with the given parameter values substituted."""
        return [substitute_values(e, values) for e in self.equations]


def _remove_factors(p: Poly, factors: Sequence[Poly]) -> Poly:
    for f in factors:
        while True:
            P, F = unify(p, f)
            try:
                q = P.exquo(F)
            except ExactQuotientFailed:
                break
            if q.is_zero:
                break
            p = q
    return p


def _reduce(p: Poly, pivot_factors: Sequence[Poly]) -> Poly:
    """Normalize an intermediate equation; removed factors never vanish on the orthant."""
    if p.is_zero:
        return p
    p = strip_monomial_content(p)
    p = _remove_factors(p, pivot_factors)
    return primitive_integer(p)


def _final_form(p: Poly, pivot_factors: Sequence[Poly]) -> Poly:
    """Keep only irreducible factors that can vanish on the positive orthant."""
    _, factors = p.factor_list()
    result = constant(1, names_of(p))
    for f, _ in factors:
        if sign_definite(f) != 0:
            continue
        if any(same_up_to_constant(f, g) for g in pivot_factors):
            continue
        result, f = unify(result, f)
        result = result * f
    return primitive_integer(result)


def _dedupe(equations: Sequence[Poly]) -> List[Poly]:
    kept: List[Poly] = []
    for e in equations:
        if e.is_zero:
            continue
        if any(same_up_to_constant(e, k) for k in kept):
            continue
        kept.append(e)
    return kept


def _irreducible_factors(p: Poly) -> List[Poly]:
    _, factors = p.factor_list()
    return [f for f, _ in factors if f.total_degree() > 0]


def _cancel(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    num, den = unify(num, den)
    g = num.gcd(den)
    if g.total_degree() > 0:
        num, den = num.exquo(g), den.exquo(g)
    return num, den


def gauss_eliminate(
    system: Sequence[Poly],
    variables: Sequence[str],
    parameters: Sequence[str],
    cover: Set[str],
    tie_break: str = "first",
    pivot_order: str = "laws-last",
) -> ReducedSystem:
    """Eliminate every variable outside `cover`, all indeterminates assumed positive.

    Pivot choice is fewest terms, then declared variable order (reversed for
    tie_break="last"). With pivot_order="laws-last" that key is preceded by a
    group: parameter-free equations first, then parametric ones with the
    equation whose latest-declared parameter comes last consumed first.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
    if pivot_order not in PIVOT_ORDERS:
        raise ValueError(f"pivot_order must be one of {PIVOT_ORDERS}")
    position = {v: i for i, v in enumerate(variables)}
    param_rank = {k: i for i, k in enumerate(parameters)}

    equations = _dedupe([_reduce(e, []) for e in system])
    pending = [v for v in variables if v not in cover]
    trace: List[EliminationStep] = []
    side_conditions: List[SideCondition] = []
    pivot_factors: List[Poly] = []

    while pending:
        usable = []
        indefinite = []
        for ei, e in enumerate(equations):
            mentioned = [k for k in poly_variables(e) if k in param_rank]
            if pivot_order == "fewest-terms":
                group = ()
            elif mentioned:
                group = (1, -max(param_rank[k] for k in mentioned))
            else:
                group = (0, 0)
            for v in pending:
                if degree_in(e, v) != 1:
                    continue
                rest, pivot = coefficients_in(e, v)
                sign = sign_definite(pivot)
                order = position[v] if tie_break == "first" else -position[v]
                key = group + (term_count(e), order)
                candidate = (key, ei, v, pivot, rest, sign)
                (usable if sign else indefinite).append(candidate)

        if not usable:
            if indefinite:
                _, _, v, pivot, _, _ = min(indefinite, key=lambda c: c[0])
                logger.error(f"No sign-definite pivot; best candidate for {v} is {pivot.as_expr()}")
                raise CaseSplitRequired(v, str(pivot.as_expr()))
            logger.error(f"No linear pivot among {pending}")
            raise StuckNoLinearPivot(f"no equation is linear in any of {', '.join(pending)}")

        _, ei, v, pivot, rest, sign = min(usable, key=lambda c: c[0])
        if sign > 0:
            num, den = -rest, pivot
        else:
            num, den = rest, -pivot
        num, den = _cancel(num, den)
        step = EliminationStep(variable=v, equation=equations[ei], numerator=num,
                               denominator=den, pivot_sign=sign)
        if not step.check():
            raise AssertionError(f"elimination formula for {v} does not solve its equation")
        trace.append(step)
        pivot_factors.extend(f for f in _irreducible_factors(den)
                             if not any(same_up_to_constant(f, g) for g in pivot_factors))

        # den > 0, so v > 0 iff num > 0
        if sign_definite(num) != 1:
            side_conditions.append(SideCondition(v, primitive_integer(num)))

        logger.debug(f"Eliminated {v}: {term_count(num)}/{term_count(den)} terms")
        remaining = []
        for j, e in enumerate(equations):
            if j == ei:
                continue
            if mentions(e, v):
                e = _reduce(substitute_rational(e, v, num, den), pivot_factors)
            remaining.append(e)
        equations = _dedupe(remaining)
        pending.remove(v)

    final = _dedupe([_final_form(e, pivot_factors) for e in equations])
    survivors = [v for v in variables if v in cover]
    occurring = set()
    for e in final:
        occurring.update(poly_variables(e))
    free = [k for k in parameters if k in occurring]

    logger.info(f"Reduced to {len(final)} equations in {survivors} "
                f"({len(trace)} eliminations, {len(side_conditions)} side conditions)")
    return ReducedSystem(
        equations=final,
        variables=survivors,
        parameters=free,
        trace=trace,
        cover=survivors,
        eliminated=[s.variable for s in trace],
        side_conditions=side_conditions,
    )


@dataclass
class BackSubstitution:
    """Enclosures and positivity for every coordinate after back-substitution."""
    enclosures: Dict[str, RatInterval]
    positivity: Dict[str, Positivity]
    converged: bool

    @property
    def all_positive(self) -> bool:
        return all(p == Positivity.POSITIVE for p in self.positivity.values())

    @property
    def any_nonpositive(self) -> bool:
        return any(p == Positivity.NONPOSITIVE for p in self.positivity.values())


def _positivity(interval: RatInterval) -> Positivity:
    if interval.is_positive():
        return Positivity.POSITIVE
    if interval.is_nonpositive():
        return Positivity.NONPOSITIVE
    return Positivity.UNDETERMINED


def _evaluate_trace(trace: Sequence[EliminationStep],
                    assignment: Mapping[str, RatInterval]) -> Dict[str, RatInterval]:
    box = dict(assignment)
    for step in reversed(trace):
        den = interval_eval(step.denominator, box)
        if den.contains_zero():
            raise DenominatorStraddlesZero(step.variable)
        box[step.variable] = interval_eval(step.numerator, box) / den
    return box


def back_substitute(
    trace: Sequence[EliminationStep],
    assignment: Mapping[str, RatInterval],
    tolerance=None,
    refine: Optional[Callable[[int], Mapping[str, RatInterval]]] = None,
    budget: int = 8,
) -> BackSubstitution:
    """Enclose every eliminated variable by evaluating the trace in reverse.

    `refine(attempt)` returns tighter enclosures of the inputs; it is called
    while a denominator straddles zero or a result is wider than `tolerance`.
    """
    tolerance = None if tolerance is None else to_rational(tolerance)
    current = dict(assignment)
    eliminated = [s.variable for s in trace]

    for attempt in range(budget + 1):
        try:
            box = _evaluate_trace(trace, current)
        except DenominatorStraddlesZero as e:
            if refine is None or attempt == budget:
                logger.warning(f"Back-substitution failed: {e}")
                raise
            current = dict(refine(attempt + 1))
            continue

        converged = tolerance is None or all(box[v].width <= tolerance for v in eliminated)
        if converged or refine is None or attempt == budget:
            positivity = {name: _positivity(box[name]) for name in box}
            return BackSubstitution(enclosures=box, positivity=positivity, converged=converged)
        current = dict(refine(attempt + 1))

    raise AssertionError("unreachable")


def equations_for(model: ModelFile) -> List[Poly]:
    """Steady-state equations plus law equations of a model."""
    return model.steady_state_equations() + model.law_equations()


def reduce_model(
    model: ModelFile,
    compute_laws: bool = False,
    tie_break: str = "first",
    certify: bool = False,
    pivot_order: str = "laws-last",
) -> ReducedSystem:
    """Full preprocessing of a model: laws, dependency graph, cover, elimination."""
    laws = resolve_laws(model.vector_field(), model.variables, model.laws, compute_laws)
    if compute_laws or not model.laws:
        model = model.with_laws(laws)

    system = equations_for(model)
    graph = build_graph(system, model.variables)
    cover = min_vertex_cover(graph)
    if certify:
        certificate = brute_force_min_cover(graph)
        if len(certificate) != len(cover) or not graph.is_cover(cover):
            raise AssertionError(f"vertex cover {sorted(cover)} is not minimum")

    reduced = gauss_eliminate(system, model.variables, model.free_parameters, cover,
                              tie_break, pivot_order)
    reduced.graph = graph
    if certify:
        for step in reduced.trace:
            if not step.check():
                raise AssertionError(f"step for {step.variable} does not solve its equation")
        for e in reduced.equations:
            leaked = [v for v in reduced.eliminated if mentions(e, v)]
            if leaked:
                raise AssertionError(f"reduced equation still mentions {leaked}")
    return reduced


class ReductionService:
    """Runs and caches model reductions."""

    def __init__(self, config: MultistatConfig, cache: Optional[ResultCache] = None):
        self.config = config
        self.cache = cache or ResultCache(config.cache)
        self.stats = {
            'reductions': 0,
            'cache_hits': 0,
            'errors': 0
        }

    def _cache_key(self, model: ModelFile, compute_laws: bool, tie_break: str,
                   pivot_order: str) -> str:
        return self.cache.hash_key({
            'name': model.name,
            'variables': model.variables,
            'parameters': model.parameters,
            'odes': {v: str(p.as_expr()) for v, p in model.odes.items()},
            'laws': [str(law) for law in model.laws],
            'values': {k: str(v) for k, v in model.values.items()},
            'compute_laws': compute_laws,
            'tie_break': tie_break,
            'pivot_order': pivot_order,
        })

    async def reduce(self, model: ModelFile, compute_laws: bool = False,
                     tie_break: str = "first", certify: bool = False) -> ReducedSystem:
        """Reduce a model, reusing a cached result when available."""
        pivot_order = self.config.reduction.pivot_order
        key = self._cache_key(model, compute_laws, tie_break, pivot_order)
        cached = await self.cache.get(key, domain="reduce")
        if cached is not None and not certify:
            self.stats['cache_hits'] += 1
            return cached

        start_time = datetime.utcnow()
        try:
            reduced = await asyncio.to_thread(reduce_model, model, compute_laws, tie_break,
                                             certify, pivot_order)
        except Exception as e:
            logger.error(f"Reduction of {model.name} failed: {e}")
            self.stats['errors'] += 1
            raise

        self.stats['reductions'] += 1
        duration = (datetime.utcnow() - start_time).total_seconds()
        logger.info(f"Reduction of {model.name} completed in {duration:.2f}s")
        await self.cache.set(key, reduced, domain="reduce")
        return reduced

    def get_stats(self) -> Dict[str, int]:
        return dict(self.stats)
