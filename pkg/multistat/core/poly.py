"""
Exact multivariate polynomial kernel on top of sympy's Poly over QQ.

Variables are addressed by name. Polynomials produced here keep the
generators of their inputs; an eliminated variable stays in the generator
tuple with exponent zero everywhere, so "mentions(p, var)" is the test for
whether a variable still occurs.
"""
import logging
import operator
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ, Symbol
from sympy.polys.subresultants_qq_zz import sylvester

from ..errors import ConstantPair, DegreeTooLow, ZeroPoly
from .rational import format_rational, to_domain, to_rational

logger = logging.getLogger(__name__)

MultiPoly = Poly
UniPoly = Poly
Value = Union[Poly, Fraction, int, str]

_OPERATIONS: Dict[str, Callable[[Poly, Poly], Poly]] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
}


def symbol(name: str) -> Symbol:
    """The sympy symbol used for a variable name."""
    return Symbol(name)


def make_poly(expr, names: Sequence[str]) -> Poly:
    """Build a polynomial over QQ in the named generators."""
    gens = [symbol(n) for n in names]
    if isinstance(expr, Poly):
        expr = expr.as_expr()
    if isinstance(expr, Fraction):
        expr = sympy.Rational(expr.numerator, expr.denominator)
    return Poly(expr, *gens, domain=QQ)


def constant(value, names: Sequence[str]) -> Poly:
    """Constant polynomial in the given generators."""
    gens = [symbol(n) for n in names]
    return Poly.from_dict({(0,) * len(gens): to_domain(value)}, *gens, domain=QQ)


def names_of(p: Poly) -> List[str]:
    """Generator names of p, in order."""
    return [str(g) for g in p.gens]


def variables(p: Poly) -> List[str]:
    """Names of generators that actually occur in p."""
    if p.is_zero:
        return []
    occurring = set()
    for monom in p.monoms():
        occurring.update(i for i, e in enumerate(monom) if e)
    return [str(g) for i, g in enumerate(p.gens) if i in occurring]


def mentions(p: Poly, name: str) -> bool:
    """True when the variable occurs with positive exponent."""
    return degree_in(p, name) > 0


def degree_in(p: Poly, name: str) -> int:
    """Degree in one variable; 0 for absent variables, -1 for the zero polynomial."""
    if p.is_zero:
        return -1
    sym = symbol(name)
    if sym not in p.gens:
        return 0
    return int(p.degree(sym))


def term_count(p: Poly) -> int:
    """Number of nonzero terms."""
    return 0 if p.is_zero else len(p.monoms())


def ensure_gens(p: Poly, names: Iterable[str]) -> Poly:
    """Extend the generator tuple of p so it contains every name."""
    missing = [symbol(n) for n in names if symbol(n) not in p.gens]
    if not missing:
        return p
    gens = tuple(p.gens) + tuple(missing)
    pad = (0,) * len(missing)
    data = {} if p.is_zero else {m + pad: c for m, c in p.terms()}
    return Poly.from_dict(data, *gens, domain=QQ)


def unify(p: Poly, q: Poly) -> Tuple[Poly, Poly]:
    """Bring two polynomials onto a common generator tuple over QQ."""
    P, Q = p.set_domain(QQ), q.set_domain(QQ)
    if P.gens == Q.gens:
        return P, Q
    P = ensure_gens(P, names_of(Q))
    Q = ensure_gens(Q, names_of(P))
    Q = Q.reorder(*P.gens)
    return P, Q


def arithmetic(p: Poly, q: Poly, op: str) -> Poly:
    """Exact ring operation add/sub/mul with generator auto-merge."""
    try:
        fn = _OPERATIONS[op]
    except KeyError:
        raise ValueError(f"Unknown operation: {op}")
    P, Q = unify(p, q)
    return fn(P, Q)


def coefficients_in(p: Poly, name: str) -> List[Poly]:
    """Coefficients of p as a polynomial in `name`, lowest degree first.

    The coefficients keep the generators of p (with `name` at exponent 0).
    """
    sym = symbol(name)
    if sym not in p.gens:
        p = ensure_gens(p, [name])
    gens = p.gens
    if p.is_zero:
        return [Poly.from_dict({}, *gens, domain=QQ)]
    idx = gens.index(sym)
    buckets: Dict[int, Dict[Tuple[int, ...], object]] = {}
    for monom, coeff in p.terms():
        e = monom[idx]
        key = monom[:idx] + (0,) + monom[idx + 1:]
        buckets.setdefault(e, {})[key] = coeff
    top = max(buckets)
    return [Poly.from_dict(buckets.get(i, {}), *gens, domain=p.domain) for i in range(top + 1)]


def leading_coefficient(p: Poly, name: str) -> Poly:
    """Leading coefficient with respect to one variable."""
    return coefficients_in(p, name)[-1]


def _reinsert(result, gens: Tuple[Symbol, ...], idx: int) -> Poly:
    """Restore generator `gens[idx]` into a result that lost it."""
    if not isinstance(result, Poly):
        return Poly.from_dict({(0,) * len(gens): QQ.convert(result)}, *gens, domain=QQ)
    data = {} if result.is_zero else {
        m[:idx] + (0,) + m[idx:]: QQ.convert(c) for m, c in result.terms()
    }
    return Poly.from_dict(data, *gens, domain=QQ)


def substitute(p: Poly, name: str, value: Value) -> Poly:
    """Replace a variable by a rational or a polynomial (free of that variable)."""
    sym = symbol(name)
    if sym not in p.gens:
        raise ValueError(f"{name} is not a generator of {p}")
    if isinstance(value, Poly):
        if mentions(value, name):
            raise ValueError(f"substituted value mentions {name}")
        coeffs = coefficients_in(p, name)
        P, V = unify(coeffs[-1], value)
        result = P
        for c in reversed(coeffs[:-1]):
            c, V = unify(c, V)
            result, c = unify(result, c)
            result = result * V + c
        return result
    idx = p.gens.index(sym)
    evaluated = p.set_domain(QQ).eval(sym, to_domain(value))
    return _reinsert(evaluated, p.gens, idx)


def substitute_values(p: Poly, values: Mapping[str, Value]) -> Poly:
    """Substitute several variables; names absent from p are ignored."""
    for name, value in values.items():
        if symbol(name) in p.gens:
            p = substitute(p, name, value)
    return p


def substitute_rational(p: Poly, name: str, num: Poly, den: Poly) -> Poly:
    """Numerator of p(name = num/den) multiplied by den^deg(p, name)."""
    coeffs = coefficients_in(p, name)
    d = len(coeffs) - 1
    num, den = unify(num, den)
    total = None
    num_power = None
    for i, c in enumerate(coeffs):
        num_power = constant(1, names_of(num)) if i == 0 else num_power * num
        if c.is_zero:
            continue
        term = arithmetic(c, num_power * den ** (d - i), "mul")
        total = term if total is None else arithmetic(total, term, "add")
    if total is None:
        total = Poly.from_dict({}, *num.gens, domain=QQ)
    return total


def derivative(p: Poly, name: str) -> Poly:
    """Formal partial derivative."""
    sym = symbol(name)
    if sym not in p.gens:
        raise ValueError(f"{name} is not a generator of {p}")
    return p.diff(sym)


def _with_main(p: Poly, name: str) -> Poly:
    sym = symbol(name)
    order = (sym,) + tuple(g for g in p.gens if g != sym)
    return p.reorder(*order)


def resultant(p: Poly, q: Poly, name: str) -> Poly:
    """Resultant with respect to `name` by subresultant PRS over ZZ.

    Equals the Sylvester determinant of p and q exactly.
    """
    P, Q = unify(ensure_gens(p, [name]), ensure_gens(q, [name]))
    dp, dq = degree_in(P, name), degree_in(Q, name)
    if dp < 1 and dq < 1:
        raise ConstantPair(f"both operands are constant in {name}")
    gens = P.gens
    if P.is_zero or Q.is_zero:
        return Poly.from_dict({}, *gens, domain=QQ)

    Pm, Qm = _with_main(P, name), _with_main(Q, name)
    a, Pz = Pm.clear_denoms(convert=True)
    b, Qz = Qm.clear_denoms(convert=True)
    raw = Pz.resultant(Qz)

    scale = QQ(1, int(a) ** dq * int(b) ** dp)
    main_gens = Pm.gens
    result = _reinsert(raw, main_gens, 0).mul_ground(scale)
    return result.reorder(*gens)


def sylvester_resultant(p: Poly, q: Poly, name: str) -> Poly:
    """Resultant as the fraction-free (Bareiss) determinant of the Sylvester matrix."""
    P, Q = unify(ensure_gens(p, [name]), ensure_gens(q, [name]))
    sym = symbol(name)
    matrix = sylvester(P.as_expr(), Q.as_expr(), sym, 1)
    det = sympy.expand(matrix.det(method="bareiss"))
    return Poly(det, *P.gens, domain=QQ)


def discriminant(p: Poly, name: str) -> Poly:
    """(-1)^(d(d-1)/2) res(p, dp/dvar) / lc(p)."""
    d = degree_in(p, name)
    if d < 2:
        raise DegreeTooLow(f"degree {d} in {name} is below 2")
    P = ensure_gens(p.set_domain(QQ), [name])
    r = resultant(P, derivative(P, name), name)
    lc = leading_coefficient(P, name)
    r, lc = unify(r, lc)
    disc = r.exquo(lc)
    if (d * (d - 1) // 2) % 2:
        disc = -disc
    return disc


def squarefree_part(p: Poly) -> Poly:
    """p / gcd(p, p'), made primitive with positive leading coefficient."""
    if p.is_zero:
        raise ZeroPoly("squarefree part of the zero polynomial")
    return primitive_integer(p.set_domain(QQ).sqf_part())


def primitive_integer(p: Poly) -> Poly:
    """Scale to integer coefficients with content 1 and positive grlex-leading coefficient."""
    if p.is_zero:
        return p.set_domain(QQ)
    _, q = p.set_domain(QQ).clear_denoms(convert=True)
    _, q = q.primitive()
    if q.LC(order="grlex") < 0:
        q = -q
    return q.set_domain(QQ)


def sign_definite(p: Poly) -> int:
    """+1 / -1 when all coefficients share that sign, else 0."""
    if p.is_zero:
        return 0
    signs = {1 if c > 0 else -1 for c in p.coeffs()}
    return signs.pop() if len(signs) == 1 else 0


def strip_monomial_content(p: Poly) -> Poly:
    """Divide out the largest monomial factor."""
    if p.is_zero:
        return p
    _, q = p.terms_gcd()
    return q


def drop_definite_factors(p: Poly) -> Poly:
    """Remove irreducible factors that cannot vanish on the positive orthant.

    Repeated factors are kept once. If nothing indefinite remains the result
    is the constant 1 (the equation has no positive solution).
    """
    if p.is_zero:
        return p
    _, factors = p.set_domain(QQ).factor_list()
    kept = [f for f, _ in factors if sign_definite(f) == 0]
    result = constant(1, names_of(p))
    for f in kept:
        result, f = unify(result, f)
        result = result * f
    return primitive_integer(result)


def normalize_equation(p: Poly) -> Poly:
    """Integer primitive form with monomial content removed."""
    return primitive_integer(strip_monomial_content(p))


def same_up_to_constant(p: Poly, q: Poly) -> bool:
    """True when p = c*q for a nonzero rational c."""
    if p.is_zero or q.is_zero:
        return p.is_zero and q.is_zero
    P, Q = unify(primitive_integer(p), primitive_integer(q))
    return P == Q or P == -Q


def as_univariate(p: Poly, name: str) -> Poly:
    """View a polynomial that only involves `name` as a univariate Poly."""
    sym = symbol(name)
    if p.is_zero:
        return Poly(0, sym, domain=QQ)
    if sym not in p.gens:
        if variables(p):
            raise ValueError(f"{p} involves variables other than {name}")
        return Poly(p.LC(), sym, domain=QQ)
    idx = p.gens.index(sym)
    data: Dict[Tuple[int], object] = {}
    for monom, coeff in p.terms():
        if any(e for i, e in enumerate(monom) if i != idx):
            raise ValueError(f"{p} involves variables other than {name}")
        data[(monom[idx],)] = coeff
    return Poly.from_dict(data, sym, domain=QQ)


def univariate_from_coeffs(coeffs: Sequence, name: str = "x") -> Poly:
    """Build a univariate polynomial from coefficients listed lowest degree first."""
    sym = symbol(name)
    data = {(i,): to_domain(c) for i, c in enumerate(coeffs) if to_rational(c) != 0}
    return Poly.from_dict(data, sym, domain=QQ)


def coefficient_list(p: Poly) -> List[Fraction]:
    """Dense coefficients of a univariate polynomial, lowest degree first."""
    if p.is_zero:
        return []
    return [to_rational(c) for c in reversed(p.all_coeffs())]


def canonical_text(p: Poly, normalize: bool = True) -> str:
    """Text form in graded-lex order using + - * ^, by default integer primitive."""
    if p.is_zero:
        return "0"
    q = primitive_integer(p) if normalize else p
    names = names_of(q)
    parts = []
    for monom, coeff in q.terms(order="grlex"):
        c = to_rational(coeff)
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, monom) if e]
        mag = abs(c)
        if not factors:
            body = format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{format_rational(mag)}*" + "*".join(factors)
        parts.append((c < 0, body))
    negative, body = parts[0]
    text = ("-" if negative else "") + body
    for negative, body in parts[1:]:
        text += (" - " if negative else " + ") + body
    return text
