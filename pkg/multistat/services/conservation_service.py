"""
Conservation service: linear first integrals of a polynomial vector field.

A law c satisfies sum c_i f_i = 0 identically. Writing every f_i in
monomial coordinates turns this into the null space of a rational matrix
with one row per monomial and one column per variable.
"""
import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..core.rational import to_rational
from ..errors import LawViolation, NoNonnegativeBasis
from ..models.laws import ConservationLaw

logger = logging.getLogger(__name__)


def coefficient_matrix(field: Sequence) -> Tuple[DomainMatrix, List[Tuple[int, ...]]]:
    """Monomial-coefficient matrix of the vector field (rows = monomials)."""
    monomials: Dict[Tuple[int, ...], Dict[int, object]] = {}
    for j, f in enumerate(field):
        if f.is_zero:
            continue
        for monom, coeff in f.terms():
            monomials.setdefault(monom, {})[j] = QQ.convert(coeff)
    order = sorted(monomials)
    rows = [[monomials[m].get(j, QQ(0)) for j in range(len(field))] for m in order]
    if not rows:
        rows = [[QQ(0)] * len(field)]
    return DomainMatrix(rows, (len(rows), len(field)), QQ), order


def _primitive_vector(vector: Sequence) -> Tuple[Fraction, ...]:
    """Scale to coprime integers with the first nonzero entry positive."""
    values = [to_rational(v) for v in vector]
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in values]
    g = 0
    for i in ints:
        g = math.gcd(g, abs(i))
    if g:
        ints = [i // g for i in ints]
    first = next((i for i in ints if i), 0)
    if first < 0:
        ints = [-i for i in ints]
    return tuple(Fraction(i) for i in ints)


def _rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    if not vectors:
        return 0
    n = len(vectors[0])
    rows = [[QQ(v.numerator, v.denominator) for v in vec] for vec in vectors]
    return DomainMatrix(rows, (len(rows), n), QQ).rank()


def _null_rows(matrix: DomainMatrix) -> List[List]:
    nullspace = matrix.nullspace()
    if nullspace.shape[0] == 0:
        return []
    return nullspace.to_list()


def linear_first_integrals(
    field: Sequence,
    variables: Sequence[str],
    constant_prefix: str = "c",
) -> List[ConservationLaw]:
    """Basis of {c : sum c_i f_i = 0}, in reduced echelon form.

    Constants are named `<prefix>1`, `<prefix>2`, ...
    """
    if len(field) != len(variables):
        raise ValueError("one right-hand side per variable is required")
    matrix, _ = coefficient_matrix(field)
    null_rows = _null_rows(matrix)
    if not null_rows:
        logger.info("No linear first integrals")
        return []

    n = len(variables)
    echelon, _ = DomainMatrix(null_rows, (len(null_rows), n), QQ).rref()
    laws = []
    for row in echelon.to_list():
        if not any(row):
            continue
        coefficients = _primitive_vector(row)
        law = ConservationLaw(tuple(variables), coefficients, f"{constant_prefix}{len(laws) + 1}")
        laws.append(law)

    verify_laws(field, laws)
    logger.info(f"Found {len(laws)} linear first integrals")
    return laws


def verify_laws(field: Sequence, laws: Sequence[ConservationLaw]) -> None:
    """Raise LawViolation unless every law is an exact first integral."""
    for law in laws:
        residual = law.residual(field)
        if not residual.is_zero:
            logger.error(f"Law {law} is not conserved: residual {residual.as_expr()}")
            raise LawViolation(f"{law} is not a first integral (residual {residual.as_expr()})")


def elementary_vectors(laws: Sequence[ConservationLaw]) -> List[Tuple[Fraction, ...]]:
    """Support-minimal vectors of the span of `laws`, up to scaling.

    A support-minimal vector vanishes on d-1 independent coordinates, so
    every (d-1)-subset of coordinates with a one-dimensional solution
    space is tried.
    """
    if not laws:
        return []
    d = len(laws)
    n = len(laws[0].variables)
    basis = [list(law.coefficients) for law in laws]
    found = {}
    for zeros in itertools.combinations(range(n), d - 1):
        if zeros:
            rows = [[QQ(basis[i][j].numerator, basis[i][j].denominator) for i in range(d)]
                    for j in zeros]
            lambdas = _null_rows(DomainMatrix(rows, (len(zeros), d), QQ))
        else:
            lambdas = [[QQ(1)]]
        if len(lambdas) != 1:
            continue
        lam = [to_rational(x) for x in lambdas[0]]
        vector = [sum(lam[i] * basis[i][j] for i in range(d)) for j in range(n)]
        if not any(vector):
            continue
        primitive = _primitive_vector(vector)
        found[primitive] = True
    return list(found)


def nonnegative_basis(laws: Sequence[ConservationLaw]) -> List[ConservationLaw]:
    """Basis of the same span whose coefficients are all >= 0.

    Candidates are the nonnegative support-minimal vectors; they are taken
    greedily by support size (then coefficient order) while they raise the
    rank.
    """
    if not laws:
        return []
    d = len(laws)
    variables = laws[0].variables

    candidates = []
    for vector in elementary_vectors(laws):
        if all(v <= 0 for v in vector):
            vector = tuple(-v for v in vector)
        if all(v >= 0 for v in vector):
            candidates.append(vector)
    candidates.sort(key=lambda v: (sum(1 for x in v if x), [-x for x in v]))

    chosen: List[Tuple[Fraction, ...]] = []
    for vector in candidates:
        if _rank(chosen + [vector]) > len(chosen):
            chosen.append(vector)
        if len(chosen) == d:
            break

    if len(chosen) < d:
        logger.warning(f"Nonnegative vectors span only {len(chosen)} of {d} dimensions")
        raise NoNonnegativeBasis(
            f"the law space has dimension {d} but nonnegative vectors span {len(chosen)}"
        )

    prefix = _constant_prefix(laws)
    return [ConservationLaw(variables, v, f"{prefix}{i + 1}") for i, v in enumerate(chosen)]


def _constant_prefix(laws: Sequence[ConservationLaw]) -> str:
    name = laws[0].constant
    return name.rstrip("0123456789") or "c"


def same_span(first: Sequence[ConservationLaw], second: Sequence[ConservationLaw]) -> bool:
    """True when two law lists span the same coefficient space."""
    a = [law.coefficients for law in first]
    b = [law.coefficients for law in second]
    ra, rb = _rank(a), _rank(b)
    return ra == rb == _rank(a + b)


def contains_law(laws: Sequence[ConservationLaw], coefficients: Dict[str, Fraction]) -> bool:
    """True when the vector given by `coefficients` lies in the span of `laws`."""
    if not laws:
        return False
    variables = laws[0].variables
    vector = tuple(to_rational(coefficients.get(v, 0)) for v in variables)
    basis = [law.coefficients for law in laws]
    return _rank(basis + [vector]) == _rank(basis)


def resolve_laws(field: Sequence, variables: Sequence[str],
                 declared: Optional[Sequence[ConservationLaw]] = None,
                 compute: bool = False) -> List[ConservationLaw]:
    """Declared laws are verified; otherwise (or when asked) laws are computed."""
    if declared and not compute:
        verify_laws(field, declared)
        logger.info(f"Verified {len(declared)} declared conservation laws")
        return list(declared)
    laws = linear_first_integrals(field, variables)
    return nonnegative_basis(laws) if laws else []
