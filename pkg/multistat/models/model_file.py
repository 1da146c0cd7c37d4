"""
Line-oriented model files.

    model <name>
    vars x1 x2 ...
    params k1 k2 ...
    ode <var> = <expr>
    law <linear-expr> = <param>
    value <param> = <rational-or-decimal>

Expressions use + - * ^ and parentheses; implicit multiplication is an
error. Decimal literals are read as exact base-10 rationals. `#` starts a
comment.
"""
import ast
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly

from ..core.poly import make_poly, primitive_integer, substitute_values, variables as poly_variables
from ..core.rational import to_rational
from ..errors import DuplicateDeclaration, ModelSyntaxError, UndeclaredSymbol
from .laws import ConservationLaw

logger = logging.getLogger(__name__)

KEYWORDS = ("model", "vars", "params", "ode", "law", "value")


@dataclass
class ModelFile:
    """A parsed model: declarations, vector field, laws and parameter values."""
    name: str
    variables: List[str]
    parameters: List[str]
    odes: Dict[str, Poly]
    laws: List[ConservationLaw] = field(default_factory=list)
    values: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def names(self) -> List[str]:
        """All indeterminates: variables first, then parameters."""
        return self.variables + self.parameters

    @property
    def free_parameters(self) -> List[str]:
        return [k for k in self.parameters if k not in self.values]

    def vector_field(self) -> List[Poly]:
        """Right-hand sides in declared variable order."""
        return [self.odes[v] for v in self.variables]

    def bound_vector_field(self, extra: Optional[Mapping[str, Fraction]] = None) -> List[Poly]:
        """Right-hand sides with the bound (and extra) parameter values substituted."""
        values = dict(self.values)
        values.update({k: to_rational(v) for k, v in (extra or {}).items()})
        return [substitute_values(f, values) for f in self.vector_field()]

    def steady_state_equations(self) -> List[Poly]:
        """Bound right-hand sides = 0 with denominators cleared."""
        return [primitive_integer(f) for f in self.bound_vector_field()]

    def law_equations(self, extra: Optional[Mapping[str, Fraction]] = None) -> List[Poly]:
        """Each law as sum c_i x_i - k = 0, optionally with totals fixed."""
        equations = [law.polynomial(self.names) for law in self.laws]
        if extra:
            values = {k: to_rational(v) for k, v in extra.items()}
            equations = [substitute_values(e, values) for e in equations]
        return equations

    def with_values(self, extra: Mapping[str, Fraction]) -> "ModelFile":
        """Copy with additional parameter bindings."""
        values = dict(self.values)
        for k, v in extra.items():
            if k not in self.parameters:
                raise UndeclaredSymbol(k)
            values[k] = to_rational(v)
        return replace(self, values=values)

    def with_laws(self, laws: Sequence[ConservationLaw]) -> "ModelFile":
        """Copy with the law list replaced; new totals are appended as parameters."""
        parameters = list(self.parameters)
        for law in laws:
            if law.constant not in parameters and law.constant not in self.variables:
                parameters.append(law.constant)
        odes = {v: _extend(p, self.variables + parameters) for v, p in self.odes.items()}
        return replace(self, parameters=parameters, odes=odes, laws=list(laws))


def _extend(p: Poly, names: Sequence[str]) -> Poly:
    if [str(g) for g in p.gens] == list(names):
        return p
    return make_poly(p.as_expr(), names)


class _ExpressionBuilder:
    """Evaluate a restricted Python AST into a sympy expression."""

    def __init__(self, source: str, declared: Sequence[str], line: int, columns: List[int]):
        self.source = source
        self.declared = set(declared)
        self.line = line
        self.columns = columns

    def column(self, node: ast.AST) -> int:
        offset = getattr(node, "col_offset", 0)
        if offset < len(self.columns):
            return self.columns[offset]
        return self.columns[-1] if self.columns else 1

    def fail(self, message: str, node: ast.AST) -> ModelSyntaxError:
        return ModelSyntaxError(message, self.line, self.column(node))

    def build(self, node: ast.AST):
        if isinstance(node, ast.Expression):
            return self.build(node.body)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                return self.build(node.left) ** self.exponent(node.right)
            left, right = self.build(node.left), self.build(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            raise self.fail(f"operator {type(node.op).__name__} is not allowed", node)
        if isinstance(node, ast.UnaryOp):
            operand = self.build(node.operand)
            if isinstance(node.op, ast.USub):
                return -operand
            if isinstance(node.op, ast.UAdd):
                return operand
            raise self.fail(f"operator {type(node.op).__name__} is not allowed", node)
        if isinstance(node, ast.Name):
            if node.id not in self.declared:
                raise UndeclaredSymbol(node.id, self.line)
            return sympy.Symbol(node.id)
        if isinstance(node, ast.Constant):
            return sympy.Rational(*_as_pair(self.literal(node)))
        raise self.fail(f"unsupported syntax {type(node).__name__}", node)

    def literal(self, node: ast.Constant) -> Fraction:
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise self.fail(f"unsupported literal {node.value!r}", node)
        if isinstance(node.value, int):
            return Fraction(node.value)
        # read the literal text, never the float
        text = ast.get_source_segment(self.source, node)
        return Fraction(text)

    def exponent(self, node: ast.AST) -> int:
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return node.value
        raise self.fail("exponents must be nonnegative integer literals", node)


def _as_pair(value: Fraction) -> Tuple[int, int]:
    return value.numerator, value.denominator


def parse_expression(text: str, names: Sequence[str], line: int = 1, column: int = 1) -> Poly:
    """Parse a polynomial expression over the declared names.

    `column` is the 1-based position of `text` inside its source line, used
    for error positions.
    """
    star = text.find("**")
    if star >= 0:
        raise ModelSyntaxError("use ^ for powers", line, column + star)
    # ^ becomes ** ; keep a map from rewritten offsets to source columns
    rewritten, columns = [], []
    for i, ch in enumerate(text):
        if ch == "^":
            rewritten.append("**")
            columns.extend([column + i, column + i])
        else:
            rewritten.append(ch)
            columns.append(column + i)
    source = "".join(rewritten)
    if not source.strip():
        raise ModelSyntaxError("empty expression", line, column)
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as e:
        strip_offset = len(source) - len(source.lstrip())
        offset = strip_offset + max((e.offset or 1) - 1, 0)
        col = columns[offset] if offset < len(columns) else column + len(text)
        raise ModelSyntaxError(e.msg or "invalid syntax", line, col)

    strip_offset = len(source) - len(source.lstrip())
    builder = _ExpressionBuilder(source.strip(), names, line, columns[strip_offset:])
    return make_poly(builder.build(tree), names)


def parse_model(text: str) -> ModelFile:
    """Parse model-file text into a ModelFile."""
    name: Optional[str] = None
    variables: List[str] = []
    parameters: List[str] = []
    odes: Dict[str, Poly] = {}
    law_lines: List[Tuple[int, str, int, str]] = []
    value_lines: List[Tuple[int, str, str, int]] = []
    ode_lines: List[Tuple[int, str, str, int]] = []
    declared_at: Dict[str, int] = {}
    vars_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].rstrip()
        if not content.strip():
            continue
        indent = len(content) - len(content.lstrip())
        keyword, _, rest = content.strip().partition(" ")
        rest_column = indent + len(keyword) + 2 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()

        if keyword not in KEYWORDS:
            raise ModelSyntaxError(f"unknown keyword {keyword!r}", lineno, indent + 1)

        if keyword == "model":
            if name is not None:
                raise DuplicateDeclaration("model", lineno)
            if not rest or len(rest.split()) != 1:
                raise ModelSyntaxError("model needs exactly one name", lineno, rest_column)
            name = rest
        elif keyword in ("vars", "params"):
            tokens = rest.split()
            if not tokens:
                raise ModelSyntaxError(f"{keyword} needs at least one name", lineno, rest_column)
            for token in tokens:
                if not token.isidentifier():
                    raise ModelSyntaxError(f"invalid name {token!r}", lineno,
                                           indent + 1 + content.strip().find(token))
                if token in declared_at:
                    raise DuplicateDeclaration(token, lineno)
                declared_at[token] = lineno
                (variables if keyword == "vars" else parameters).append(token)
            if keyword == "vars" and not vars_line:
                vars_line = lineno
        else:
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise ModelSyntaxError(f"{keyword} line needs '='", lineno, rest_column)
            rhs_column = rest_column + len(lhs) + 1 + (len(rhs) - len(rhs.lstrip()))
            lhs, rhs = lhs.strip(), rhs.strip()
            if keyword == "ode":
                ode_lines.append((lineno, lhs, rhs, rhs_column))
            elif keyword == "law":
                law_lines.append((lineno, lhs, rest_column, rhs))
            else:
                value_lines.append((lineno, lhs, rhs, rhs_column))

    names = variables + parameters

    for lineno, var, expr, col in ode_lines:
        if var not in variables:
            raise UndeclaredSymbol(var, lineno)
        if var in odes:
            raise DuplicateDeclaration(f"ode {var}", lineno)
        odes[var] = parse_expression(expr, names, lineno, col)

    missing = [v for v in variables if v not in odes]
    if missing:
        raise ModelSyntaxError(f"no ode for {', '.join(missing)}", vars_line or 1)

    laws = [_parse_law(lineno, expr, col, total, variables, parameters)
            for lineno, expr, col, total in law_lines]

    values: Dict[str, Fraction] = {}
    for lineno, param, literal, col in value_lines:
        if param not in parameters:
            raise UndeclaredSymbol(param, lineno)
        if param in values:
            raise DuplicateDeclaration(f"value {param}", lineno)
        try:
            values[param] = to_rational(literal)
        except (ValueError, ZeroDivisionError):
            raise ModelSyntaxError(f"invalid number {literal!r}", lineno, col)

    model = ModelFile(
        name=name or "model",
        variables=variables,
        parameters=parameters,
        odes=odes,
        laws=laws,
        values=values,
    )
    logger.debug(f"Parsed model {model.name}: {len(variables)} variables, "
                 f"{len(parameters)} parameters, {len(laws)} laws")
    return model


def _parse_law(lineno: int, expr: str, column: int, total: str,
               variables: List[str], parameters: List[str]) -> ConservationLaw:
    if total not in parameters:
        raise UndeclaredSymbol(total, lineno)
    poly = parse_expression(expr, variables + parameters, lineno, column)
    if any(v in parameters for v in poly_variables(poly)):
        raise ModelSyntaxError("law left-hand side may only use variables", lineno, column)
    if poly.total_degree() != 1 or any(sum(m) != 1 for m in poly.monoms()):
        raise ModelSyntaxError("law must be linear and homogeneous in the variables", lineno, column)
    mapping = {}
    for monom, coeff in poly.terms():
        idx = next(i for i, e in enumerate(monom) if e)
        mapping[variables[idx]] = to_rational(coeff)
    return ConservationLaw.from_mapping(variables, mapping, total)


def load_model(source: Union[str, Path]) -> ModelFile:
    """Parse a model file from disk."""
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as e:
        logger.error(f"Cannot read model file {path}: {e}")
        raise
    return parse_model(text)
