"""
Exception hierarchy for multistat.

Every failure the analysis pipeline can report as a status (degenerate grid
point, undetermined cell, ...) derives from MultistatError so services can
turn it into a flag instead of a crash.
"""
from typing import Optional


class MultistatError(Exception):
    """Base class for all multistat errors."""


# Polynomial kernel

class ConstantPair(MultistatError):
    """Both resultant operands are constant in the elimination variable."""


class DegreeTooLow(MultistatError):
    """Polynomial degree too low for the requested operation."""


class ZeroPoly(MultistatError):
    """Operation undefined on the zero polynomial."""


# Conservation laws

class NoNonnegativeBasis(MultistatError):
    """The law space has no spanning basis with nonnegative coefficients."""


class LawViolation(MultistatError):
    """A declared conservation law is not a first integral of the vector field."""


# Elimination

class CaseSplitRequired(MultistatError):
    """Every usable pivot coefficient changes sign on the positive orthant."""

    def __init__(self, variable: str, pivot: str):
        super().__init__(f"pivot for {variable} is not sign-definite: {pivot}")
        self.variable = variable
        self.pivot = pivot


class StuckNoLinearPivot(MultistatError):
    """No remaining independent variable occurs linearly in any equation."""


class DenominatorStraddlesZero(MultistatError):
    """A solution-formula denominator encloses zero after the refinement budget."""

    def __init__(self, variable: str):
        super().__init__(f"denominator of {variable} straddles zero")
        self.variable = variable


# Point solving

class ResultantVanishes(MultistatError):
    """The eliminating resultant is identically zero at this parameter point."""


class NotBivariate(MultistatError):
    """The reduced system is not two equations in two unknowns."""


# Region solving

class NotLinear(MultistatError):
    """No degree-one equation or subresultant exists in the variable."""


class SpecializationCollapse(MultistatError):
    """A projection polynomial vanishes identically at a base sample."""


# Stability

class LawsNotSolvable(MultistatError):
    """The laws do not determine the eliminated variables uniquely."""


# Model files and fixtures

class ModelSyntaxError(MultistatError):
    """Malformed model file line."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UndeclaredSymbol(MultistatError):
    """An expression uses a name that was never declared."""

    def __init__(self, name: str, line: Optional[int] = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"undeclared symbol {name}{where}")
        self.name = name
        self.line = line


class DuplicateDeclaration(MultistatError):
    """A name is declared twice or an ODE/value is given twice."""

    def __init__(self, name: str, line: Optional[int] = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate declaration of {name}{where}")
        self.name = name
        self.line = line


class FixtureChecksumMismatch(MultistatError):
    """The bundled fixture file does not match its recorded checksum."""
