"""
Exception hierarchy for the interpolation toolkit.

Every error raised on purpose by the library derives from InterpError so
callers (the CLI, the verification runner) can catch one base class.
"""

from typing import Optional


class InterpError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(InterpError, ValueError):
    """A parameter or descriptor is outside its admissible range."""


class DimensionMismatchError(InvalidInputError):
    """Vectors, spaces or sequences disagree on the ambient dimension."""

    def __init__(self, expected: int, got: int, what: str = "vector"):
        self.expected = expected
        self.got = got
        super().__init__(f"{what} has dimension {got}, expected {expected}")


class EnumerationBudgetError(InterpError):
    """Exact Rademacher enumeration would exceed the pattern budget."""

    def __init__(self, support: int, budget_log2: int = 20):
        self.support = support
        super().__init__(
            f"exact enumeration over {support} indices needs 2^{support} patterns "
            f"(budget 2^{budget_log2})"
        )


class QuadratureBudgetError(InterpError):
    """Too few torus nodes for the support width of a sequence."""

    def __init__(self, nodes: int, width: int):
        self.nodes = nodes
        self.width = width
        super().__init__(f"{nodes} quadrature nodes for support width {width} (need >= {4 * width})")


class OverflowGuardError(InterpError):
    """A geometric weight base^(exponent*k) left the representable range."""


class UnsupportedStructureError(InterpError):
    """The requested construction is not available for this structure."""

    def __init__(self, kind: str, operation: str):
        self.kind = kind
        self.operation = operation
        super().__init__(f"{operation} does not support '{kind}' structures")


class SolverError(InterpError):
    """A solve failed without producing a usable certificate."""

    def __init__(self, message: str, best_value: Optional[float] = None):
        self.best_value = best_value
        suffix = f" (best bound so far {best_value:.6g})" if best_value is not None else ""
        super().__init__(message + suffix)


class UnknownSuiteError(InterpError, KeyError):
    """run_suite was called with a name that is not registered."""

    def __init__(self, name: str, known):
        self.name = name
        super().__init__(f"unknown suite '{name}'; known suites: {', '.join(sorted(known))}")

    def __str__(self) -> str:
        return self.args[0]


class ProblemFileError(InvalidInputError):
    """A problem file is not valid JSON or violates the v1 schema."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = []
        if line is not None: where.append(f"line {line}")
        if field is not None: where.append(f"field '{field}'")
        super().__init__(f"{message}" + (f" ({', '.join(where)})" if where else ""))
