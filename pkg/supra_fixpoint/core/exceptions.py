from typing import Any, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class ErrorDetail(BaseModel):
    """Model for detailed error information."""
    loc: List[Union[str, int]] = []
    msg: str
    type: str


class ErrorResponse(BaseModel):
    """Standard error report written by the CLI."""
    model_config = ConfigDict(populate_by_name=True)

    schema_: str = Field("supra-fixpoint/1", alias="schema")
    error: str
    detail: Union[str, List[ErrorDetail]]
    exit_code: int


class SupraError(Exception):
    """Base exception for library errors.

    Carries a detail message and the CLI exit code the error maps to.
    """
    def __init__(
        self,
        detail: str = "An unexpected error occurred",
        exit_code: int = EXIT_FINDINGS,
    ):
        self.detail = detail
        self.exit_code = exit_code
        super().__init__(detail)


class DomainError(SupraError):
    """Raised for invalid points, mismatched point kinds or out-of-range parameters."""
    def __init__(self, detail: str = "Domain error"):
        super().__init__(detail=detail, exit_code=EXIT_USAGE)


class PreconditionError(DomainError):
    """Raised when a check is refused because its guard failed."""
    def __init__(self, detail: str = "Precondition failed", report: Optional[Any] = None):
        self.report = report
        super().__init__(detail=detail)


class InfeasibleError(SupraError):
    """Raised when no (b, rho) pair can satisfy a set of triples."""
    def __init__(self, detail: str = "Infeasible triple set", triple: Optional[Any] = None):
        self.triple = triple
        super().__init__(detail=detail)


class NumericOverflowError(SupraError):
    """Raised when a distance evaluation overflows."""
    def __init__(self, detail: str = "Distance evaluation overflowed"):
        super().__init__(detail=detail)


class DivergenceError(SupraError):
    """Raised when an iteration or a series does not settle."""
    def __init__(self, detail: str = "Divergence detected", iteration: Optional[int] = None):
        self.iteration = iteration
        super().__init__(detail=detail)


class ExpressionEvaluationError(DivergenceError):
    """Raised when a user expression fails at runtime (division by zero, overflow, ...)."""
    def __init__(self, detail: str = "Expression evaluation failed"):
        super().__init__(detail=detail)


class CapExceededError(SupraError):
    """Raised when a search runs past its configured cap."""
    def __init__(self, detail: str = "Search cap exceeded", cap: Optional[int] = None):
        self.cap = cap
        super().__init__(detail=detail)


class ConfigurationError(SupraError):
    """Raised for usage and configuration errors."""
    def __init__(self, detail: str = "Configuration error"):
        super().__init__(detail=detail, exit_code=EXIT_USAGE)


class ExpressionSyntaxError(ConfigurationError):
    """Raised when an expression does not parse; ``column`` is 0-based."""
    def __init__(self, detail: str = "Syntax error", column: Optional[int] = None, source: str = ""):
        self.column = column
        self.source = source
        if column is not None:
            detail = f"{detail} (column {column})"
        super().__init__(detail=detail)
