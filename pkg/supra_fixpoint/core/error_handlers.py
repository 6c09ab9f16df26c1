import functools
import traceback
from typing import Any, Callable, Tuple

from pydantic import ValidationError

from supra_fixpoint.core.config import settings
from supra_fixpoint.core.exceptions import EXIT_USAGE, ErrorDetail, ErrorResponse, SupraError
from supra_fixpoint.core.logging import supra_logger

HandlerResult = Tuple[int, Any]


def create_error_response(exc: Exception) -> ErrorResponse:
    """Create a standardized error report for an exception.

    Args:
        exc: A SupraError or a pydantic ValidationError

    Returns:
        ErrorResponse carrying the exit code the error maps to
    """
    if isinstance(exc, ValidationError):
        errors = [
            ErrorDetail(
                loc=list(error.get("loc", [])),
                msg=error.get("msg", "Validation error"),
                type=error.get("type", "validation_error"),
            )
            for error in exc.errors()
        ]
        return ErrorResponse(
            schema_=settings.schema_version,
            error="ValidationError",
            detail=errors,
            exit_code=EXIT_USAGE,
        )
    if isinstance(exc, SupraError):
        return ErrorResponse(
            schema_=settings.schema_version,
            error=exc.__class__.__name__,
            detail=exc.detail,
            exit_code=exc.exit_code,
        )
    return ErrorResponse(
        schema_=settings.schema_version,
        error=exc.__class__.__name__,
        detail=str(exc),
        exit_code=EXIT_USAGE,
    )


def with_error_handling(func: Callable[..., HandlerResult]) -> Callable[..., HandlerResult]:
    """Decorator for CLI command handlers.

    Known errors are logged and turned into ``(exit_code, error report)``;
    anything else is logged with its traceback and re-raised as SupraError.

    Args:
        func: A handler returning ``(exit_code, payload)``

    Returns:
        Wrapped handler
    """
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> HandlerResult:
        try:
            return func(*args, **kwargs)
        except (SupraError, ValidationError) as exc:
            response = create_error_response(exc)
            supra_logger.error(f"{response.error} in {func.__name__}: {response.detail}")
            return response.exit_code, response.model_dump(mode="json", by_alias=True)
        except Exception as exc:
            supra_logger.error(
                f"Unhandled exception in {func.__name__}: {exc}",
                extra={"traceback": traceback.format_exc()},
            )
            raise SupraError(detail=f"Unexpected failure in {func.__name__}: {exc}") from exc

    return wrapper
