"""Scalar expressions for user-supplied maps f(x) and comparison functions psi(t).

Parsing is delegated to ``py_expression_eval``; this module restricts the
variable set, maps parser and runtime failures onto the package errors and
wraps the result as a point map or a ComparisonFunction.
"""

import math
import re
from typing import Callable, Optional

from py_expression_eval import Parser

from supra_fixpoint.core.exceptions import DomainError, ExpressionEvaluationError, ExpressionSyntaxError
from supra_fixpoint.models.points import Point, Scalar
from supra_fixpoint.services.matkowski import ComparisonFunction

_parser = Parser()

_COLUMN = re.compile(r"column (\d+)")
# Binary operators that may not follow each other ("x//2", "x**2"); unary minus may
_BINARY = "*/^%"


def _adjacent_operator(src: str) -> Optional[int]:
    previous = None
    for column, char in enumerate(src):
        if char.isspace():
            continue
        if char in _BINARY and previous is not None and previous in _BINARY:
            return column
        previous = char
    return None


def parse_expression(src: str, var: str) -> Callable[[float], float]:
    """Compile ``src`` into a float function of the single variable ``var``.

    Raises ExpressionSyntaxError (with a 0-based column where known) on parse
    errors and unknown names; evaluation failures raise ExpressionEvaluationError.
    """
    if not src or not src.strip():
        raise ExpressionSyntaxError("Empty expression", column=0, source=src)
    column = _adjacent_operator(src)
    if column is not None:
        raise ExpressionSyntaxError(f"Unexpected operator {src[column]!r}", column=column, source=src)
    try:
        expression = _parser.parse(src)
    except Exception as exc:
        match = _COLUMN.search(str(exc))
        column = int(match.group(1)) if match else getattr(_parser, "pos", None)
        raise ExpressionSyntaxError(f"Cannot parse {src!r}: {exc}", column=column, source=src) from exc

    unknown = [name for name in expression.variables() if name != var]
    if unknown:
        name = unknown[0]
        raise ExpressionSyntaxError(
            f"Unknown name {name!r} in {src!r}; only {var!r} is allowed",
            column=max(0, src.find(name)),
            source=src,
        )

    def evaluate(value: float) -> float:
        try:
            result = expression.evaluate({var: value})
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise ExpressionEvaluationError(f"{src!r} failed at {var}={value}: {exc}") from exc
        if isinstance(result, complex) or not isinstance(result, (int, float)):
            raise ExpressionEvaluationError(f"{src!r} is not real at {var}={value}: {result!r}")
        result = float(result)
        if not math.isfinite(result):
            raise ExpressionEvaluationError(f"{src!r} is not finite at {var}={value}")
        return result

    return evaluate


def parse_map_expression(src: str) -> Callable[[Point], Point]:
    """A scalar self-map x -> f(x) from an expression over ``x``."""
    f = parse_expression(src, "x")

    def apply(point: Point) -> Point:
        if not isinstance(point, Scalar):
            raise DomainError(f"Expression maps act on scalars, got {type(point).__name__}")
        return Scalar(f(point.value))

    return apply


def parse_psi_expression(src: str) -> ComparisonFunction:
    """A comparison function t -> psi(t) from an expression over ``t``."""
    return ComparisonFunction(evaluator=parse_expression(src, "t"), label=src)
