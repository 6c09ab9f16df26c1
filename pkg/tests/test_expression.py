import pytest

from supra_fixpoint.cli.expression import parse_expression, parse_map_expression, parse_psi_expression
from supra_fixpoint.core.exceptions import (
    ConfigurationError,
    DivergenceError,
    DomainError,
    ExpressionEvaluationError,
    ExpressionSyntaxError,
)
from supra_fixpoint.models.points import Scalar, Vector


def test_arithmetic():
    assert parse_expression("x/2+1", "x")(4.0) == 3.0
    assert parse_expression("x^2", "x")(3.0) == 9.0
    assert parse_expression("-x + 2*x", "x")(5.0) == 5.0


@pytest.mark.parametrize("src, column", [("x//2", 2), ("x**2", 2), ("1 + x * / 2", 8)])
def test_doubled_operators_report_their_column(src, column):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(src, "x")
    assert info.value.column == column
    assert f"column {column}" in info.value.detail


def test_unknown_names_are_syntax_errors():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("2*y+1", "x")
    assert info.value.column == 2
    assert isinstance(info.value, ConfigurationError)


def test_empty_and_unbalanced_expressions():
    with pytest.raises(ExpressionSyntaxError):
        parse_expression("   ", "x")
    with pytest.raises(ExpressionSyntaxError):
        parse_expression("(x+1", "x")


def test_runtime_failures():
    reciprocal = parse_expression("1/x", "x")
    assert reciprocal(2.0) == 0.5
    with pytest.raises(ExpressionEvaluationError) as info:
        reciprocal(0.0)
    assert isinstance(info.value, DivergenceError)
    with pytest.raises(ExpressionEvaluationError):
        parse_expression("x^0.5", "x")(-1.0)


def test_map_expressions_act_on_scalars():
    f = parse_map_expression("x/2")
    assert f(Scalar(4.0)) == Scalar(2.0)
    with pytest.raises(DomainError):
        f(Vector((1.0, 2.0)))


def test_psi_expressions():
    psi = parse_psi_expression("t/(1+t)")
    assert psi.label == "t/(1+t)"
    assert psi(1.0) == 0.5
    assert psi.closed_form_iterate is None
    with pytest.raises(ExpressionSyntaxError):
        parse_psi_expression("x/2")
