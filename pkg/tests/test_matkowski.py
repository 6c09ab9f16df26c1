import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from supra_fixpoint.core.exceptions import DomainError
from supra_fixpoint.models.matkowski import MembershipReport, Verdict
from supra_fixpoint.services.matkowski import (
    ComparisonFunction,
    check_M,
    check_Mb,
    iterate,
    linear,
    rational,
    sqrt_shift,
)


def test_iterate_basics():
    assert iterate(linear(0.5), 3, 8.0) == 1.0
    assert iterate(rational(), 0, 3.0) == 3.0
    assert iterate(rational(), 4, 1.0) == pytest.approx(0.2)
    with pytest.raises(DomainError):
        iterate(rational(), -1, 1.0)
    with pytest.raises(DomainError):
        iterate(rational(), 1, -1.0)


@given(
    st.integers(min_value=0, max_value=40),
    st.integers(min_value=0, max_value=40),
    st.floats(min_value=0.0, max_value=1e6),
)
def test_explicit_iterates_compose_exactly(m, n, t):
    for psi in (rational(), sqrt_shift(), linear(0.7)):
        assert iterate(psi, m + n, t) == iterate(psi, m, iterate(psi, n, t))


@pytest.mark.parametrize("psi", [rational(), sqrt_shift(), linear(0.7)], ids=lambda psi: psi.label)
def test_closed_forms_agree_with_composition(psi):
    for t in (1e-3, 1.0, 50.0):
        explicit = iterate(psi, 30, t)
        assert iterate(psi, 30, t, closed_form=True) == pytest.approx(explicit, rel=1e-9)


def test_linear_half_is_in_M():
    report = check_M(linear(0.5))
    assert report.in_M
    assert report.verdict is Verdict.MEMBER
    assert report.below_identity and report.vanishes_at_zero


def test_identity_is_not_in_M():
    report = check_M(linear(1.0))
    assert report.is_monotone
    assert not report.iterates_vanish
    assert not report.below_identity
    assert report.verdict is Verdict.NON_MEMBER


def test_non_monotone_function_is_not_in_M():
    dip = ComparisonFunction(evaluator=lambda t: t / 2.0 if t < 5.0 else t / 100.0, label="dip")
    report = check_M(dip, n_max=200)
    assert not report.is_monotone
    assert not report.in_M


def test_explicit_orbit_stops_early():
    half = ComparisonFunction(evaluator=lambda t: t / 2.0, label="half")
    report = check_M(half, n_max=10**6)
    assert report.in_M
    assert max(report.diagnostics.iterations) < 100
    assert set(report.diagnostics.methods) == {"explicit"}


@given(st.floats(min_value=0.0, max_value=0.99))
def test_linear_contractions_are_in_M(c):
    assert check_M(linear(c)).in_M


def test_linear_half_is_in_Mb_for_b_one():
    report = check_Mb(linear(0.5), b=1.0)
    assert report.in_Mb
    assert report.verdict is Verdict.MEMBER
    assert report.ratio_limsup_estimate == pytest.approx(0.5)


def test_linear_half_at_b_two_sits_on_the_boundary():
    report = check_Mb(linear(0.5), b=2.0)
    assert report.in_M
    assert report.in_Mb is False
    assert report.inconclusive
    assert report.verdict is Verdict.INCONCLUSIVE


def test_linear_ratio_above_one_over_b():
    report = check_Mb(linear(0.9), b=2.0)
    assert report.in_M
    assert not report.in_Mb
    assert not report.inconclusive
    assert report.verdict is Verdict.NON_MEMBER


def test_rational_is_in_M_but_its_ratio_tends_to_one():
    report = check_Mb(rational(), b=1.0)
    assert report.in_M
    assert report.in_Mb is False
    assert report.inconclusive
    assert report.verdict is Verdict.INCONCLUSIVE
    assert report.ratio_limsup_estimate == pytest.approx(1.0, abs=1e-6)


def test_sqrt_shift_is_in_Mb_for_b_one():
    report = check_Mb(sqrt_shift(), b=1.0)
    assert report.in_Mb
    assert report.ratio_limsup_estimate <= 0.5 + 1e-9


def test_grid_and_parameter_validation():
    with pytest.raises(DomainError):
        check_M(linear(0.5), t_grid=[])
    with pytest.raises(DomainError):
        check_M(linear(0.5), t_grid=[-1.0, 1.0])
    with pytest.raises(DomainError):
        check_M(linear(0.5), t_grid=[2.0, 1.0])
    with pytest.raises(DomainError):
        check_Mb(linear(0.5), b=0.5)
    with pytest.raises(DomainError):
        linear(-0.1)


def test_report_keeps_in_M_consistent():
    with pytest.raises(ValidationError):
        MembershipReport(
            label="bad", grid=[1.0], n_max=1, vanish_tol=1e-6,
            is_monotone=True, iterates_vanish=False, below_identity=True, vanishes_at_zero=True,
            in_M=True, verdict=Verdict.MEMBER,
        )


@pytest.mark.parametrize("b", [1.0, 1.5, 2.0, 4.0])
@pytest.mark.parametrize("c", [round(0.1 * i, 1) for i in range(1, 10)])
def test_linear_membership_grid(c, b):
    report = check_Mb(linear(c), b=b)
    assert report.in_M
    if abs(c - 1.0 / b) <= report.margin:
        assert report.verdict is Verdict.INCONCLUSIVE
    elif c < 1.0 / b:
        assert report.verdict is Verdict.MEMBER
    else:
        assert report.verdict is Verdict.NON_MEMBER


@pytest.mark.parametrize("n", [1, 10, 100, 1000, 10_000])
@pytest.mark.parametrize("t", [1e-3, 1.0, 50.0])
def test_rational_closed_form_matches_composition(n, t):
    explicit = iterate(rational(), n, t)
    assert iterate(rational(), n, t, closed_form=True) == pytest.approx(explicit, rel=1e-12)


@pytest.mark.parametrize("n", [1, 10, 100, 1000])
def test_linear_closed_form_matches_composition(n):
    explicit = iterate(linear(0.7), n, 3.0)
    assert iterate(linear(0.7), n, 3.0, closed_form=True) == pytest.approx(explicit, rel=1e-12)
