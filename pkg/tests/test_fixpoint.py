import dataclasses
import math

import pytest
from hypothesis import given, strategies as st

from supra_fixpoint.core.exceptions import CapExceededError, DivergenceError, DomainError, PreconditionError
from supra_fixpoint.models.points import Scalar
from supra_fixpoint.models.space import SpaceParams
from supra_fixpoint.services.constructions import absolute_metric, exp_supra, quadratic_supra
from supra_fixpoint.services.fixpoint import (
    ContractionProblem,
    ball_threshold,
    c_q_constant,
    certify,
    chain_bound,
    check_power_law,
    check_step_law,
    esp,
    esp_bound,
    four_point_expansion,
    four_point_simplified,
    invariant_ball_check,
    orbit,
    picard,
    q_threshold,
    series_bound,
    uniqueness_check,
    verify_contraction,
)
from supra_fixpoint.services.matkowski import linear, rational, sqrt_shift
from supra_fixpoint.services.samplers import ScalarSampler

params_strategy = st.builds(
    SpaceParams,
    b=st.floats(min_value=1.0, max_value=4.0),
    rho=st.floats(min_value=0.0, max_value=4.0),
)


def scaled(c):
    return lambda x: Scalar(c * x.value)


# -- iteration -----------------------------------------------------------


def test_picard_finds_the_fixed_point(halving_problem):
    result = picard(halving_problem)
    assert result.converged
    assert result.x_star.value == pytest.approx(2.0, abs=1e-9)
    assert result.residual < 1e-11
    assert result.iterations == len(result.trace.step_distances)
    assert result.trace.points[0] == Scalar(0.0)


def test_orbit(halving_problem):
    assert orbit(halving_problem, 3) == [Scalar(0.0), Scalar(1.0), Scalar(1.5), Scalar(1.75)]


def test_step_and_power_laws_hold(halving_problem):
    result = picard(halving_problem)
    assert check_step_law(halving_problem, result.trace).passed
    assert check_power_law(halving_problem, n=3, m_max=5).passed


def test_picard_reports_divergence(halving_problem):
    doubling = dataclasses.replace(halving_problem, map=lambda x: Scalar(2.0 * x.value + 1.0), x0=Scalar(1.0))
    with pytest.raises(DivergenceError) as info:
        picard(doubling)
    assert info.value.iteration is not None


def test_picard_argument_checks(halving_problem):
    with pytest.raises(DomainError):
        picard(halving_problem, max_iter=0)
    with pytest.raises(DomainError):
        picard(halving_problem, step_tol=0.0)


def test_picard_stops_at_max_iter(halving_problem):
    result = picard(halving_problem, max_iter=5)
    assert not result.converged
    assert result.iterations == 5


def test_contraction_is_verified(halving_problem):
    report = verify_contraction(halving_problem, ScalarSampler(), n_pairs=500)
    assert report.passed
    assert report.pairs_checked == 500


def test_too_small_psi_is_a_violation(halving_problem):
    problem = dataclasses.replace(halving_problem, psi=linear(0.4))
    report = verify_contraction(problem, ScalarSampler(), n_pairs=200)
    assert len(report.violations) > 100
    assert report.worst_excess > 0


def test_contraction_tolerance_is_absolute_below_one_and_relative_above(halving_problem):
    pairs = [(Scalar(0.0), Scalar(1.0)), (Scalar(0.0), Scalar(1e6))]

    def check(c):
        problem = dataclasses.replace(halving_problem, map=lambda x: x, psi=linear(c))
        return verify_contraction(problem, pairs=pairs, tol=1e-12)

    # excess 1e-13 at d = 1 and 1e-7 at d = 1e6
    inside = check(1.0 - 1e-13)
    assert inside.passed
    assert inside.worst_excess == pytest.approx(1e-7, rel=1e-2)

    # excess 1e-11 at d = 1 and 1e-5 at d = 1e6
    outside = check(1.0 - 1e-11)
    assert [v.y for v in outside.violations] == [Scalar(1.0), Scalar(1e6)]


def test_sqrt_shift_is_the_exact_modulus_of_halving_under_exp_distance():
    d, params = exp_supra(absolute_metric(), 1.0)
    problem = ContractionProblem(distance=d, params=params, map=scaled(0.5), psi=sqrt_shift(), x0=Scalar(1.5))
    assert verify_contraction(problem, ScalarSampler(low=-2.0, high=2.0), n_pairs=500).passed
    result = picard(problem)
    assert result.converged
    assert abs(result.x_star.value) < 1e-9


def test_linear_contraction_in_a_suprametric_space():
    d, params = quadratic_supra(absolute_metric(), 1.0, 2.0)
    problem = ContractionProblem(distance=d, params=params, map=scaled(0.5), psi=linear(0.5), x0=Scalar(7.0))
    assert verify_contraction(problem, ScalarSampler(), n_pairs=500).passed
    result = picard(problem)
    assert result.converged
    certificate = certify(problem, result, 1.0)
    assert certificate.q >= 2
    assert certificate.series_tail is not None


# -- constants -----------------------------------------------------------


def test_ball_threshold():
    assert ball_threshold(SpaceParams(b=1.0, rho=0.0), 1.0) == 0.5
    assert ball_threshold(SpaceParams(b=1.0, rho=1.0), 1.0) == pytest.approx(1.0 / (1.0 + math.sqrt(2.0)))


@given(params_strategy, st.floats(min_value=1e-6, max_value=1e3))
def test_threshold_solves_the_ball_equation(params, epsilon):
    h = ball_threshold(params, epsilon)
    assert 2 * params.b * h + params.rho * h * h == pytest.approx(epsilon, rel=1e-9)


def test_c_q_constant():
    assert c_q_constant(SpaceParams(b=1.0, rho=0.0), 2) == 2.0
    assert c_q_constant(SpaceParams(b=2.0, rho=3.0), 3) == 18.0
    with pytest.raises(DomainError):
        c_q_constant(SpaceParams(), 1)


def test_q_threshold():
    cert = q_threshold(linear(0.5), SpaceParams(b=1.0, rho=0.0), 1.0)
    assert (cert.q, cert.psi_q_epsilon, cert.threshold) == (2, 0.25, 0.5)
    assert q_threshold(linear(0.9), SpaceParams(b=1.0, rho=0.0), 1.0).q == 7
    with pytest.raises(CapExceededError):
        q_threshold(linear(1.0), SpaceParams(b=1.0, rho=0.0), 1.0, q_cap=50)
    with pytest.raises(DomainError):
        q_threshold(linear(0.5), SpaceParams(), 0.0)


def test_esp_values():
    assert [esp(i, [1.0, 2.0, 3.0]) for i in (1, 2, 3)] == [6.0, 11.0, 6.0]
    with pytest.raises(DomainError):
        esp(0, [1.0])
    with pytest.raises(DomainError):
        esp(2, [1.0])


def test_chain_and_esp_bounds():
    params = SpaceParams(b=2.0, rho=1.0)
    assert chain_bound(params, [1.0, 1.0]) == esp_bound(params, [1.0, 1.0]) == 5.0
    assert chain_bound(params, [1.0, 1.0, 1.0]) == 17.0
    assert esp_bound(params, [1.0, 1.0, 1.0]) == 19.0
    assert chain_bound(SpaceParams(), [1.0, 2.0, 3.0]) == 6.0
    with pytest.raises(DomainError):
        chain_bound(params, [])


@given(params_strategy, st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=8))
def test_chain_is_dominated_by_esp(params, ds):
    chain, bound = chain_bound(params, ds), esp_bound(params, ds)
    assert chain <= bound * (1 + 1e-12) + 1e-12


@given(st.floats(min_value=0.0, max_value=4.0), st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=8))
def test_chain_equals_esp_when_b_is_one(rho, ds):
    params = SpaceParams(b=1.0, rho=rho)
    assert chain_bound(params, ds) == pytest.approx(esp_bound(params, ds), rel=1e-12, abs=1e-12)


def test_four_point_values():
    params = SpaceParams(b=1.0, rho=1.0)
    assert four_point_expansion(params, 1.0, 1.0, 1.0, 1.0) == 15.0
    assert four_point_simplified(params, 1.0) == 24.0


@given(
    params_strategy,
    st.floats(min_value=1e-3, max_value=10.0),
    st.lists(st.floats(min_value=0.0, max_value=1.0, exclude_max=True), min_size=4, max_size=4),
)
def test_four_point_expansion_is_dominated_inside_the_ball(params, epsilon, fractions):
    u = [f * epsilon for f in fractions]
    assert four_point_expansion(params, *u) <= four_point_simplified(params, epsilon) * (1 + 1e-12)


def test_series_bound_geometric():
    assert series_bound(SpaceParams(), linear(0.5), 1.0, p=0) == pytest.approx(2.0, rel=1e-12)
    assert series_bound(SpaceParams(), linear(0.5), 1.0, p=0, q=3) == 1.75
    assert series_bound(SpaceParams(b=2.0, rho=0.0), linear(0.25), 1.0, p=0) == pytest.approx(4.0, rel=1e-12)
    assert series_bound(SpaceParams(), linear(0.5), 1.0, p=1) == pytest.approx(1.0, rel=1e-12)
    assert series_bound(SpaceParams(), linear(0.5), 0.0, p=0) == 0.0


def test_series_bound_divergence():
    with pytest.raises(DivergenceError):
        series_bound(SpaceParams(), linear(1.0), 1.0, p=0)
    with pytest.raises(DivergenceError):
        series_bound(SpaceParams(), rational(), 1.0, p=0, max_terms=1000)


def test_series_bound_diverges_when_c_times_b_is_one():
    # every term equals b c^i b^i = 2
    with pytest.raises(DivergenceError):
        series_bound(SpaceParams(b=2.0, rho=0.0), linear(0.5), 1.0, p=0)
    assert series_bound(SpaceParams(b=2.0, rho=0.0), linear(0.5), 1.0, p=0, q=5) == 10.0


# -- invariant ball and uniqueness ---------------------------------------


def test_invariant_ball(halving_problem):
    report = invariant_ball_check(halving_problem, 1.0, max_m=50, n_samples=100)
    assert report.passed
    assert report.q == 2
    assert report.threshold == 0.5
    assert report.p == 1
    assert report.center == Scalar(1.5)
    assert report.samples > 0
    assert report.max_image_distance < 1.0


def test_invariant_ball_refuses_non_contractions(halving_problem):
    expanding = dataclasses.replace(halving_problem, map=scaled(2.0), x0=Scalar(1.0))
    with pytest.raises(PreconditionError) as info:
        invariant_ball_check(expanding, 1.0, max_m=10)
    assert not info.value.report.passed


def test_invariant_ball_cap(halving_problem):
    slow = dataclasses.replace(halving_problem, psi=linear(0.99), x0=Scalar(1e6))
    with pytest.raises(CapExceededError):
        invariant_ball_check(slow, 1e-3, max_m=0)


def test_uniqueness(halving_problem):
    report = uniqueness_check(halving_problem, [Scalar(0.0), Scalar(10.0), Scalar(-5.0)])
    assert report.unique
    assert all(report.converged)
    assert report.max_pairwise_distance < 1e-9


def test_identity_has_many_fixed_points(halving_problem):
    identity = dataclasses.replace(halving_problem, map=lambda x: x, psi=linear(1.0))
    report = uniqueness_check(identity, [Scalar(0.0), Scalar(1.0)])
    assert not report.unique
    assert not report.inconclusive
    assert report.max_pairwise_distance == 1.0
    with pytest.raises(DomainError):
        uniqueness_check(identity, [Scalar(0.0)])


def test_certificate(halving_problem):
    result = picard(halving_problem)
    cert = certify(halving_problem, result, 1.0)
    assert cert.q == 2
    assert cert.c_q == 2.0
    assert cert.esp_slack == pytest.approx(1.0 / 5.0)
    assert cert.series_tail is not None and cert.series_tail < 1e-9


# -- x/2 + 1 under d(x, y) = |x - y| (|x - y| + 1) -------------------------


@pytest.fixture
def quadratic_problem():
    d, params = quadratic_supra(absolute_metric(), 1.0, 1.0)
    return ContractionProblem(distance=d, params=params, map=lambda x: Scalar(x.value / 2.0 + 1.0),
                              psi=linear(0.5), x0=Scalar(0.0))


def test_quadratic_problem_converges_from_every_start(quadratic_problem):
    assert quadratic_problem.params == SpaceParams(b=1.0, rho=2.0)
    starts = [Scalar(v) for v in (-100.0, 0.0, 10.0, 100.0)]
    for start in starts:
        result = picard(dataclasses.replace(quadratic_problem, x0=start))
        assert result.converged
        assert abs(result.x_star.value - 2.0) < 1e-10
        assert result.residual <= 10 * quadratic_problem.params.b * result.step_tol
    assert uniqueness_check(quadratic_problem, starts).unique


@pytest.mark.parametrize("epsilon", [0.1, 1.0, 10.0])
def test_quadratic_problem_keeps_its_invariant_balls(quadratic_problem, epsilon):
    report = invariant_ball_check(quadratic_problem, epsilon, n_samples=200)
    assert report.escapes == []
    assert report.max_image_distance < epsilon


def test_orbit_distances_stay_below_the_series_bound(quadratic_problem):
    points = orbit(quadratic_problem, 50)
    d = quadratic_problem.distance
    d0 = d(points[0], points[1])
    for p in range(50):
        for q in range(p + 1, 51):
            bound = series_bound(quadratic_problem.params, quadratic_problem.psi, d0, p=p, q=q)
            assert d(points[p], points[q]) <= bound + 1e-9


@pytest.mark.parametrize(
    "b, rho, epsilon, q",
    [(1.0, 0.0, 1.0, 2), (2.0, 0.0, 1.0, 3), (1.0, 3.0, 1.0, 2)],
)
def test_q_threshold_for_linear_halving(b, rho, epsilon, q):
    assert q_threshold(linear(0.5), SpaceParams(b=b, rho=rho), epsilon).q == q


@pytest.mark.parametrize("b, rho, q, expected", [(1.0, 1.0, 3, 3.0), (2.0, 1.0, 3, 12.0), (1.0, 0.0, 2, 2.0)])
def test_c_q_by_enumeration(b, rho, q, expected):
    assert c_q_constant(SpaceParams(b=b, rho=rho), q) == expected
