import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from supra_fixpoint.core.exceptions import DomainError, InfeasibleError, NumericOverflowError
from supra_fixpoint.models.points import Scalar, Vector
from supra_fixpoint.models.space import SpaceClass, SpaceParams, SpaceVariant
from supra_fixpoint.services.constructions import absolute_metric, discrete_distance, quadratic_supra
from supra_fixpoint.services.core_spaces import (
    DistanceFn,
    check_axioms,
    check_triples,
    distance,
    estimate_min_params,
    front_rho_at,
    pareto_front_from_terms,
    sample_triples,
    triple_defect,
)
from supra_fixpoint.services.discrete_example import enumerate_points
from supra_fixpoint.services.samplers import FiniteSampler, ScalarSampler


def squared() -> DistanceFn:
    return DistanceFn(evaluator=lambda x, y: (x.value - y.value) ** 2, label="(x-y)^2")


# -- distance ------------------------------------------------------------


def test_distance_rejects_mismatched_kinds(absolute):
    with pytest.raises(DomainError):
        distance(absolute, Scalar(0.0), Vector((0.0,)))


def test_distance_rejects_non_points(absolute):
    with pytest.raises(DomainError):
        distance(absolute, 0.0, Scalar(1.0))


def test_non_finite_distance_is_an_overflow():
    d = DistanceFn(evaluator=lambda x, y: math.inf, label="inf")
    with pytest.raises(NumericOverflowError):
        d(Scalar(0.0), Scalar(1.0))


def test_overflowing_evaluator_is_an_overflow():
    d = DistanceFn(evaluator=lambda x, y: math.exp(1e6 * abs(x.value - y.value)), label="huge")
    with pytest.raises(NumericOverflowError):
        d(Scalar(0.0), Scalar(1.0))


def test_triple_defect_is_zero_for_collinear_triangle_equality(absolute):
    defect = triple_defect(absolute, SpaceParams(b=1.0, rho=0.0), Scalar(0.0), Scalar(2.0), Scalar(1.0))
    assert defect == 0.0


# -- space classes -------------------------------------------------------


def test_space_class_conversions():
    assert SpaceClass.b_metric(2.0).to_params() == SpaceParams(b=2.0, rho=0.0)
    assert SpaceClass.suprametric(3.0).canonical() == SpaceClass.b_suprametric(1.0, 3.0)
    assert SpaceClass.semimetric().to_params() is None
    assert SpaceClass.b_suprametric(1.5, 7.0).label == "b-suprametric(b=1.5, rho=7)"


@pytest.mark.parametrize(
    "alias, canonical",
    [
        (SpaceClass.b_metric(1.5), SpaceClass.b_suprametric(1.5, 0.0)),
        (SpaceClass.suprametric(0.5), SpaceClass.b_suprametric(1.0, 0.5)),
    ],
    ids=["b-metric", "suprametric"],
)
def test_aliases_report_like_their_canonical_class(alias, canonical):
    sampler = ScalarSampler()
    first = check_axioms(squared(), alias, sampler, n_samples=2000, seed=3)
    second = check_axioms(squared(), canonical, sampler, n_samples=2000, seed=3)
    assert first.violations
    assert first.model_dump(exclude={"space_class"}) == second.model_dump(exclude={"space_class"})


def test_space_class_requires_its_coefficients():
    with pytest.raises(ValidationError):
        SpaceClass(variant=SpaceVariant.B_METRIC)
    with pytest.raises(ValidationError):
        SpaceClass(variant=SpaceVariant.SEMIMETRIC, b=2.0)


def test_space_params_ranges():
    with pytest.raises(ValidationError):
        SpaceParams(b=0.5, rho=0.0)
    with pytest.raises(ValidationError):
        SpaceParams(b=1.0, rho=-1.0)


# -- check_axioms ----------------------------------------------------------


def test_absolute_metric_passes(absolute):
    report = check_axioms(absolute, SpaceClass.b_suprametric(1.0, 0.0), ScalarSampler(), n_samples=2000, seed=3)
    assert report.passed
    assert report.samples_checked == 2000
    assert report.seed == 3
    assert report.worst_defect >= -1e-9


def test_check_axioms_is_reproducible(absolute):
    sampler = ScalarSampler()
    first = check_axioms(squared(), SpaceClass.b_metric(1.0), sampler, n_samples=500, seed=11)
    second = check_axioms(squared(), SpaceClass.b_metric(1.0), sampler, n_samples=500, seed=11)
    assert first.model_dump() == second.model_dump()


def test_squared_distance_is_a_b_metric_with_b_two():
    sampler = ScalarSampler()
    assert check_axioms(squared(), SpaceClass.semimetric(), sampler, n_samples=1000).passed
    assert check_axioms(squared(), SpaceClass.b_metric(2.0), sampler, n_samples=1000).passed
    report = check_axioms(squared(), SpaceClass.b_metric(1.0), sampler, n_samples=1000)
    assert not report.passed
    assert report.violations_of("d3")
    assert not report.violations_of("d1")


def test_quadratic_is_suprametric_but_not_metric(absolute):
    d, declared = quadratic_supra(absolute, a=1.0, scale=2.0)
    sampler = ScalarSampler()
    assert check_axioms(d, SpaceClass.suprametric(declared.rho), sampler, n_samples=2000).passed
    assert not check_axioms(d, SpaceClass.b_metric(1.0), sampler, n_samples=2000).passed


def test_negative_and_asymmetric_values_are_reported():
    d = DistanceFn(evaluator=lambda x, y: x.value - y.value, label="signed")
    report = check_triples(d, SpaceClass.semimetric(), [(Scalar(0.0), Scalar(1.0), Scalar(2.0))])
    assert report.violations_of("d1")
    assert report.violations_of("d2")
    assert all(v.z is None for v in report.violations)


def test_nonzero_diagonal_is_reported():
    d = DistanceFn(evaluator=lambda x, y: abs(x.value - y.value) + 1.0, label="shifted")
    report = check_triples(d, SpaceClass.b_metric(1.0), [(Scalar(0.0), Scalar(1.0), Scalar(2.0))])
    diagonal = [v for v in report.violations_of("d1") if v.x == v.y]
    assert diagonal and diagonal[0].defect == -1.0


def test_violations_are_sorted_canonically():
    points = [Scalar(float(v)) for v in (-3, -1, 0, 2, 5)]
    triples = sample_triples(FiniteSampler(points), 200, seed=1)
    report = check_triples(squared(), SpaceClass.b_metric(1.0), triples)
    keys = [(v.axiom, v.x.value, v.y.value, v.z.value) for v in report.violations]
    assert keys == sorted(keys)


def test_sampler_errors_are_domain_errors(absolute):
    with pytest.raises(DomainError):
        check_axioms(absolute, SpaceClass.semimetric(), ScalarSampler(), n_samples=0)
    with pytest.raises(DomainError):
        check_axioms(absolute, SpaceClass.semimetric(), FiniteSampler([Scalar(0.0), Vector((1.0,))]), n_samples=50)
    with pytest.raises(DomainError):
        check_triples(absolute, SpaceClass.semimetric(), [])


# -- Pareto front ----------------------------------------------------------


def test_single_constraint_front():
    front = pareto_front_from_terms(np.array([2.0]), np.array([1.0]), np.array([3.0]))
    assert front == [(1.0, 1.0), (1.5, 0.0)]


def test_dominated_line_is_dropped():
    front = pareto_front_from_terms(np.array([2.0, 1.0]), np.array([1.0, 1.0]), np.array([3.0, 3.0]))
    assert front == [(1.0, 2.0), (3.0, 0.0)]


def test_crossing_lines_give_three_vertices():
    front = pareto_front_from_terms(np.array([5.0, 1.0]), np.array([1.0, 1.0]), np.array([10.0, 4.0]))
    assert front == [(1.0, 5.0), (1.5, 2.5), (4.0, 0.0)]
    assert front_rho_at(front, 1.25) == pytest.approx(3.75)
    assert front_rho_at(front, 0.5) == math.inf
    assert front_rho_at(front, 10.0) == 0.0


def test_linear_only_constraints_raise_b():
    assert pareto_front_from_terms(np.array([2.0]), np.array([0.0]), np.array([3.0])) == [(1.5, 0.0)]
    assert pareto_front_from_terms(np.array([2.0]), np.array([1.0]), np.array([0.0])) == [(1.0, 0.0)]


def test_infeasible_triple():
    with pytest.raises(InfeasibleError) as info:
        pareto_front_from_terms(np.array([1.0, 0.0]), np.array([1.0, 0.0]), np.array([1.0, 1.0]))
    assert info.value.triple == 1


terms = st.tuples(
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.0, max_value=50.0),
)


@given(st.lists(terms, min_size=1, max_size=20), st.lists(st.floats(min_value=1.0, max_value=60.0), max_size=10))
def test_front_matches_the_pointwise_minimum(rows, extra_bs):
    S, P, D = (np.array(column) for column in zip(*rows))
    front = pareto_front_from_terms(S, P, D)

    bs = [b for b, _ in front]
    rhos = [rho for _, rho in front]
    assert bs == sorted(bs) and len(set(bs)) == len(bs)
    assert all(r0 > r1 for r0, r1 in zip(rhos, rhos[1:]))
    assert rhos[-1] == 0.0

    for b in bs + extra_bs:
        expected = max(0.0, float(np.max((D - b * S) / P)))
        assert front_rho_at(front, b) == pytest.approx(expected, rel=1e-7, abs=1e-7)


def test_estimated_front_is_feasible_for_quadratic(absolute):
    d, declared = quadratic_supra(absolute, a=1.0, scale=2.0)
    triples = sample_triples(ScalarSampler(), 2000, seed=5)
    front = estimate_min_params(d, triples)
    assert front[0][0] == 1.0
    assert front_rho_at(front, 1.0) <= declared.rho + 1e-9
    for b, rho in front:
        assert check_triples(d, SpaceClass.b_suprametric(b, rho), triples).passed


def test_estimated_front_for_a_metric_starts_at_one_zero(absolute):
    front = estimate_min_params(absolute, sample_triples(ScalarSampler(), 1000, seed=2))
    assert front == [(1.0, 0.0)]


def test_rounding_excess_does_not_add_vertices():
    # d(x,y) exceeds d(x,z) + d(z,y) by one ulp
    S = np.array([0.3, 0.7])
    D = np.array([0.1 + 0.2, 0.7])
    assert D[0] > S[0]
    P = np.array([0.02, 0.0])
    assert pareto_front_from_terms(S, P, D) == [(1.0, 0.0)]
    assert pareto_front_from_terms(np.array([1.0]), np.array([0.0]), np.array([1.0 + 1e-15])) == [(1.0, 0.0)]


def test_front_of_the_non_metric_witness_triple():
    d, _ = quadratic_supra(absolute_metric(), a=1.0, scale=1.0)
    front = estimate_min_params(d, [(Scalar(0.0), Scalar(2.0), Scalar(1.0))])
    assert front == [(1.0, 0.5), (1.5, 0.0)]


def test_front_of_the_discrete_space_admits_its_declared_parameters():
    d, declared = discrete_distance()
    points = enumerate_points(50)
    front = estimate_min_params(d, list(itertools.product(points, repeat=3)))
    assert front[0][0] == 1.0
    assert front_rho_at(front, declared.b) <= declared.rho
