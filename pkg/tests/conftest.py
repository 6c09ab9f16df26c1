import os

import pytest
from hypothesis import HealthCheck, settings

from supra_fixpoint.models.points import Scalar
from supra_fixpoint.models.space import SpaceParams
from supra_fixpoint.services.constructions import absolute_metric
from supra_fixpoint.services.fixpoint import ContractionProblem
from supra_fixpoint.services.matkowski import linear

settings.register_profile("dev", max_examples=50, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile(
    "thorough", max_examples=2000, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


def halve_plus_one(x: Scalar) -> Scalar:
    return Scalar(x.value / 2.0 + 1.0)


@pytest.fixture
def absolute():
    return absolute_metric()


@pytest.fixture
def halving_problem():
    """x -> x/2 + 1 on the real line; fixed point 2."""
    return ContractionProblem(
        distance=absolute_metric(),
        params=SpaceParams(b=1.0, rho=0.0),
        map=halve_plus_one,
        psi=linear(0.5),
        x0=Scalar(0.0),
        label="x/2+1",
    )
