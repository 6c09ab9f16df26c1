"""Example distance functions with their declared (b, rho).

Each constructor returns ``(DistanceFn, declared)`` where ``declared`` is the
SpaceParams the construction is claimed to satisfy, or None when nothing is
claimed (compositions over an unrecognised base). The returned DistanceFn
carries a ConstructionDescriptor so it can be rebuilt from JSON with
``build_construction``.

Distances of the form e^{...} - 1 use ``math.expm1`` so small distances keep
full relative precision.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

from pydantic import ValidationError

from supra_fixpoint.core.exceptions import DomainError
from supra_fixpoint.core.logging import get_logger
from supra_fixpoint.models.points import DPoint, GridFn, Point, Scalar, Vector
from supra_fixpoint.models.space import (
    ConstructionDescriptor,
    ConstructionKind,
    ConstructionParams,
    SpaceParams,
)
from supra_fixpoint.services.core_spaces import DistanceFn
from supra_fixpoint.services.discrete_example import ddist
from supra_fixpoint.services.samplers import (
    DiscreteSampler,
    GridSampler,
    PointSampler,
    ScalarSampler,
    VectorSampler,
)

logger = get_logger(__name__)

Construction = Tuple[DistanceFn, Optional[SpaceParams]]

# Sampling boxes keep exp-type distances well inside double range
DEFAULT_BOXES: Dict[ConstructionKind, Tuple[float, float]] = {
    ConstructionKind.ABSOLUTE: (-10.0, 10.0),
    ConstructionKind.EUCLIDEAN: (-10.0, 10.0),
    ConstructionKind.QUADRATIC: (-10.0, 10.0),
    ConstructionKind.LP: (-10.0, 10.0),
    ConstructionKind.BIG_LP: (-10.0, 10.0),
    ConstructionKind.COMPOSE_QUADRATIC: (-10.0, 10.0),
    ConstructionKind.EXP: (-2.0, 2.0),
    ConstructionKind.EXP_SQUARE: (-1.0, 1.0),
    # exp(expm1(t^2)^2) overflows for t above ~1.8
    ConstructionKind.EXP_SQUARE_COMPOSED: (-0.5, 0.5),
}

DEFAULT_DIM = 3
DEFAULT_GRID = 8


@dataclass(frozen=True)
class BaseMetric(DistanceFn):
    """A DistanceFn that also satisfies the ordinary triangle inequality."""


def _params(**values: Any) -> ConstructionParams:
    try:
        return ConstructionParams(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first.get("loc", ()))
        raise DomainError(f"Invalid construction parameter {field}: {first.get('msg')}") from exc


def _scalar_pair(x: Point, y: Point, label: str) -> Tuple[float, float]:
    if not isinstance(x, Scalar) or not isinstance(y, Scalar):
        raise DomainError(f"{label} is defined on scalars")
    return x.value, y.value


def _same_length(x: Any, y: Any, kind: type, label: str) -> None:
    if not isinstance(x, kind) or not isinstance(y, kind):
        raise DomainError(f"{label} is defined on {kind.__name__} points")
    if len(x) != len(y):
        raise DomainError(f"{label}: length mismatch {len(x)} != {len(y)}")


def absolute_metric() -> BaseMetric:
    """|x - y| on scalars."""
    def evaluate(x: Point, y: Point) -> float:
        a, b = _scalar_pair(x, y, "absolute")
        return abs(a - b)

    return BaseMetric(
        evaluator=evaluate,
        label="|x-y|",
        descriptor=ConstructionDescriptor(
            kind=ConstructionKind.ABSOLUTE, declared=SpaceParams(b=1.0, rho=0.0)
        ),
    )


def euclidean_metric(dim: Optional[int] = None) -> BaseMetric:
    """Euclidean distance on vectors; ``dim`` only sets the sampling dimension."""
    def evaluate(x: Point, y: Point) -> float:
        _same_length(x, y, Vector, "euclidean")
        return math.dist(x.values, y.values)  # type: ignore[union-attr]

    return BaseMetric(
        evaluator=evaluate,
        label="euclidean",
        descriptor=ConstructionDescriptor(
            kind=ConstructionKind.EUCLIDEAN,
            params=_params(dim=dim or DEFAULT_DIM),
            declared=SpaceParams(b=1.0, rho=0.0),
        ),
    )


def _compose(
    kind: ConstructionKind,
    base: DistanceFn,
    outer: Callable[[float], float],
    label: str,
    params: ConstructionParams,
    declared: Optional[SpaceParams],
) -> Construction:
    def evaluate(x: Point, y: Point) -> float:
        return outer(base(x, y))

    descriptor = ConstructionDescriptor(kind=kind, params=params, declared=declared, base=base.descriptor)
    return DistanceFn(evaluator=evaluate, label=label, descriptor=descriptor), declared


def quadratic_supra(dm: DistanceFn, a: float, scale: float) -> Construction:
    """dm (a dm + scale), a suprametric with rho = 2a/scale."""
    params = _params(a=a, scale=scale)
    declared = SpaceParams(b=1.0, rho=2.0 * a / scale)
    return _compose(
        ConstructionKind.QUADRATIC, dm, lambda t: t * (a * t + scale),
        f"quadratic(a={a:g}, scale={scale:g}) over {dm.label}", params, declared,
    )


def exp_square_supra(dm: DistanceFn, beta: float) -> Construction:
    """exp(beta dm^2) - 1, declared (1, 1)."""
    params = _params(beta=beta)
    return _compose(
        ConstructionKind.EXP_SQUARE, dm, lambda t: math.expm1(beta * t * t),
        f"exp-square(beta={beta:g}) over {dm.label}", params, SpaceParams(b=1.0, rho=1.0),
    )


def exp_supra(dm: DistanceFn, gamma: float) -> Construction:
    """gamma (exp(dm) - 1), declared (1, 1/gamma)."""
    params = _params(gamma=gamma)
    return _compose(
        ConstructionKind.EXP, dm, lambda t: gamma * math.expm1(t),
        f"exp(gamma={gamma:g}) over {dm.label}", params, SpaceParams(b=1.0, rho=1.0 / gamma),
    )


def _power_mean(diffs: Any, p: float, weight: float) -> float:
    diffs = [abs(v) for v in diffs]
    if len(diffs) == 1 and weight == 1.0:
        return diffs[0]
    return (weight * math.fsum(v ** p for v in diffs)) ** (1.0 / p)


def lp_distance(p: float, dim: Optional[int] = None) -> Construction:
    """(sum |x_i - y_i|^p)^(1/p) on equal-length vectors, a b-metric with b = 2^(1/p).

    A single coordinate returns |x - y| exactly.
    """
    params = _params(p=p, dim=dim or DEFAULT_DIM)

    def evaluate(x: Point, y: Point) -> float:
        _same_length(x, y, Vector, "lp")
        return _power_mean((a - b for a, b in zip(x.values, y.values)), p, 1.0)  # type: ignore[union-attr]

    declared = SpaceParams(b=2.0 ** (1.0 / p), rho=0.0)
    descriptor = ConstructionDescriptor(kind=ConstructionKind.LP, params=params, declared=declared)
    return DistanceFn(evaluator=evaluate, label=f"lp(p={p:g})", descriptor=descriptor), declared


def Lp_distance(p: float, grid: Optional[int] = None) -> Construction:
    """((1/m) sum |x_i - y_i|^p)^(1/p) on grid functions (midpoint rule, m cells)."""
    params = _params(p=p, grid=grid or DEFAULT_GRID)

    def evaluate(x: Point, y: Point) -> float:
        _same_length(x, y, GridFn, "Lp")
        m = len(x)  # type: ignore[arg-type]
        return _power_mean((a - b for a, b in zip(x.values, y.values)), p, 1.0 / m)  # type: ignore[union-attr]

    declared = SpaceParams(b=2.0 ** (1.0 / p), rho=0.0)
    descriptor = ConstructionDescriptor(kind=ConstructionKind.BIG_LP, params=params, declared=declared)
    return DistanceFn(evaluator=evaluate, label=f"Lp(p={p:g})", descriptor=descriptor), declared


def _composed_declaration(base: Optional[ConstructionDescriptor]) -> Optional[SpaceParams]:
    if base is None:
        return None
    if base.kind in (ConstructionKind.LP, ConstructionKind.BIG_LP) and base.params.p is not None:
        p = base.params.p
        return SpaceParams(b=4.0 ** (1.0 / p), rho=8.0 ** (1.0 / p))
    if base.kind is ConstructionKind.QUADRATIC and base.params.a == 1 and base.params.scale == 2:
        return SpaceParams(b=1.0, rho=1.0)
    return None


def compose_quadratic(d0: DistanceFn, params0: Optional[SpaceParams] = None) -> Construction:
    """d0 (d0 + 1).

    Declared (4^(1/p), 8^(1/p)) over the lp/Lp b-metrics and (1, 1) over
    quadratic(a=1, scale=2); any other base is left undeclared. ``params0``
    is recorded in the log only.
    """
    declared = _composed_declaration(d0.descriptor)
    if declared is None:
        logger.info(f"compose_quadratic over {d0.label} (params {params0}) has no declared parameters")
    return _compose(
        ConstructionKind.COMPOSE_QUADRATIC, d0, lambda t: t * (t + 1.0),
        f"compose-quadratic over {d0.label}", ConstructionParams(), declared,
    )


def exp_square_of_supra(d0: DistanceFn) -> Construction:
    """exp(d0^2) - 1, declared (1, 1) when d0 is exp-square with beta = 1."""
    base = d0.descriptor
    declared = None
    if base is not None and base.kind is ConstructionKind.EXP_SQUARE and base.params.beta == 1:
        declared = SpaceParams(b=1.0, rho=1.0)
    return _compose(
        ConstructionKind.EXP_SQUARE_COMPOSED, d0, lambda t: math.expm1(t * t),
        f"exp-square over {d0.label}", ConstructionParams(), declared,
    )


def discrete_distance() -> Construction:
    """The piecewise distance on {0, 1, 1/2, ...}, declared (3/2, 7)."""
    def evaluate(x: Point, y: Point) -> float:
        if not isinstance(x, DPoint) or not isinstance(y, DPoint):
            raise DomainError("discrete distance is defined on discrete points")
        return ddist(x, y)

    declared = SpaceParams(b=1.5, rho=7.0)
    descriptor = ConstructionDescriptor(kind=ConstructionKind.DISCRETE, declared=declared)
    return DistanceFn(evaluator=evaluate, label="discrete", descriptor=descriptor), declared


def _build_base(desc: ConstructionDescriptor, default: ConstructionDescriptor) -> DistanceFn:
    d, _ = build_construction(desc.base or default)
    return d


def build_construction(desc: ConstructionDescriptor) -> Construction:
    """Rebuild a construction from its descriptor (the inverse of ``DistanceFn.descriptor``)."""
    kind, params = desc.kind, desc.params
    absolute = ConstructionDescriptor(kind=ConstructionKind.ABSOLUTE)

    def need(name: str) -> Any:
        value = getattr(params, name)
        if value is None:
            raise DomainError(f"Construction {kind.value} needs parameter {name}")
        return value

    if kind is ConstructionKind.ABSOLUTE:
        metric = absolute_metric()
        return metric, metric.descriptor.declared  # type: ignore[union-attr]
    if kind is ConstructionKind.EUCLIDEAN:
        metric = euclidean_metric(params.dim)
        return metric, metric.descriptor.declared  # type: ignore[union-attr]
    if kind is ConstructionKind.QUADRATIC:
        return quadratic_supra(_build_base(desc, absolute), need("a"), need("scale"))
    if kind is ConstructionKind.EXP_SQUARE:
        return exp_square_supra(_build_base(desc, absolute), need("beta"))
    if kind is ConstructionKind.EXP:
        return exp_supra(_build_base(desc, absolute), need("gamma"))
    if kind is ConstructionKind.LP:
        return lp_distance(need("p"), params.dim)
    if kind is ConstructionKind.BIG_LP:
        return Lp_distance(need("p"), params.grid)
    if kind is ConstructionKind.COMPOSE_QUADRATIC:
        if desc.base is None:
            raise DomainError("compose-quadratic needs a base construction")
        return compose_quadratic(_build_base(desc, absolute))
    if kind is ConstructionKind.EXP_SQUARE_COMPOSED:
        default = ConstructionDescriptor(kind=ConstructionKind.EXP_SQUARE, params=_params(beta=1.0))
        return exp_square_of_supra(_build_base(desc, default))
    if kind is ConstructionKind.DISCRETE:
        return discrete_distance()
    raise DomainError(f"Unknown construction kind {kind!r}")


def _innermost(desc: ConstructionDescriptor) -> ConstructionDescriptor:
    while desc.base is not None:
        desc = desc.base
    return desc


def default_box(desc: ConstructionDescriptor) -> Tuple[float, float]:
    """Sampling box of the outermost construction."""
    return DEFAULT_BOXES.get(desc.kind, (-10.0, 10.0))


def default_sampler(desc: ConstructionDescriptor, discrete_n: int = 200) -> PointSampler:
    """Point sampler matching the construction's point kind and sampling box."""
    low, high = default_box(desc)
    inner = _innermost(desc)
    if inner.kind is ConstructionKind.DISCRETE:
        return DiscreteSampler(max_index=discrete_n)
    if inner.kind in (ConstructionKind.EUCLIDEAN, ConstructionKind.LP):
        return VectorSampler(dim=inner.params.dim or DEFAULT_DIM, low=low, high=high)
    if inner.kind is ConstructionKind.BIG_LP:
        return GridSampler(grid=inner.params.grid or DEFAULT_GRID, low=low, high=high)
    return ScalarSampler(low=low, high=high)


def non_metric_witness(d: DistanceFn) -> Tuple[float, float, float]:
    """(d(0,1), d(1,2), d(0,2)) on scalars; d(0,1) + d(1,2) < d(0,2) shows d is no metric."""
    zero, one, two = Scalar(0.0), Scalar(1.0), Scalar(2.0)
    return d(zero, one), d(one, two), d(zero, two)
