"""Distance functions, the four axiom systems and sampled axiom verification.

A triple (x, y, z) satisfies the b-suprametric inequality for (b, rho) iff its
defect

    b (d(x, z) + d(z, y)) + rho d(x, z) d(z, y) - d(x, y)

is nonnegative. ``check_axioms`` samples triples from a seeded sampler,
``check_triples`` walks an explicit list, and ``estimate_min_params``
returns the Pareto-minimal (b, rho) pairs a triple set admits.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from supra_fixpoint.core.config import settings
from supra_fixpoint.core.exceptions import DomainError, InfeasibleError, NumericOverflowError
from supra_fixpoint.core.logging import get_logger, log_structured
from supra_fixpoint.models.points import POINT_TYPES, Point, point_sort_key
from supra_fixpoint.models.space import (
    AxiomReport,
    ConstructionDescriptor,
    SpaceClass,
    SpaceParams,
    Violation,
)
from supra_fixpoint.services.samplers import PointSampler

logger = get_logger(__name__)

# Relative slack under which d(x,y) <= b S counts as satisfied when tracing the front
FRONT_SLACK = 1e-12

Triple = Tuple[Point, Point, Point]
ParetoFront = List[Tuple[float, float]]


@dataclass(frozen=True)
class DistanceFn:
    """A symmetric nonnegative two-point function vanishing exactly on the diagonal.

    ``descriptor`` is set by the constructions module so that compositions can
    recognise their base distance and the CLI can serialize it.
    """
    evaluator: Callable[[Point, Point], float]
    label: str
    descriptor: Optional[ConstructionDescriptor] = None

    def __call__(self, x: Point, y: Point) -> float:
        return distance(self, x, y)


def distance(d: DistanceFn, x: Point, y: Point) -> float:
    """Evaluate d(x, y).

    Negative values are returned as computed so that axiom checks can report
    them; only kind mismatches and non-finite results raise.
    """
    if not isinstance(x, POINT_TYPES) or not isinstance(y, POINT_TYPES):
        raise DomainError(f"{d.label}: not a point pair ({x!r}, {y!r})")
    if type(x) is not type(y):
        raise DomainError(
            f"{d.label}: mismatched point kinds {type(x).__name__} and {type(y).__name__}"
        )
    try:
        value = float(d.evaluator(x, y))
    except OverflowError as exc:
        raise NumericOverflowError(f"{d.label} overflowed at ({x}, {y})") from exc
    if not math.isfinite(value):
        raise NumericOverflowError(f"{d.label} returned {value} at ({x}, {y})")
    return value


def _defect(b: float, rho: float, dxy: float, dxz: float, dzy: float) -> float:
    return b * (dxz + dzy) + rho * dxz * dzy - dxy


def triple_defect(d: DistanceFn, params: SpaceParams, x: Point, y: Point, z: Point) -> float:
    """b (d(x,z) + d(z,y)) + rho d(x,z) d(z,y) - d(x,y); the axiom holds at the triple iff >= 0."""
    return _defect(params.b, params.rho, distance(d, x, y), distance(d, x, z), distance(d, z, y))


def _validate_points(points: Sequence[Point]) -> None:
    if not points:
        raise DomainError("Sampler produced no points")
    kind = type(points[0])
    for point in points:
        if not isinstance(point, POINT_TYPES):
            raise DomainError(f"Sampler produced a non-point {point!r}")
        if type(point) is not kind:
            raise DomainError(
                f"Sampler mixed point kinds {kind.__name__} and {type(point).__name__}"
            )


def _violation_key(v: Violation) -> tuple:
    return (v.axiom, point_sort_key(v.x), point_sort_key(v.y), point_sort_key(v.z))


def _scan(
    d: DistanceFn,
    params: Optional[SpaceParams],
    triples: Iterable[Triple],
    tolerance: float,
    diagonal_tolerance: float,
) -> Tuple[int, List[Violation], Optional[float]]:
    checked = 0
    violations: List[Violation] = []
    worst: Optional[float] = None
    for x, y, z in triples:
        checked += 1

        # d1 on the diagonal and off it
        dxx = distance(d, x, x)
        if abs(dxx) > diagonal_tolerance:
            violations.append(Violation(axiom="d1", x=x, y=x, defect=-abs(dxx)))
        dxy = distance(d, x, y)
        if dxy < 0 or (dxy == 0 and x != y):
            violations.append(Violation(axiom="d1", x=x, y=y, defect=dxy))

        # d2
        dyx = distance(d, y, x)
        if abs(dxy - dyx) > diagonal_tolerance * max(1.0, abs(dxy)):
            violations.append(Violation(axiom="d2", x=x, y=y, defect=-abs(dxy - dyx)))

        # d3
        if params is not None:
            defect = _defect(params.b, params.rho, dxy, distance(d, x, z), distance(d, z, y))
            if worst is None or defect < worst:
                worst = defect
            if defect < -tolerance:
                violations.append(Violation(axiom="d3", x=x, y=y, z=z, defect=defect))

    violations.sort(key=_violation_key)
    return checked, violations, worst


def sample_triples(sampler: PointSampler, n_samples: int, seed: int) -> List[Triple]:
    """The triples ``check_axioms`` draws for a given seed: x, y, z batches in that order."""
    rng = np.random.default_rng(seed)
    xs = sampler.sample(rng, n_samples)
    ys = sampler.sample(rng, n_samples)
    zs = sampler.sample(rng, n_samples)
    _validate_points(xs + ys + zs)
    return list(zip(xs, ys, zs))


def check_axioms(
    d: DistanceFn,
    cls: SpaceClass,
    sampler: PointSampler,
    n_samples: Optional[int] = None,
    tolerance: Optional[float] = None,
    seed: Optional[int] = None,
    diagonal_tolerance: Optional[float] = None,
) -> AxiomReport:
    """Check d1 and d2 on sampled pairs and d3 (per ``cls``) on sampled triples.

    The report depends only on the arguments: x, y and z are drawn as three
    batches of ``n_samples`` points from ``numpy.random.default_rng(seed)``.
    """
    n_samples = settings.samples if n_samples is None else n_samples
    tolerance = settings.axiom_tolerance if tolerance is None else tolerance
    seed = settings.seed if seed is None else seed
    diagonal_tolerance = settings.diagonal_tolerance if diagonal_tolerance is None else diagonal_tolerance
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    if tolerance < 0:
        raise DomainError(f"tolerance must be >= 0, got {tolerance}")

    triples = sample_triples(sampler, n_samples, seed)
    params = cls.to_params()
    checked, violations, worst = _scan(d, params, triples, tolerance, diagonal_tolerance)
    report = AxiomReport(
        label=d.label,
        space_class=cls.label,
        params=params,
        samples_checked=checked,
        seed=seed,
        tolerance=tolerance,
        violations=violations,
        worst_defect=worst,
    )
    log_structured(logger, "info", "axiom check finished", {
        "label": d.label,
        "class": cls.label,
        "sampler": sampler.describe(),
        "samples": checked,
        "violations": len(violations),
        "worst_defect": worst,
    })
    return report


def check_triples(
    d: DistanceFn,
    cls: SpaceClass,
    triples: Sequence[Triple],
    tolerance: Optional[float] = None,
    diagonal_tolerance: Optional[float] = None,
    label: Optional[str] = None,
) -> AxiomReport:
    """Deterministic variant of ``check_axioms`` over an explicit triple list."""
    tolerance = settings.axiom_tolerance if tolerance is None else tolerance
    diagonal_tolerance = settings.diagonal_tolerance if diagonal_tolerance is None else diagonal_tolerance
    if not triples:
        raise DomainError("check_triples needs at least one triple")
    _validate_points([p for triple in triples for p in triple])
    params = cls.to_params()
    checked, violations, worst = _scan(d, params, triples, tolerance, diagonal_tolerance)
    return AxiomReport(
        label=label or d.label,
        space_class=cls.label,
        params=params,
        samples_checked=checked,
        seed=None,
        tolerance=tolerance,
        violations=violations,
        worst_defect=worst,
    )


def pareto_front_from_terms(S: np.ndarray, P: np.ndarray, D: np.ndarray) -> ParetoFront:
    """Pareto-minimal vertices of {b >= 1, rho >= 0, b S_i + rho P_i >= D_i for all i}.

    S_i = d(x,z) + d(z,y), P_i = d(x,z) d(z,y), D_i = d(x,y). The feasible
    region is convex and upward closed; its lower-left boundary is the graph
    of rho_min(b) = max(0, max_i (D_i - b S_i) / P_i), an upper envelope of
    decreasing lines, traced here from b_lo to the point where it reaches 0.

    A constraint already met at b_lo up to the relative ``FRONT_SLACK`` is
    dropped, so a true metric yields exactly [(1.0, 0.0)].
    """
    S = np.asarray(S, dtype=float)
    P = np.asarray(P, dtype=float)
    D = np.asarray(D, dtype=float)

    infeasible = np.flatnonzero((S <= 0) & (P <= 0) & (D > 0))
    if infeasible.size:
        i = int(infeasible[0])
        raise InfeasibleError(
            f"Triple {i} has d(x,y) = {D[i]} > 0 with d(x,z) = d(z,y) = 0", triple=i
        )

    # Constraints without a product term only bound b from below; rounding excess snaps to 1
    linear_only = (P <= 0) & (S > 0)
    b_lo = 1.0
    if linear_only.any():
        ratio = float(np.max(D[linear_only] / S[linear_only]))
        if ratio > 1.0 + FRONT_SLACK:
            b_lo = ratio

    with_product = P > 0
    k = S[with_product] / P[with_product]
    c = D[with_product] / P[with_product]
    active = D[with_product] > b_lo * S[with_product] * (1.0 + FRONT_SLACK)
    k, c = k[active], c[active]
    if k.size == 0:
        return [(b_lo, 0.0)]

    # Upper envelope of rho = c - k b: slopes ascending (k descending), ties keep max c
    order = np.lexsort((-c, -k))
    k, c = k[order], c[order]
    keep = np.ones(k.size, dtype=bool)
    keep[1:] = k[1:] != k[:-1]
    k, c = k[keep].tolist(), c[keep].tolist()

    def cross(i: Tuple[float, float], j: Tuple[float, float]) -> float:
        return (i[1] - j[1]) / (i[0] - j[0])

    hull: List[Tuple[float, float]] = []
    for line in zip(k, c):
        while len(hull) >= 2 and cross(hull[-2], line) <= cross(hull[-2], hull[-1]):
            hull.pop()
        hull.append(line)

    breaks = [cross(hull[j], hull[j + 1]) for j in range(len(hull) - 1)] + [math.inf]
    j = next(i for i, right in enumerate(breaks) if right > b_lo)

    kj, cj = hull[j]
    front: ParetoFront = [(b_lo, cj - kj * b_lo)]
    while True:
        kj, cj = hull[j]
        zero = cj / kj
        if zero <= breaks[j]:
            front.append((zero, 0.0))
            break
        right = breaks[j]
        front.append((right, cj - kj * right))
        j += 1

    # Drop degenerate repeats so the front is strictly monotone
    cleaned: ParetoFront = [front[0]]
    for b, rho in front[1:]:
        if b > cleaned[-1][0] and rho < cleaned[-1][1]:
            cleaned.append((b, max(rho, 0.0)))
    return cleaned


def estimate_min_params(d: DistanceFn, triples: Sequence[Triple]) -> ParetoFront:
    """Pareto-minimal (b, rho) pairs under which every triple satisfies d3, sorted by b."""
    if not triples:
        raise DomainError("estimate_min_params needs at least one triple")
    S = np.empty(len(triples))
    P = np.empty(len(triples))
    D = np.empty(len(triples))
    for i, (x, y, z) in enumerate(triples):
        dxz, dzy = distance(d, x, z), distance(d, z, y)
        S[i], P[i], D[i] = dxz + dzy, dxz * dzy, distance(d, x, y)
    try:
        front = pareto_front_from_terms(S, P, D)
    except InfeasibleError as exc:
        i = exc.triple
        raise InfeasibleError(
            f"{d.label}: triple {tuple(str(p) for p in triples[i])} admits no (b, rho)", triple=i
        ) from exc
    log_structured(logger, "info", "pareto front estimated", {
        "label": d.label, "triples": len(triples), "vertices": len(front),
    })
    return front


def front_rho_at(front: ParetoFront, b: float) -> float:
    """Smallest feasible rho at ``b`` along the front (inf left of the front)."""
    if not front or b < front[0][0]:
        return math.inf
    for (b0, r0), (b1, r1) in zip(front, front[1:]):
        if b <= b1:
            return r0 + (r1 - r0) * (b - b0) / (b1 - b0)
    return front[-1][1]
