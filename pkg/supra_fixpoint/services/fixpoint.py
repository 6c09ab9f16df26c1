"""Picard iteration with contraction checks and convergence certificates.

The solver iterates x_{n+1} = f(x_n) in a b-suprametric space (X, d) for a
map with d(f x, f y) <= psi(d(x, y)). Alongside the orbit it computes the
constants that show the orbit is Cauchy:

* q and the threshold eps / (b + sqrt(b^2 + rho eps)) behind the invariant
  ball f^q(B(x_pq, eps)) inside B(x_pq, eps);
* c_q and the elementary symmetric polynomial bound on d(x_mq, x_mq+k);
* the series bound sum_i b psi^i(d_0) prod_{j<i} (b + rho psi^j(d_0)) when
  psi satisfies the ratio condition.
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from supra_fixpoint.core.config import settings
from supra_fixpoint.core.exceptions import (
    CapExceededError,
    DivergenceError,
    DomainError,
    NumericOverflowError,
    PreconditionError,
)
from supra_fixpoint.core.logging import get_logger, log_structured
from supra_fixpoint.models.fixpoint import (
    BallEscape,
    CauchyCertificate,
    ContractionReport,
    ContractionViolation,
    FixedPointResult,
    InvariantBallReport,
    IterationTrace,
    LawReport,
    LawViolation,
    UniquenessReport,
)
from supra_fixpoint.models.points import DPoint, GridFn, Point, Scalar, Vector
from supra_fixpoint.models.space import SpaceParams
from supra_fixpoint.services.core_spaces import DistanceFn, distance
from supra_fixpoint.services.matkowski import ComparisonFunction, iterate
from supra_fixpoint.services.samplers import PointSampler

logger = get_logger(__name__)

# Ratio below which a series term counts as contracting
RATIO_CEILING = 1.0 - 1e-9
# Relative size at which a series term is negligible
NEGLIGIBLE_TERM = 1e-16


@dataclass(frozen=True)
class ContractionProblem:
    distance: DistanceFn
    params: SpaceParams
    map: Callable[[Point], Point]
    psi: ComparisonFunction
    x0: Point
    label: str = "f"


def _apply(problem: ContractionProblem, x: Point) -> Point:
    try:
        y = problem.map(x)
    except OverflowError as exc:
        raise DivergenceError(f"{problem.label} overflowed at {x}") from exc
    if type(y) is not type(x):
        raise DomainError(
            f"{problem.label} sent a {type(x).__name__} to a {type(y).__name__}"
        )
    return y


def _power(problem: ContractionProblem, x: Point, n: int) -> Point:
    for _ in range(n):
        x = _apply(problem, x)
    return x


def _step_distance(problem: ContractionProblem, x: Point, y: Point, iteration: int) -> float:
    try:
        return distance(problem.distance, x, y)
    except NumericOverflowError as exc:
        raise DivergenceError(
            f"Non-finite step distance at iteration {iteration}: {exc.detail}", iteration=iteration
        ) from exc


# -- contraction ---------------------------------------------------------


def verify_contraction(
    problem: ContractionProblem,
    sampler: Optional[PointSampler] = None,
    n_pairs: Optional[int] = None,
    tol: float = 1e-12,
    seed: Optional[int] = None,
    pairs: Optional[Sequence[Tuple[Point, Point]]] = None,
) -> ContractionReport:
    """Check d(f x, f y) <= psi(d(x, y)) + tol max(1, psi(d(x, y))) on sampled or given pairs."""
    if pairs is None:
        if sampler is None:
            raise DomainError("verify_contraction needs a sampler or explicit pairs")
        n_pairs = settings.samples if n_pairs is None else n_pairs
        if n_pairs < 1:
            raise DomainError(f"n_pairs must be >= 1, got {n_pairs}")
        rng = np.random.default_rng(settings.seed if seed is None else seed)
        pairs = list(zip(sampler.sample(rng, n_pairs), sampler.sample(rng, n_pairs)))
    elif not pairs:
        raise DomainError("verify_contraction needs at least one pair")

    violations: List[ContractionViolation] = []
    worst: Optional[float] = None
    for x, y in pairs:
        image = distance(problem.distance, _apply(problem, x), _apply(problem, y))
        bound = problem.psi(distance(problem.distance, x, y))
        excess = image - bound
        if worst is None or excess > worst:
            worst = excess
        if excess > tol * max(1.0, abs(bound)):
            violations.append(ContractionViolation(x=x, y=y, image_distance=image, bound=bound))

    report = ContractionReport(
        pairs_checked=len(pairs), tolerance=tol, violations=violations, worst_excess=worst
    )
    log_structured(logger, "info", "contraction verified", {
        "map": problem.label, "pairs": len(pairs), "violations": len(violations),
    })
    return report


# -- iteration -----------------------------------------------------------


def picard(
    problem: ContractionProblem,
    max_iter: Optional[int] = None,
    step_tol: Optional[float] = None,
) -> FixedPointResult:
    """Iterate until a step distance drops below step_tol or max_iter steps were taken."""
    max_iter = settings.max_iter if max_iter is None else max_iter
    step_tol = settings.step_tol if step_tol is None else step_tol
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    if step_tol <= 0:
        raise DomainError(f"step_tol must be > 0, got {step_tol}")
    ceiling = settings.divergence_ceiling

    x = problem.x0
    points: List[Point] = [x]
    steps: List[float] = []
    converged = False
    for k in range(1, max_iter + 1):
        y = _apply(problem, x)
        step = _step_distance(problem, x, y, k)
        if step > ceiling:
            raise DivergenceError(
                f"Step distance {step:g} exceeded {ceiling:g} at iteration {k}", iteration=k
            )
        points.append(y)
        steps.append(step)
        log_structured(logger, "debug", "picard step", {"iteration": k, "step": step})
        x = y
        if step < step_tol:
            converged = True
            break

    residual = _step_distance(problem, x, _apply(problem, x), len(steps) + 1)
    result = FixedPointResult(
        x_star=x,
        iterations=len(steps),
        residual=residual,
        converged=converged,
        step_tol=step_tol,
        trace=IterationTrace(points=points, step_distances=steps),
    )
    log_structured(logger, "info", "picard converged" if converged else "picard hit max_iter", {
        "map": problem.label, "iterations": len(steps), "residual": residual,
    })
    return result


def orbit(problem: ContractionProblem, length: int) -> List[Point]:
    """x_0, ..., x_length."""
    if length < 0:
        raise DomainError(f"length must be >= 0, got {length}")
    points = [problem.x0]
    for _ in range(length):
        points.append(_apply(problem, points[-1]))
    return points


def check_step_law(problem: ContractionProblem, trace: IterationTrace, tol: float = 1e-12) -> LawReport:
    """d_{i+1} <= psi(d_i) along a trace."""
    steps = trace.step_distances
    violations = []
    for i, (current, following) in enumerate(zip(steps, steps[1:])):
        bound = problem.psi(current)
        if following > bound + tol:
            violations.append(LawViolation(index=i, lhs=following, rhs=bound))
    return LawReport(law="step", checked=max(0, len(steps) - 1), tolerance=tol, violations=violations)


def check_power_law(problem: ContractionProblem, n: int, m_max: int, tol: float = 1e-9) -> LawReport:
    """d(x_{(m+1)n}, x_{mn}) <= psi^{mn}(d(x_n, x_0)) for m = 0..m_max."""
    if n < 1 or m_max < 0:
        raise DomainError(f"need n >= 1 and m_max >= 0, got n={n}, m_max={m_max}")
    points = orbit(problem, (m_max + 1) * n)
    d_n0 = distance(problem.distance, points[n], points[0])
    violations = []
    for m in range(m_max + 1):
        lhs = distance(problem.distance, points[(m + 1) * n], points[m * n])
        rhs = iterate(problem.psi, m * n, d_n0)
        if lhs > rhs + tol:
            violations.append(LawViolation(index=m, lhs=lhs, rhs=rhs))
    return LawReport(law=f"power(n={n})", checked=m_max + 1, tolerance=tol, violations=violations)


# -- certificate constants -------------------------------------------------


def ball_threshold(params: SpaceParams, epsilon: float) -> float:
    b, rho = params.b, params.rho
    return epsilon / (b + math.sqrt(b * b + rho * epsilon))


def c_q_constant(params: SpaceParams, q: int) -> float:
    """max over i = 1..q-1 of C(q, i) b^(q-i) rho^(i-1), with rho^0 = 1."""
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    b, rho = params.b, params.rho
    return max(
        math.comb(q, i) * b ** (q - i) * (1.0 if i == 1 else rho ** (i - 1))
        for i in range(1, q)
    )


def q_threshold(
    psi: ComparisonFunction,
    params: SpaceParams,
    epsilon: float,
    q_cap: Optional[int] = None,
) -> CauchyCertificate:
    """Smallest q >= 2 with psi^q(eps) < eps / (b + sqrt(b^2 + rho eps))."""
    q_cap = settings.q_cap if q_cap is None else q_cap
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise DomainError(f"epsilon must be a finite value > 0, got {epsilon}")
    threshold = ball_threshold(params, epsilon)
    value = iterate(psi, 1, epsilon)
    for q in range(2, q_cap + 1):
        value = iterate(psi, 1, value)
        if value < threshold:
            c_q = c_q_constant(params, q)
            return CauchyCertificate(
                epsilon=epsilon,
                q=q,
                c_q=c_q,
                threshold=threshold,
                psi_q_epsilon=value,
                esp_slack=epsilon / (epsilon + q * c_q),
            )
    raise CapExceededError(
        f"No q <= {q_cap} with {psi.label}^q({epsilon:g}) < {threshold:g}", cap=q_cap
    )


def _esp_all(xs: Sequence[float]) -> List[float]:
    e = [1.0] + [0.0] * len(xs)
    for count, x in enumerate(xs, start=1):
        for i in range(count, 0, -1):
            e[i] += x * e[i - 1]
    return e


def esp(i: int, xs: Sequence[float]) -> float:
    """Elementary symmetric polynomial e_i(xs)."""
    if not 1 <= i <= len(xs):
        raise DomainError(f"esp index {i} outside 1..{len(xs)}")
    return _esp_all(xs)[i]


def chain_bound(params: SpaceParams, ds: Sequence[float]) -> float:
    """T(d_1) = d_1, T(d_1, ..., d_k) = b (d_1 + T') + rho d_1 T' with T' = T(d_2, ..., d_k)."""
    if not ds:
        raise DomainError("chain_bound needs at least one distance")
    b, rho = params.b, params.rho
    total = float(ds[-1])
    for d in reversed(ds[:-1]):
        total = b * (d + total) + rho * d * total
    return total


def esp_bound(params: SpaceParams, ds: Sequence[float]) -> float:
    """sum_{i=1..k} b^(k-i) rho^(i-1) e_i(ds), with rho^0 = 1."""
    if not ds:
        raise DomainError("esp_bound needs at least one distance")
    k = len(ds)
    e = _esp_all(ds)
    b, rho = params.b, params.rho
    return math.fsum(
        b ** (k - i) * (1.0 if i == 1 else rho ** (i - 1)) * e[i] for i in range(1, k + 1)
    )


def series_bound(
    params: SpaceParams,
    psi: ComparisonFunction,
    d0: float,
    p: int,
    q: Optional[int] = None,
    max_terms: Optional[int] = None,
    patience: Optional[int] = None,
) -> float:
    """sum_{i=p}^{q-1} b psi^i(d0) prod_{j<i} (b + rho psi^j(d0)); q None means infinity.

    The infinite sum stops once a term is negligible and the last ``patience``
    term ratios stayed below 1, adding the geometric majorant of the tail.
    Ratios pinned at or above 1 raise DivergenceError.
    """
    if d0 < 0:
        raise DomainError(f"d0 must be >= 0, got {d0}")
    if p < 0 or (q is not None and q < p):
        raise DomainError(f"need 0 <= p <= q, got p={p}, q={q}")
    max_terms = settings.series_max_terms if max_terms is None else max_terms
    patience = settings.series_patience if patience is None else patience
    b, rho = params.b, params.rho

    acc = 0.0
    value, product = float(d0), 1.0
    previous: Optional[float] = None
    ratios: List[float] = []
    i = 0
    while q is None or i < q:
        if i > max_terms:
            raise DivergenceError(f"series did not settle within {max_terms} terms", iteration=i)
        term = b * value * product
        if not math.isfinite(term):
            raise DivergenceError(f"series term {i} is not finite", iteration=i)
        if previous:
            ratios.append(term / previous)
            ratios = ratios[-patience:]
        if i >= p:
            acc += term
        if q is None:
            if term == 0.0 and i >= p:
                return acc
            if len(ratios) == patience:
                if all(r >= RATIO_CEILING for r in ratios) and all(
                    a <= c for a, c in zip(ratios, ratios[1:])
                ):
                    raise DivergenceError(
                        f"series ratios stayed >= 1 (last {ratios[-1]:.12g})", iteration=i
                    )
                ratio = max(ratios)
                if i >= p and term < NEGLIGIBLE_TERM * acc and ratio < RATIO_CEILING:
                    return acc + term * ratio / (1.0 - ratio)
        product *= b + rho * value
        value = iterate(psi, 1, value)
        previous = term
        i += 1
    return acc


def four_point_expansion(params: SpaceParams, u1: float, u2: float, u3: float, u4: float) -> float:
    """Expanded bound on d(x_1, x_5) from the four consecutive distances u1..u4."""
    if min(u1, u2, u3, u4) < 0:
        raise DomainError("four_point_expansion needs nonnegative distances")
    b, rho = params.b, params.rho
    return (
        (u3 + u4) * b ** 3
        + u2 * b ** 2
        + (u3 * u4 + u2 * (u3 + u4) + u1 * (u3 + u4)) * rho * b ** 2
        + (u2 * u3 * u4 + u1 * (u3 * u4 + u2 * (u3 + u4))) * b * rho ** 2
        + u1 * u2 * b * rho
        + b * u1
        + rho ** 3 * u1 * u2 * u3 * u4
    )


def four_point_simplified(params: SpaceParams, epsilon: float) -> float:
    """eps (eps^3 + eps^2 + eps + 1) max{rho^3, 4 b rho^2, 6 b^2 rho, 4 b^3}."""
    if epsilon < 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    b, rho = params.b, params.rho
    coefficient = max(rho ** 3, 4 * b * rho ** 2, 6 * b ** 2 * rho, 4 * b ** 3)
    return epsilon * (epsilon ** 3 + epsilon ** 2 + epsilon + 1) * coefficient


# -- invariant ball and uniqueness ---------------------------------------


def _shift(point: Point, delta: np.ndarray) -> Optional[Point]:
    if isinstance(point, Scalar):
        return Scalar(point.value + float(delta[0]))
    if isinstance(point, Vector):
        return Vector(tuple((np.asarray(point.values) + delta[: len(point)]).tolist()))
    if isinstance(point, GridFn):
        return GridFn(tuple((np.asarray(point.values) + delta[: len(point)]).tolist()))
    return None


def _perturbations(center: Point, count: int, rng: np.random.Generator, span: float) -> List[Point]:
    """Radial perturbations center + r u, r log-spaced on [1e-12, span], u a random unit direction."""
    if isinstance(center, DPoint) or count < 1:
        return []
    dim = 1 if isinstance(center, Scalar) else len(center)  # type: ignore[arg-type]
    radii = np.logspace(-12.0, math.log10(max(span, 1e-12)), count)
    out = []
    for r in radii:
        direction = rng.normal(size=dim)
        norm = float(np.linalg.norm(direction)) or 1.0
        shifted = _shift(center, r * direction / norm)
        if shifted is not None:
            out.append(shifted)
    return out


def _guard_pairs(problem: ContractionProblem, rng: np.random.Generator) -> List[Tuple[Point, Point]]:
    points = orbit(problem, 16)
    pairs = [(points[i], points[j]) for i in range(len(points)) for j in range(i + 1, len(points))]
    pairs += [(problem.x0, z) for z in _perturbations(problem.x0, 32, rng, 1.0)]
    return pairs


def invariant_ball_check(
    problem: ContractionProblem,
    epsilon: float,
    max_m: int = 1000,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> InvariantBallReport:
    """Empirical check that f^q maps B(x_pq, eps) into itself.

    Refuses (PreconditionError) when the map fails the contraction check on
    orbit pairs and radial perturbation pairs of x_0.
    """
    n_samples = settings.ball_samples if n_samples is None else n_samples
    rng = np.random.default_rng(settings.seed if seed is None else seed)

    contraction = verify_contraction(problem, pairs=_guard_pairs(problem, rng))
    if not contraction.passed:
        raise PreconditionError(
            f"{problem.label} is not a {problem.psi.label}-contraction on the guard pairs "
            f"({len(contraction.violations)} violations)",
            report=contraction,
        )

    cert = q_threshold(problem.psi, problem.params, epsilon)
    q, threshold = cert.q, cert.threshold
    points = orbit(problem, (max_m + 1) * q)
    gaps = [distance(problem.distance, points[(m + 1) * q], points[m * q]) for m in range(max_m + 1)]
    if gaps[-1] >= threshold:
        raise CapExceededError(
            f"d(x_(m+1)q, x_mq) still >= {threshold:g} at m = {max_m}", cap=max_m
        )
    p = max_m
    while p > 0 and gaps[p - 1] < threshold:
        p -= 1
    center = points[p * q]

    def in_ball(z: Point) -> bool:
        return distance(problem.distance, z, center) < epsilon

    orbit_samples = [z for z in points[p * q:] if in_ball(z)][: max(1, n_samples // 2)]
    span = _ball_span(center, in_ball)
    perturbed = [z for z in _perturbations(center, n_samples - len(orbit_samples), rng, span) if in_ball(z)]

    escapes: List[BallEscape] = []
    worst: Optional[float] = None
    for z in orbit_samples + perturbed:
        image = distance(problem.distance, _power(problem, z, q), center)
        worst = image if worst is None else max(worst, image)
        if not image < epsilon:
            escapes.append(BallEscape(z=z, distance=image))

    report = InvariantBallReport(
        epsilon=epsilon,
        q=q,
        threshold=threshold,
        p=p,
        center=center,
        gaps=gaps,
        samples=len(orbit_samples) + len(perturbed),
        orbit_samples=len(orbit_samples),
        perturbation_samples=len(perturbed),
        escapes=escapes,
        max_image_distance=worst,
        contraction=contraction,
    )
    log_structured(logger, "info", "invariant ball checked", {
        "map": problem.label, "epsilon": epsilon, "q": q, "p": p, "escapes": len(escapes),
    })
    return report


def _ball_span(center: Point, in_ball: Callable[[Point], bool]) -> float:
    """First power of ten whose diagonal shift of ``center`` leaves the ball (capped at 1e12)."""
    dim = len(center) if isinstance(center, (Vector, GridFn)) else 1
    span = 1e-12
    while span < 1e12:
        shifted = _shift(center, np.full(dim, span / math.sqrt(dim)))
        if shifted is None or not in_ball(shifted):
            break
        span *= 10.0
    return span


def uniqueness_check(
    problem: ContractionProblem,
    starts: Sequence[Point],
    tol: float = 1e-9,
    max_iter: Optional[int] = None,
    step_tol: Optional[float] = None,
) -> UniquenessReport:
    """Run picard from every start and compare the limits pairwise."""
    if len(starts) < 2:
        raise DomainError("uniqueness_check needs at least two starts")
    results = [
        picard(dataclasses.replace(problem, x0=start), max_iter=max_iter, step_tol=step_tol)
        for start in starts
    ]
    converged = [r.converged for r in results]
    limits = [r.x_star for r in results]
    spread = max(
        distance(problem.distance, a, b)
        for i, a in enumerate(limits)
        for b in limits[i + 1:]
    )
    inconclusive = not all(converged)
    return UniquenessReport(
        starts=list(starts),
        fixed_points=limits,
        converged=converged,
        tolerance=tol,
        max_pairwise_distance=spread,
        unique=not inconclusive and spread < tol,
        inconclusive=inconclusive,
    )


def certify(problem: ContractionProblem, result: FixedPointResult, epsilon: float) -> CauchyCertificate:
    """q_threshold for eps plus, when the series converges, its tail past the last iterate."""
    cert = q_threshold(problem.psi, problem.params, epsilon)
    steps = result.trace.step_distances
    d0 = steps[0] if steps else 0.0
    try:
        tail = series_bound(problem.params, problem.psi, d0, p=result.iterations)
    except DivergenceError as exc:
        logger.info(f"series tail unavailable for {problem.psi.label}: {exc.detail}")
        tail = None
    certificate = cert.model_copy(update={"series_tail": tail})
    log_structured(logger, "info", "certificate built", certificate.model_dump())
    return certificate
