"""The countable space {0, 1, 1/2, 1/3, ...} with its piecewise distance.

    d(x, y) = 0                 if x = y
            = 1/5               if {x, y} = {0, 1}
            = 1 - e^{-|x - y|}  if x != y and both lie in {0} U {1/(2n)}
            = 1/4               otherwise

The space is b-suprametric with (b, rho) = (3/2, 7), yet d is not continuous
in each variable and the ball of radius 9/40 around 1 is not open.
"""

import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from supra_fixpoint.core.config import settings
from supra_fixpoint.core.exceptions import DomainError
from supra_fixpoint.core.logging import get_logger, log_structured
from supra_fixpoint.models.discrete import (
    BallSummary,
    DiscontinuitySummary,
    ExhaustiveSummary,
    LemmaCheck,
    LemmaSweepReport,
    NonOpenSummary,
    PathologyReport,
)
from supra_fixpoint.models.points import DPoint, DTag
from supra_fixpoint.models.space import AxiomReport, SpaceClass, Violation

logger = get_logger(__name__)

B_DISCRETE = 1.5
RHO_DISCRETE = 7.0
# Radius that defines the ball around 1 (printed as B(1, 1/4))
BALL_RADIUS = 9.0 / 40.0
LEMMA_BS = (1.0, 1.5, 5.0)
# Largest index searched for a non-open witness; covers radii down to about 5e-7
WITNESS_N = 2_000_000


def ddist(x: DPoint, y: DPoint) -> float:
    if x == y:
        return 0.0
    if {x.tag, y.tag} == {DTag.ZERO, DTag.ONE}:
        return 0.2
    if x.in_even_family and y.in_even_family:
        return -math.expm1(-abs(x.value - y.value))
    return 0.25


def enumerate_points(N: int) -> List[DPoint]:
    """0, 1, 1/2, ..., 1/N in index order."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    return [DPoint.from_index(k) for k in range(N + 1)]


def distance_matrix(points: Sequence[DPoint]) -> np.ndarray:
    """Pairwise ddist over ``points`` (every entry evaluated through ddist)."""
    n = len(points)
    matrix = np.empty((n, n))
    for i, x in enumerate(points):
        for j in range(i, n):
            matrix[i, j] = ddist(x, points[j])
            matrix[j, i] = ddist(points[j], x)
    return matrix


def verify_inequality_exhaustive(
    N: Optional[int] = None,
    b: float = B_DISCRETE,
    rho: float = RHO_DISCRETE,
    tolerance: float = 1e-12,
) -> AxiomReport:
    """Check d1, d2 on all pairs and d3 on all ordered triples over {0, 1, ..., 1/N}."""
    N = settings.discrete_n if N is None else N
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    points = enumerate_points(N)
    M = distance_matrix(points)
    size = len(points)
    violations: List[Violation] = []

    diagonal = np.diagonal(M)
    for i in np.flatnonzero(diagonal != 0.0):
        violations.append(Violation(axiom="d1", x=points[i], y=points[i], defect=-abs(float(diagonal[i]))))
    off = ~np.eye(size, dtype=bool)
    for i, j in np.argwhere(off & (M <= 0.0)):
        violations.append(Violation(axiom="d1", x=points[i], y=points[j], defect=float(M[i, j])))
    for i, j in np.argwhere(np.triu(M != M.T)):
        violations.append(Violation(axiom="d2", x=points[i], y=points[j], defect=-abs(float(M[i, j] - M[j, i]))))

    # For fixed x: defect[y, z] = b (d(x,z) + d(z,y)) + rho d(x,z) d(z,y) - d(x,y)
    worst = math.inf
    for i in range(size):
        row = M[i]
        defect = b * (row[None, :] + M) + rho * row[None, :] * M - row[:, None]
        worst = min(worst, float(defect.min()))
        for y, z in np.argwhere(defect < -tolerance):
            violations.append(
                Violation(axiom="d3", x=points[i], y=points[y], z=points[z], defect=float(defect[y, z]))
            )

    cls = SpaceClass.b_suprametric(b, rho)
    report = AxiomReport(
        label="discrete",
        space_class=cls.label,
        params=cls.to_params(),
        samples_checked=size ** 3,
        seed=None,
        tolerance=tolerance,
        violations=violations,
        worst_defect=worst,
    )
    log_structured(logger, "info", "exhaustive discrete check finished", {
        "N": N, "triples": size ** 3, "violations": len(violations), "worst_defect": worst,
    })
    return report


def ball(center: DPoint, radius: float, N: int) -> List[DPoint]:
    """Members of {x : d(center, x) < radius} with index <= N, in index order."""
    if radius <= 0:
        raise DomainError(f"radius must be > 0, got {radius}")
    return [x for x in enumerate_points(N) if ddist(center, x) < radius]


def witness_half_index(r: float) -> int:
    """Smallest n >= 1 with 1 - e^{-1/(2n)} < r."""
    if r <= 0:
        raise DomainError(f"r must be > 0, got {r}")
    if r >= 1:
        return 1
    limit = -math.log1p(-r)
    n = max(1, math.floor(1.0 / (2.0 * limit)))
    while -math.expm1(-1.0 / (2 * n)) >= r:
        n += 1
    while n > 1 and -math.expm1(-1.0 / (2 * (n - 1))) < r:
        n -= 1
    return n


def non_open_witness(r: float, N: int) -> Optional[DPoint]:
    """A point 1/(2n) of B(0, r) outside B(1, 9/40), or None when 2n > N."""
    n = witness_half_index(r)
    if 2 * n > N:
        return None
    witness = DPoint.recip(2 * n)
    if ddist(DPoint.zero(), witness) < r and ddist(DPoint.one(), witness) >= BALL_RADIUS:
        return witness
    return None


def discontinuity_check(N: int) -> Tuple[float, float, float]:
    """(d(0, 1/(2N)), d(1, 1/(2N)), d(1, 0)); the first tends to 0, the second stays 1/4."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    probe = DPoint.recip(2 * N)
    return ddist(DPoint.zero(), probe), ddist(DPoint.one(), probe), ddist(DPoint.one(), DPoint.zero())


def _lemma_terms(s: np.ndarray, t: np.ndarray, b: float, tol: float) -> Tuple[np.ndarray, ...]:
    es, et, est, eabs = np.exp(-s), np.exp(-t), np.exp(-(t + s)), np.exp(-np.abs(s - t))
    return (
        eabs - 1 <= es - et + tol,
        es + est <= et + 1 + tol,
        es + et <= eabs + 1 + tol,
        b * (2 - et - eabs) >= 1 - es - tol,
        b * (2 - es - est) >= 1 - et - tol,
        b * (2 - et - es) >= 1 - eabs - tol,
    )


def lemma_check(s: float, t: float, b: float, tol: float = 1e-12) -> LemmaCheck:
    if s <= 0 or t <= 0:
        raise DomainError(f"s and t must be > 0, got s={s}, t={t}")
    if b < 1:
        raise DomainError(f"b must be >= 1, got {b}")
    flags = [bool(v) for v in _lemma_terms(np.array(s), np.array(t), b, tol)]
    return LemmaCheck(
        s=s, t=t, b=b,
        i=flags[0], ii=flags[1], iii=flags[2],
        i_prime=flags[3], ii_prime=flags[4], iii_prime=flags[5],
    )


def lemma_sweep(
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
    bs: Iterable[float] = LEMMA_BS,
    tol: float = 1e-12,
    keep: int = 10,
) -> LemmaSweepReport:
    """Evaluate the six inequalities at seeded (s, t) uniform on (0, 10]^2 for each b."""
    n_samples = settings.lemma_samples if n_samples is None else n_samples
    seed = settings.seed if seed is None else seed
    bs = [float(b) for b in bs]
    rng = np.random.default_rng(seed)
    s = 10.0 - rng.uniform(0.0, 10.0, size=n_samples)
    t = 10.0 - rng.uniform(0.0, 10.0, size=n_samples)

    failures = 0
    examples: List[LemmaCheck] = []
    for b in bs:
        ok = np.logical_and.reduce(_lemma_terms(s, t, b, tol))
        bad = np.flatnonzero(~ok)
        failures += int(bad.size)
        for k in bad[: max(0, keep - len(examples))]:
            examples.append(lemma_check(float(s[k]), float(t[k]), b, tol))

    return LemmaSweepReport(samples=n_samples, seed=seed, bs=bs, failures=failures, examples=examples)


def pathology_report(
    N: Optional[int] = None,
    lemma_samples: Optional[int] = None,
    seed: Optional[int] = None,
    ball_n: int = 1000,
    radii: Optional[Sequence[float]] = None,
    witness_n: int = WITNESS_N,
) -> PathologyReport:
    """Exhaustive check, the non-open ball, discontinuity and the lemma sweep in one report.

    Witnesses are searched among indices <= ``witness_n``; a radius whose witness lies
    beyond it reports None together with the index it would need.
    """
    N = settings.discrete_n if N is None else N
    exhaustive = verify_inequality_exhaustive(N)
    radii = list(np.logspace(-6.0, 0.0, 13)) if radii is None else list(radii)
    required = [2 * witness_half_index(float(r)) for r in radii]
    witnesses = [non_open_witness(float(r), witness_n) for r in radii]
    limit_0, limit_1, d_1_0 = discontinuity_check(ball_n)

    report = PathologyReport(
        exhaustive=ExhaustiveSummary(
            N=N,
            b=B_DISCRETE,
            rho=RHO_DISCRETE,
            triples=exhaustive.samples_checked,
            violations=len(exhaustive.violations),
            worst_defect=exhaustive.worst_defect,
        ),
        ball=BallSummary(
            center=DPoint.one(),
            radius=BALL_RADIUS,
            N=ball_n,
            members=ball(DPoint.one(), BALL_RADIUS, ball_n),
        ),
        non_open=NonOpenSummary(
            N=witness_n, radii=[float(r) for r in radii], required=required, witnesses=witnesses
        ),
        discontinuity=DiscontinuitySummary(N=ball_n, limit_at_0=limit_0, limit_at_1=limit_1, d_1_0=d_1_0),
        lemma=lemma_sweep(lemma_samples, seed),
    )
    log_structured(logger, "info", "pathology report built", {"N": N, "passed": report.passed})
    return report
