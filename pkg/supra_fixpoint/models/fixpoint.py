from typing import List, Optional

from pydantic import BaseModel, Field

from supra_fixpoint.models.points import PointField


class IterationTrace(BaseModel):
    """x_0, x_1 = f x_0, ... and the step distances d_i = d(x_i, x_{i+1})."""
    points: List[PointField] = []
    step_distances: List[float] = []


class FixedPointResult(BaseModel):
    x_star: PointField
    iterations: int = Field(..., ge=0)
    residual: float
    converged: bool
    step_tol: float
    trace: IterationTrace = IterationTrace()


class CauchyCertificate(BaseModel):
    """Constants witnessing the Cauchy property of a Picard orbit.

    ``threshold`` is eps / (b + sqrt(b^2 + rho eps)), the largest h with
    2 b h + rho h^2 <= eps; ``q`` is the smallest q >= 2 with psi^q(eps) < h.
    """
    epsilon: float
    q: int = Field(..., ge=2)
    c_q: float
    threshold: float
    psi_q_epsilon: float
    esp_slack: float
    series_tail: Optional[float] = None


class ContractionViolation(BaseModel):
    x: PointField
    y: PointField
    image_distance: float
    bound: float


class ContractionReport(BaseModel):
    """Sampled check of d(f x, f y) <= psi(d(x, y))."""
    pairs_checked: int
    tolerance: float
    violations: List[ContractionViolation] = []
    # Largest d(fx, fy) - psi(d(x, y)) observed
    worst_excess: Optional[float] = None

    @property
    def passed(self) -> bool:
        return not self.violations


class BallEscape(BaseModel):
    z: PointField
    distance: float


class InvariantBallReport(BaseModel):
    epsilon: float
    q: int
    threshold: float
    p: int
    center: PointField
    gaps: List[float] = Field(default_factory=list, description="d(x_{(m+1)q}, x_{mq}) for m = 0..max_m")
    samples: int
    orbit_samples: int
    perturbation_samples: int
    escapes: List[BallEscape] = []
    max_image_distance: Optional[float] = None
    contraction: ContractionReport

    @property
    def passed(self) -> bool:
        return not self.escapes


class UniquenessReport(BaseModel):
    starts: List[PointField]
    fixed_points: List[PointField]
    converged: List[bool]
    tolerance: float
    max_pairwise_distance: Optional[float] = None
    unique: bool
    inconclusive: bool = False


class LawViolation(BaseModel):
    index: int
    lhs: float
    rhs: float


class LawReport(BaseModel):
    """Check of an inequality along an orbit (step law or power law)."""
    law: str
    checked: int
    tolerance: float
    violations: List[LawViolation] = []

    @property
    def passed(self) -> bool:
        return not self.violations
