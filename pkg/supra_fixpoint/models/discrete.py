from typing import List, Optional

from pydantic import BaseModel, Field

from supra_fixpoint.models.points import PointField


class LemmaCheck(BaseModel):
    """The six exponential inequalities evaluated at one (s, t, b)."""
    s: float
    t: float
    b: float
    i: bool
    ii: bool
    iii: bool
    i_prime: bool
    ii_prime: bool
    iii_prime: bool

    @property
    def all_hold(self) -> bool:
        return all((self.i, self.ii, self.iii, self.i_prime, self.ii_prime, self.iii_prime))


class LemmaSweepReport(BaseModel):
    samples: int
    seed: int
    bs: List[float]
    failures: int = 0
    # First few failing evaluations, if any
    examples: List[LemmaCheck] = []


class ExhaustiveSummary(BaseModel):
    N: int
    b: float
    rho: float
    triples: int
    violations: int
    worst_defect: Optional[float] = None


class BallSummary(BaseModel):
    center: PointField
    radius: float
    N: int
    members: List[PointField]


class DiscontinuitySummary(BaseModel):
    N: int
    limit_at_0: float
    limit_at_1: float
    d_1_0: float

    @property
    def discontinuous(self) -> bool:
        return self.limit_at_1 != self.d_1_0


class NonOpenSummary(BaseModel):
    N: int = Field(..., description="Largest index searched for a witness")
    radii: List[float]
    required: List[int] = Field(..., description="Index of the witness 1/(2n) each radius needs")
    witnesses: List[Optional[PointField]]

    @property
    def all_found(self) -> bool:
        return all(w is not None for w in self.witnesses)


class PathologyReport(BaseModel):
    """Everything the discrete demo checks, in one report."""
    exhaustive: ExhaustiveSummary
    ball: BallSummary
    non_open: NonOpenSummary
    discontinuity: DiscontinuitySummary
    lemma: LemmaSweepReport = Field(..., description="Seeded sweep of the exponential inequalities")

    @property
    def passed(self) -> bool:
        return (
            self.exhaustive.violations == 0
            and [str(m) for m in self.ball.members] == ["0", "1"]
            and self.non_open.all_found
            and self.discontinuity.discontinuous
            and self.lemma.failures == 0
        )
