from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, model_validator


class Verdict(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"
    INCONCLUSIVE = "inconclusive"


class MembershipDiagnostics(BaseModel):
    """Per grid point traces behind a membership verdict."""
    psi_values: List[float] = []
    final_iterates: List[float] = []
    iterations: List[int] = []
    # "explicit", "closed-form" or "closed-form@<depth>" per grid point
    methods: List[str] = []
    ratio_estimates: List[Optional[float]] = []


class MembershipReport(BaseModel):
    """Numeric evidence for membership of psi in M (and in M_b when ``b`` is set).

    Membership is a statement about limits; the report only covers the grid
    it lists and flags results too close to the 1/b boundary as inconclusive.
    """
    label: str
    grid: List[float]
    n_max: int
    vanish_tol: float
    is_monotone: bool
    iterates_vanish: bool
    below_identity: bool
    vanishes_at_zero: bool
    in_M: bool
    b: Optional[float] = None
    ratio_limsup_estimate: Optional[float] = None
    margin: Optional[float] = None
    in_Mb: Optional[bool] = None
    inconclusive: bool = False
    verdict: Verdict
    diagnostics: MembershipDiagnostics = MembershipDiagnostics()

    @model_validator(mode="after")
    def check_in_M(self) -> "MembershipReport":
        if self.in_M != (self.is_monotone and self.iterates_vanish):
            raise ValueError("in_M must equal is_monotone and iterates_vanish")
        return self
