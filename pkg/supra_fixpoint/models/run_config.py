from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from supra_fixpoint.core.config import settings
from supra_fixpoint.models.space import (
    ConstructionDescriptor,
    ConstructionKind,
    ConstructionParams,
    SpaceVariant,
)


class Command(str, Enum):
    VERIFY_SPACE = "verify-space"
    SOLVE = "solve"
    CERTIFY = "certify"
    PSI_CHECK = "psi-check"
    DEMO_DISCRETE = "demo-discrete"
    BOUNDS = "bounds"


class SpaceSpec(BaseModel):
    """A construction as given on the command line."""
    model_config = ConfigDict(frozen=True)

    kind: ConstructionKind
    params: ConstructionParams = ConstructionParams()
    compose: bool = False

    def descriptor(self) -> ConstructionDescriptor:
        base = ConstructionDescriptor(kind=self.kind, params=self.params)
        if self.compose:
            return ConstructionDescriptor(kind=ConstructionKind.COMPOSE_QUADRATIC, base=base)
        return base


class RunConfig(BaseModel):
    """Fully resolved configuration of one CLI run; echoed into every report.

    Unset numeric options take their values from ``settings`` so the echo
    always shows what was actually used.
    """
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    command: Command
    space: Optional[SpaceSpec] = None
    space_class: Optional[SpaceVariant] = None
    b: Optional[float] = Field(None, ge=1)
    rho: Optional[float] = Field(None, ge=0)
    map: Optional[str] = None
    psi: Optional[str] = None
    x0: Optional[str] = None
    starts: Optional[List[str]] = None
    epsilon: List[float] = [1.0]
    max_m: int = Field(1000, ge=0)
    estimate: bool = False

    seed: int = Field(default_factory=lambda: settings.seed)
    samples: int = Field(default_factory=lambda: settings.samples, ge=1)
    tolerance: float = Field(default_factory=lambda: settings.axiom_tolerance, ge=0)
    step_tol: float = Field(default_factory=lambda: settings.step_tol, gt=0)
    max_iter: int = Field(default_factory=lambda: settings.max_iter, ge=1)
    ball_samples: int = Field(default_factory=lambda: settings.ball_samples, ge=1)
    N: int = Field(default_factory=lambda: settings.discrete_n, ge=2)
    lemma_samples: int = Field(default_factory=lambda: settings.lemma_samples, ge=1)
    t_grid: List[float] = Field(default_factory=lambda: list(settings.t_grid))
    n_max: int = Field(default_factory=lambda: settings.membership_n_max, ge=1)
    n_window: int = Field(default_factory=lambda: settings.ratio_window, ge=2)
    margin: float = Field(default_factory=lambda: settings.membership_margin, ge=0)

    ds: Optional[List[float]] = None
    u: Optional[List[float]] = None
    q: Optional[int] = Field(None, ge=2)

    out: Optional[str] = None
    trace: bool = False
    stamp: bool = False
    log_level: str = Field(default_factory=lambda: settings.log_level)

    @field_validator("epsilon")
    @classmethod
    def positive_epsilons(cls, v: List[float]) -> List[float]:
        if not v or any(e <= 0 for e in v):
            raise ValueError("epsilon values must be > 0")
        return v

    @field_validator("ds", "u")
    @classmethod
    def nonnegative_distances(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and any(d < 0 for d in v):
            raise ValueError("distances must be >= 0")
        return v

    @model_validator(mode="after")
    def check_required(self) -> "RunConfig":
        needs = {
            Command.VERIFY_SPACE: ("space",),
            Command.SOLVE: ("space", "map", "psi", "x0"),
            Command.CERTIFY: ("space", "map", "psi", "x0"),
            Command.PSI_CHECK: ("psi",),
        }.get(self.command, ())
        missing = ["kind" if name == "space" else name for name in needs if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.command.value} needs --{', --'.join(missing)}")
        if self.u is not None and len(self.u) != 4:
            raise ValueError("--u takes exactly four distances")
        return self
