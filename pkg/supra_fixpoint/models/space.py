from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from supra_fixpoint.models.points import PointField


class SpaceParams(BaseModel):
    """The pair (b, rho) of the relaxed triangle inequality
    d(x, y) <= b (d(x, z) + d(z, y)) + rho d(x, z) d(z, y)."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    b: float = Field(1.0, ge=1, description="Relaxation coefficient")
    rho: float = Field(0.0, ge=0, description="Product coefficient")


class SpaceVariant(str, Enum):
    SEMIMETRIC = "semimetric"
    B_METRIC = "b-metric"
    SUPRAMETRIC = "suprametric"
    B_SUPRAMETRIC = "b-suprametric"


class SpaceClass(BaseModel):
    """One of the four axiom systems.

    b-metric(b) is b-suprametric(b, 0) and suprametric(rho) is
    b-suprametric(1, rho); ``to_params`` makes that conversion explicit.
    """
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    variant: SpaceVariant
    b: Optional[float] = Field(None, ge=1)
    rho: Optional[float] = Field(None, ge=0)

    @model_validator(mode="after")
    def check_coefficients(self) -> "SpaceClass":
        needs_b = self.variant in (SpaceVariant.B_METRIC, SpaceVariant.B_SUPRAMETRIC)
        needs_rho = self.variant in (SpaceVariant.SUPRAMETRIC, SpaceVariant.B_SUPRAMETRIC)
        if needs_b and self.b is None:
            raise ValueError(f"{self.variant.value} needs b")
        if needs_rho and self.rho is None:
            raise ValueError(f"{self.variant.value} needs rho")
        if not needs_b and self.b is not None:
            raise ValueError(f"{self.variant.value} takes no b")
        if not needs_rho and self.rho is not None:
            raise ValueError(f"{self.variant.value} takes no rho")
        return self

    @classmethod
    def semimetric(cls) -> "SpaceClass":
        return cls(variant=SpaceVariant.SEMIMETRIC)

    @classmethod
    def b_metric(cls, b: float) -> "SpaceClass":
        return cls(variant=SpaceVariant.B_METRIC, b=b)

    @classmethod
    def suprametric(cls, rho: float) -> "SpaceClass":
        return cls(variant=SpaceVariant.SUPRAMETRIC, rho=rho)

    @classmethod
    def b_suprametric(cls, b: float, rho: float) -> "SpaceClass":
        return cls(variant=SpaceVariant.B_SUPRAMETRIC, b=b, rho=rho)

    def to_params(self) -> Optional[SpaceParams]:
        """(b, rho) of the d3 axiom, or None for a plain semimetric."""
        if self.variant is SpaceVariant.SEMIMETRIC:
            return None
        b = 1.0 if self.b is None else self.b
        rho = 0.0 if self.rho is None else self.rho
        return SpaceParams(b=b, rho=rho)

    def canonical(self) -> "SpaceClass":
        params = self.to_params()
        if params is None:
            return self
        return SpaceClass.b_suprametric(params.b, params.rho)

    @property
    def label(self) -> str:
        if self.variant is SpaceVariant.SEMIMETRIC:
            return "semimetric"
        if self.variant is SpaceVariant.B_METRIC:
            return f"b-metric(b={self.b:g})"
        if self.variant is SpaceVariant.SUPRAMETRIC:
            return f"suprametric(rho={self.rho:g})"
        return f"b-suprametric(b={self.b:g}, rho={self.rho:g})"


class Violation(BaseModel):
    """A sampled pair (z is None) or triple at which an axiom fails."""
    axiom: str = Field(..., description="d1, d2 or d3")
    x: PointField
    y: PointField
    z: PointField = None
    defect: float


class AxiomReport(BaseModel):
    """Outcome of a sampled or exhaustive axiom check.

    ``violations`` is sorted canonically; ``worst_defect`` is the smallest
    d3 defect observed (None when no triple was checked).
    """
    model_config = ConfigDict(populate_by_name=True)

    label: str
    space_class: str = Field(..., alias="class")
    params: Optional[SpaceParams] = None
    samples_checked: int = Field(..., alias="samples", ge=0)
    seed: Optional[int] = None
    tolerance: float
    violations: List[Violation] = []
    worst_defect: Optional[float] = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def violations_of(self, axiom: str) -> List[Violation]:
        return [v for v in self.violations if v.axiom == axiom]


class ConstructionKind(str, Enum):
    ABSOLUTE = "absolute"
    EUCLIDEAN = "euclidean"
    QUADRATIC = "quadratic"
    EXP_SQUARE = "exp-square"
    EXP = "exp"
    LP = "lp"
    BIG_LP = "Lp"
    COMPOSE_QUADRATIC = "compose-quadratic"
    EXP_SQUARE_COMPOSED = "exp-square-composed"
    DISCRETE = "discrete"


class ConstructionParams(BaseModel):
    """Symbols of the example constructions; ``scale`` is the coefficient
    called b in the quadratic example."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    a: Optional[float] = Field(None, gt=0)
    scale: Optional[float] = Field(None, ge=1)
    beta: Optional[float] = Field(None, ge=1)
    gamma: Optional[float] = Field(None, gt=0)
    p: Optional[float] = Field(None, gt=0, lt=1)
    dim: Optional[int] = Field(None, ge=1)
    grid: Optional[int] = Field(None, ge=1)


class ConstructionDescriptor(BaseModel):
    """JSON form of a construction: {kind, params, declared} (+ base for compositions)."""
    model_config = ConfigDict(frozen=True)

    kind: ConstructionKind
    params: ConstructionParams = ConstructionParams()
    declared: Optional[SpaceParams] = None
    base: Optional["ConstructionDescriptor"] = None


ConstructionDescriptor.model_rebuild()
