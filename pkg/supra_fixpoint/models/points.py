"""Point representations shared by every distance function."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Annotated, Any, Optional, Sequence, Tuple, Union

from pydantic import PlainSerializer

from supra_fixpoint.core.exceptions import DomainError


def _finite_tuple(values: Sequence[float], kind: str) -> Tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) < 1:
        raise DomainError(f"{kind} needs at least one entry")
    if not all(math.isfinite(v) for v in out):
        raise DomainError(f"{kind} entries must be finite: {out}")
    return out


@dataclass(frozen=True)
class Scalar:
    """A real number."""
    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise DomainError(f"Scalar must be finite, got {self.value}")


@dataclass(frozen=True)
class Vector:
    """A finite real vector (desk-scale truncation of a sequence)."""
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _finite_tuple(self.values, "Vector"))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class GridFn:
    """A function on [0, 1] sampled at the midpoints of a uniform grid."""
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _finite_tuple(self.values, "GridFn"))

    def __len__(self) -> int:
        return len(self.values)


class DTag(str, Enum):
    ZERO = "zero"
    ONE = "one"
    RECIP = "recip"


@dataclass(frozen=True)
class DPoint:
    """An element of {0, 1, 1/2, 1/3, ...}.

    ``n`` is the stored denominator of ``Recip`` points; all case analysis on
    these points is done on ``n`` (integer parity), never on the float value.
    """
    tag: DTag
    n: Optional[int] = None

    def __post_init__(self) -> None:
        if self.tag is DTag.RECIP:
            if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 2:
                raise DomainError(f"Recip needs an integer denominator n >= 2, got {self.n!r}")
        elif self.n is not None:
            raise DomainError(f"{self.tag.value} takes no denominator")

    @classmethod
    def zero(cls) -> "DPoint":
        return cls(DTag.ZERO)

    @classmethod
    def one(cls) -> "DPoint":
        return cls(DTag.ONE)

    @classmethod
    def recip(cls, n: int) -> "DPoint":
        return cls(DTag.RECIP, n)

    @classmethod
    def from_index(cls, k: int) -> "DPoint":
        """0 -> 0, 1 -> 1, k >= 2 -> 1/k."""
        if k == 0:
            return cls.zero()
        if k == 1:
            return cls.one()
        return cls.recip(k)

    @property
    def index(self) -> int:
        if self.tag is DTag.ZERO:
            return 0
        if self.tag is DTag.ONE:
            return 1
        return self.n  # type: ignore[return-value]

    @property
    def value(self) -> float:
        if self.tag is DTag.ZERO:
            return 0.0
        if self.tag is DTag.ONE:
            return 1.0
        return 1.0 / self.n  # type: ignore[operator]

    @property
    def in_even_family(self) -> bool:
        """Membership in {0} ∪ {1/(2n) : n >= 1}."""
        if self.tag is DTag.ZERO:
            return True
        return self.tag is DTag.RECIP and self.n % 2 == 0  # type: ignore[operator]

    def __str__(self) -> str:
        if self.tag is DTag.ZERO:
            return "0"
        if self.tag is DTag.ONE:
            return "1"
        return f"1/{self.n}"


Point = Union[Scalar, Vector, GridFn, DPoint]
POINT_TYPES = (Scalar, Vector, GridFn, DPoint)


def point_to_json(point: Any) -> Any:
    """JSON form of a point: number, list, {"grid": [...]} or "1/n"."""
    if point is None:
        return None
    if isinstance(point, Scalar):
        return point.value
    if isinstance(point, Vector):
        return list(point.values)
    if isinstance(point, GridFn):
        return {"grid": list(point.values)}
    if isinstance(point, DPoint):
        return str(point)
    raise DomainError(f"Not a point: {point!r}")


def point_sort_key(point: Any) -> Tuple[int, Tuple[float, ...]]:
    """Canonical ordering used to sort recorded violations."""
    if point is None:
        return (-1, ())
    if isinstance(point, Scalar):
        return (0, (point.value,))
    if isinstance(point, Vector):
        return (1, point.values)
    if isinstance(point, GridFn):
        return (2, point.values)
    return (3, (point.value,))


# Point-valued pydantic fields: no validation, serialized through point_to_json
PointField = Annotated[Any, PlainSerializer(point_to_json, return_type=Any)]
