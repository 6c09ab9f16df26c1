"""Seeded point generators.

Every sampler draws a whole batch from a ``numpy.random.Generator`` so a
given seed always yields the same points in the same order.

Distributions:
    ScalarSampler    uniform on [low, high]
    VectorSampler    uniform on the box [low, high]^dim
    GridSampler      grid values uniform on [low, high]
    DiscreteSampler  uniform index k in {0, 1, ..., N} mapped to 0, 1, 1/k
    FiniteSampler    uniform choice from a fixed point list
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from supra_fixpoint.core.exceptions import DomainError
from supra_fixpoint.models.points import DPoint, GridFn, Point, Scalar, Vector


class PointSampler(ABC):
    """Batch point generator."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, n: int) -> List[Point]:
        """Draw ``n`` points."""

    def describe(self) -> str:
        return self.__class__.__name__


def _check_box(low: float, high: float) -> None:
    if not (np.isfinite(low) and np.isfinite(high)) or low >= high:
        raise DomainError(f"Invalid sampling box [{low}, {high}]")


@dataclass(frozen=True)
class ScalarSampler(PointSampler):
    low: float = -10.0
    high: float = 10.0

    def sample(self, rng: np.random.Generator, n: int) -> List[Point]:
        _check_box(self.low, self.high)
        return [Scalar(float(v)) for v in rng.uniform(self.low, self.high, size=n)]

    def describe(self) -> str:
        return f"uniform scalar on [{self.low:g}, {self.high:g}]"


@dataclass(frozen=True)
class VectorSampler(PointSampler):
    dim: int = 3
    low: float = -10.0
    high: float = 10.0

    def sample(self, rng: np.random.Generator, n: int) -> List[Point]:
        _check_box(self.low, self.high)
        if self.dim < 1:
            raise DomainError(f"Vector dimension must be >= 1, got {self.dim}")
        draws = rng.uniform(self.low, self.high, size=(n, self.dim))
        return [Vector(tuple(row.tolist())) for row in draws]

    def describe(self) -> str:
        return f"uniform vector in [{self.low:g}, {self.high:g}]^{self.dim}"


@dataclass(frozen=True)
class GridSampler(PointSampler):
    grid: int = 8
    low: float = -10.0
    high: float = 10.0

    def sample(self, rng: np.random.Generator, n: int) -> List[Point]:
        _check_box(self.low, self.high)
        if self.grid < 1:
            raise DomainError(f"Grid size must be >= 1, got {self.grid}")
        draws = rng.uniform(self.low, self.high, size=(n, self.grid))
        return [GridFn(tuple(row.tolist())) for row in draws]

    def describe(self) -> str:
        return f"uniform grid function, {self.grid} cells, values in [{self.low:g}, {self.high:g}]"


@dataclass(frozen=True)
class DiscreteSampler(PointSampler):
    max_index: int = 200

    def sample(self, rng: np.random.Generator, n: int) -> List[Point]:
        if self.max_index < 2:
            raise DomainError(f"Discrete sampler needs N >= 2, got {self.max_index}")
        return [DPoint.from_index(int(k)) for k in rng.integers(0, self.max_index + 1, size=n)]

    def describe(self) -> str:
        return f"uniform index on {{0, 1, 1/2, ..., 1/{self.max_index}}}"


@dataclass(frozen=True)
class FiniteSampler(PointSampler):
    """Uniform draws from a fixed list of points."""
    points: Sequence[Point]

    def sample(self, rng: np.random.Generator, n: int) -> List[Point]:
        if not self.points:
            raise DomainError("FiniteSampler needs at least one point")
        return [self.points[int(i)] for i in rng.integers(0, len(self.points), size=n)]

    def describe(self) -> str:
        return f"uniform choice among {len(self.points)} fixed points"
