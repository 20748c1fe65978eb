"""Planar value types shared by every planner: positions, velocities and
endpoint constraints. No algorithms live here.

`Vec2` is an immutable 2-vector (meters or m/s depending on context) with
plain arithmetic; all planner math downstream is pure-functional over these
values, so they are freely shareable across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"Vec2 components must be finite, got ({self.x}, {self.y})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @staticmethod
    def from_array(a) -> "Vec2":
        return Vec2(float(a[0]), float(a[1]))


def scale(v: Vec2, s: float) -> Vec2:
    return v * s


def dot(a: Vec2, b: Vec2) -> float:
    return a.x * b.x + a.y * b.y


def norm(v: Vec2) -> float:
    return math.hypot(v.x, v.y)


@dataclass(frozen=True)
class TimeWindow:
    """Planning horizon [t0, T], strictly ordered."""

    t0: float
    T: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t0) and math.isfinite(self.T)):
            raise ValidationError("TimeWindow bounds must be finite")
        if not self.T > self.t0:
            raise ValidationError(f"TimeWindow requires T > t0, got t0={self.t0}, T={self.T}")

    @property
    def duration(self) -> float:
        return self.T - self.t0


@dataclass(frozen=True)
class BoundaryConditions:
    """Hard endpoint constraints: start at z0 at t0, arrive at zT at T.

    Arrival is a constraint, never a penalty: every planner in this package
    produces trajectories that satisfy it exactly.
    """

    window: TimeWindow
    z0: Vec2
    zT: Vec2

    @property
    def t0(self) -> float:
        return self.window.t0

    @property
    def T(self) -> float:
        return self.window.T

    @property
    def duration(self) -> float:
        return self.window.duration
