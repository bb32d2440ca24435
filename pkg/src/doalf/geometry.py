"""Planar geometry: distances, AP bearings and wrap-safe angle arithmetic.

All angles are radians. Canonical angles live in ``[0, 2*pi)``; signed
differences live in ``(-pi, pi]``. The array helpers broadcast like numpy
ufuncs so the same code serves single points and whole grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .exceptions import DegenerateGeometry, InvalidParameter

TWO_PI = 2.0 * math.pi

# Below this separation a bearing is undefined.
COINCIDENCE_TOL = 1e-12


@dataclass(frozen=True)
class Point:
    """A 2D location in meters."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidParameter(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


def as_xy(points) -> np.ndarray:
    """Coerce a Point, an (x, y) pair or a sequence of those to an ``(..., 2)`` array."""
    if isinstance(points, Point):
        return points.as_array()
    if isinstance(points, np.ndarray):
        arr = points.astype(float, copy=False)
    else:
        points = list(points) if not isinstance(points, tuple) else points
        arr = np.array([tuple(p) if isinstance(p, Point) else p for p in points], dtype=float)
    if arr.shape[-1] != 2:
        raise InvalidParameter(f"expected trailing dimension 2, got shape {arr.shape}")
    return arr


def to_points(arr: Iterable) -> list[Point]:
    return [Point(float(x), float(y)) for x, y in as_xy(arr).reshape(-1, 2)]


def canonical_angle(a):
    """Map any angle to ``[0, 2*pi)``; idempotent on canonical input."""
    out = np.mod(a, TWO_PI)
    # np.mod(-tiny, 2pi) rounds to exactly 2pi
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def angular_diff(a, b):
    """Minimal signed difference ``a - b`` in ``(-pi, pi]``.

    An exact half-turn resolves to ``+pi``.
    """
    d = np.mod(np.subtract(a, b), TWO_PI)
    d = np.where(d > math.pi, d - TWO_PI, d)
    return float(d) if np.ndim(d) == 0 else d


def distance(p, q) -> float:
    p, q = as_xy(p), as_xy(q)
    return float(math.hypot(q[0] - p[0], q[1] - p[1]))


def bearing(observer, target) -> float:
    """Direction from ``observer`` to ``target``, counterclockwise from +x.

    Satisfies ``cos(phi) = (xt - xo) / d`` and ``sin(phi) = (yt - yo) / d``.
    """
    o, t = as_xy(observer), as_xy(target)
    dx, dy = t[0] - o[0], t[1] - o[1]
    if math.hypot(dx, dy) < COINCIDENCE_TOL:
        raise DegenerateGeometry(f"bearing undefined: observer {tuple(o)} coincides with target")
    return canonical_angle(math.atan2(dy, dx))


def distances(observers, targets) -> np.ndarray:
    """Pairwise distances, shape ``observers.shape[:-1] + (n_targets,)``."""
    o = as_xy(observers)[..., None, :]
    t = as_xy(targets)
    diff = t - o
    return np.hypot(diff[..., 0], diff[..., 1])


def bearings(observers, targets) -> np.ndarray:
    """Pairwise bearings from each observer to each target, same shape as :func:`distances`."""
    o = as_xy(observers)[..., None, :]
    t = as_xy(targets)
    diff = t - o
    if np.any(np.hypot(diff[..., 0], diff[..., 1]) < COINCIDENCE_TOL):
        raise DegenerateGeometry("bearing undefined: an observer coincides with a target")
    return canonical_angle(np.arctan2(diff[..., 1], diff[..., 0]))
