"""Parametric boundary curves (segments and circular arcs) used by the
transfinite blending geometry maps.  All curves map t in [0, 1] to the
plane and are vectorized over t."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from helmres.errors import GeometryError


class Curve:
    def point(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def tangent(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def subdivide(self, f0: float, f1: float) -> "Curve":
        """The sub-curve between parameter fractions f0 and f1."""
        raise NotImplementedError


@dataclass(frozen=True)
class Segment(Curve):
    p0: tuple[float, float]
    p1: tuple[float, float]

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return (
            self.p0[0] + t * (self.p1[0] - self.p0[0]),
            self.p0[1] + t * (self.p1[1] - self.p0[1]),
        )

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        one = np.ones_like(t)
        return (one * (self.p1[0] - self.p0[0]), one * (self.p1[1] - self.p0[1]))

    def subdivide(self, f0, f1):
        x0, y0 = self.point(np.asarray(f0))
        x1, y1 = self.point(np.asarray(f1))
        return Segment((float(x0), float(y0)), (float(x1), float(y1)))


@dataclass(frozen=True)
class Arc(Curve):
    """Circular arc about ``center`` from angle a0 to a1 (radians, no wrap)."""

    center: tuple[float, float]
    radius: float
    a0: float
    a1: float

    def angle(self, t):
        t = np.asarray(t, dtype=float)
        return self.a0 + t * (self.a1 - self.a0)

    def point(self, t):
        th = self.angle(t)
        return (
            self.center[0] + self.radius * np.cos(th),
            self.center[1] + self.radius * np.sin(th),
        )

    def tangent(self, t):
        th = self.angle(t)
        span = self.a1 - self.a0
        return (-self.radius * span * np.sin(th), self.radius * span * np.cos(th))

    def subdivide(self, f0, f1):
        span = self.a1 - self.a0
        return Arc(self.center, self.radius, self.a0 + f0 * span, self.a0 + f1 * span)


def ray_hit_circle(origin, direction, center, radius) -> float:
    """Smallest positive ray parameter hitting the circle, or raise."""
    ox = origin[0] - center[0]
    oy = origin[1] - center[1]
    dx, dy = direction
    a = dx * dx + dy * dy
    b = 2.0 * (ox * dx + oy * dy)
    c = ox * ox + oy * oy - radius * radius
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise GeometryError("ray misses circle")
    sq = np.sqrt(disc)
    for t in sorted(((-b - sq) / (2 * a), (-b + sq) / (2 * a))):
        if t > 1e-12:
            return float(t)
    raise GeometryError("circle behind ray origin")


def ray_hit_segment(origin, direction, p0, p1) -> float | None:
    """Positive ray parameter hitting the segment, or None."""
    ex = p1[0] - p0[0]
    ey = p1[1] - p0[1]
    dx, dy = direction
    det = dx * (-ey) - dy * (-ex)
    if abs(det) < 1e-14:
        return None
    rx = p0[0] - origin[0]
    ry = p0[1] - origin[1]
    t = (rx * (-ey) + ry * ex) / det
    s = (dx * ry - dy * rx) / det
    if t > 1e-12 and -1e-10 <= s <= 1.0 + 1e-10:
        return float(t)
    return None
