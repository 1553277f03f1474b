"""Hyperbolic geometry of the Poincare disc.

Mobius involutions, hyperbolic distance, hyperbolic midpoints, boundary arcs
and the geodesic Carleson boxes bounded by the geodesic over an arc.  Points
near the boundary carry an explicit gap field eps = 1 - |z| so that 1 - |z|^2
can always be formed without cancellation as eps * (2 - eps).

Arc lengths are normalized to fractions of the full circle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DiscPoint",
    "MobiusMap",
    "Arc",
    "GeodesicBox",
    "phi",
    "hyp_dist",
    "midpoint_from_origin",
    "arc_of",
    "box_of",
    "box_contains",
    "translate",
    "log_distance_proxy",
    "one_minus_abs_sq",
]

TWO_PI = 2.0 * math.pi


def one_minus_abs_sq(z):
    """1 - |z|^2, elementwise; fine for |z| not extremely close to 1."""
    z = np.asarray(z)
    return 1.0 - (z.real * z.real + z.imag * z.imag)


@dataclass(frozen=True)
class DiscPoint:
    """A point of the open unit disc stored as (angle, gap = 1 - |z|)."""

    theta: float
    gap: float

    def __post_init__(self):
        if not 0.0 < self.gap <= 1.0:
            raise ValueError("gap must lie in (0, 1], got %r" % (self.gap,))

    @staticmethod
    def from_complex(z) -> "DiscPoint":
        z = complex(z)
        r = abs(z)
        if r >= 1.0:
            raise ValueError("point not in the open disc: %r" % (z,))
        return DiscPoint(cmath.phase(z) % TWO_PI if z != 0 else 0.0, 1.0 - r)

    @staticmethod
    def from_polar_gap(theta, gap) -> "DiscPoint":
        return DiscPoint(float(theta) % TWO_PI, float(gap))

    @property
    def radius(self) -> float:
        return 1.0 - self.gap

    @property
    def value(self) -> complex:
        return self.radius * cmath.exp(1j * self.theta)

    def one_minus_sq(self) -> float:
        """1 - |z|^2 = gap * (2 - gap), cancellation-free."""
        return self.gap * (2.0 - self.gap)


def _as_complex(p):
    return p.value if isinstance(p, DiscPoint) else complex(p)


@dataclass(frozen=True)
class MobiusMap:
    """Disc automorphism z -> rot * (a - z) / (1 - conj(a) z).

    rot = 1 gives the involution phi_a; rot = -1 gives the signed variant
    sigma_a(z) = (z - a)/(1 - conj(a) z).
    """

    a: complex
    rot: complex = 1.0 + 0.0j

    @staticmethod
    def involution(a) -> "MobiusMap":
        return MobiusMap(_as_complex(a), 1.0 + 0.0j)

    @staticmethod
    def signed(a) -> "MobiusMap":
        return MobiusMap(_as_complex(a), -1.0 + 0.0j)

    @staticmethod
    def identity() -> "MobiusMap":
        return MobiusMap(0.0 + 0.0j, -1.0 + 0.0j)

    def __call__(self, z):
        a = complex(self.a)
        z = z if isinstance(z, np.ndarray) else complex(_as_complex(z))
        return self.rot * (a - z) / (1.0 - a.conjugate() * z)


def phi(a, z):
    """The involution phi_a(z) = (a - z) / (1 - conj(a) z)."""
    a = _as_complex(a)
    return (a - z) / (1.0 - a.conjugate() * z)


def hyp_dist(a, z) -> float:
    """Hyperbolic distance: artanh |phi_a(z)|."""
    w = abs(phi(a, _as_complex(z)))
    if w >= 1.0:
        raise ValueError("points must lie in the open disc")
    return math.atanh(w)


def midpoint_from_origin(w) -> DiscPoint:
    """Hyperbolic midpoint of [0, w]: same argument, |w*| = |w|/(1+sqrt(1-|w|^2))."""
    p = w if isinstance(w, DiscPoint) else DiscPoint.from_complex(w)
    if p.radius == 0.0:
        raise ValueError("midpoint undefined for w = 0")
    s = p.one_minus_sq()  # 1 - |w|^2
    root = math.sqrt(s)
    rho = p.radius / (1.0 + root)
    # gap of w*: 1 - rho = (1 + root - |w|) / (1 + root) = (gap + root)/(1 + root)
    gap_star = (p.gap + root) / (1.0 + root)
    return DiscPoint.from_polar_gap(p.theta, gap_star)


@dataclass(frozen=True)
class Arc:
    """Boundary arc: center angle and normalized length (fraction of circle)."""

    theta_c: float
    length: float

    def __post_init__(self):
        if not 0.0 < self.length <= 1.0:
            raise ValueError("normalized arc length must lie in (0, 1]")

    @property
    def half_angle(self) -> float:
        return math.pi * self.length


def arc_of(w) -> Arc:
    """Arc I_w whose geodesic box has w as its point closest to the origin."""
    p = w if isinstance(w, DiscPoint) else DiscPoint.from_complex(w)
    r = p.radius
    if r == 0.0:
        raise ValueError("arc undefined for w = 0")
    # half-angle theta with cos(theta) = 2r/(1+r^2); near the boundary use the
    # gap to avoid loss of accuracy: 1 - cos(theta) = gap^2 / (1 + r^2)
    c = 2.0 * r / (1.0 + r * r)
    if p.gap < 1e-6:
        theta = 2.0 * math.asin(p.gap / math.sqrt(2.0 * (1.0 + r * r)))
    else:
        theta = math.acos(min(1.0, c))
    return Arc(p.theta % TWO_PI, theta / math.pi)


@dataclass(frozen=True)
class GeodesicBox:
    """Carleson box S(I): closed hyperbolic half-plane bounded by the geodesic
    over the arc I.

    For length < 1/2 the bounding geodesic is the circle of center
    e^{i theta_c}/cos(pi l) and radius tan(pi l), orthogonal to the unit
    circle.  For length >= 1/2 the box is stored as the complement of the
    opposite box, where the circle test degenerates.
    """

    arc: Arc

    @property
    def is_complement(self) -> bool:
        return self.arc.length >= 0.5

    def _circle(self):
        # center (on the ray through theta_c) and radius of the bounding geodesic
        half = self.arc.half_angle
        c = cmath.exp(1j * self.arc.theta_c) / math.cos(half)
        return c, math.tan(half)

    def opposite(self) -> "GeodesicBox":
        return GeodesicBox(Arc((self.arc.theta_c + math.pi) % TWO_PI,
                               1.0 - self.arc.length))

    def angular_halfwidth(self, r):
        """Half-width in angle of the box section at radius r (nan if empty).

        Derived from |z - c| <= rho with c^2 - rho^2 = 1:
        cos(dtheta) >= (1 + r^2) cos(pi l) / (2 r).
        """
        r = np.asarray(r, dtype=float)
        l = self.arc.length
        if l == 1.0:
            return np.full_like(r, math.pi)
        if l == 0.5:
            return np.full_like(r, math.pi / 2.0)
        if l > 0.5:
            opp = GeodesicBox(Arc(self.arc.theta_c, 1.0 - l)).angular_halfwidth(r)
            out = math.pi - opp
            return np.where(np.isnan(opp), math.pi, out)
        with np.errstate(invalid="ignore", divide="ignore"):
            x = (1.0 + r * r) * math.cos(self.arc.half_angle) / (2.0 * r)
            return np.where(x > 1.0, np.nan, np.arccos(np.minimum(x, 1.0)))

    @property
    def closest_radius(self) -> float:
        """Radius of the point of the box closest to the origin."""
        if self.arc.length >= 0.5:
            return 0.0
        half = self.arc.half_angle
        return (1.0 - math.sin(half)) / math.cos(half)


def box_of(arc_or_point) -> GeodesicBox:
    arc = arc_or_point if isinstance(arc_or_point, Arc) else arc_of(arc_or_point)
    return GeodesicBox(arc)


def box_contains(box: GeodesicBox, z, tol=1e-12) -> bool:
    """Closed membership test for the geodesic Carleson box."""
    z = _as_complex(z)
    arc = box.arc
    if arc.length == 1.0:
        return True
    if arc.length > 0.5:
        # complement of the open opposite box
        return not box_contains(box.opposite(), z, tol=-tol)
    w = z * cmath.exp(-1j * arc.theta_c)  # rotate arc center to angle 0
    if arc.length == 0.5:
        return w.real >= -tol
    c = 1.0 / math.cos(arc.half_angle)
    rho = math.tan(arc.half_angle)
    return abs(w - c) <= rho * (1.0 + tol) + tol


def translate(f, a):
    """Hyperbolic translation of a function handle: f_a(z) = f(phi_a(z)) - f(a)."""
    a = _as_complex(a)
    fa = f(a)

    def handle(z):
        return f(phi(a, z)) - fa

    return handle


def log_distance_proxy(z) -> float:
    """log(e / (1 - |z|^2)); comparable to 1 + hyperbolic distance to 0."""
    if isinstance(z, DiscPoint):
        s = z.one_minus_sq()
    else:
        s = float(one_minus_abs_sq(complex(z)))
        if s <= 0.0:
            raise ValueError("point not in the open disc")
    return 1.0 - math.log(s)
