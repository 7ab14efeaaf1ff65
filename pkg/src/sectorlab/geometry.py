"""Geometric predicates and measures for sectors, disks and spherical sectors.

Sectors span the half-open anticlockwise arc ``[inclination, inclination +
amplitude)`` measured from the positive x-axis, and membership uses the strict
inequality ``||z - apex|| < r``. The apex always belongs to its own sector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gamma

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# Relative tolerance used by the exact clipper to decide whether a point lies
# on a boundary element.
_CLIP_TOL = 1e-10


def normalize_angle(theta: ArrayLike) -> Any:
    """Reduce angles to ``[0, 2*pi)``.

    Works on scalars and arrays; ``np.mod`` can round a tiny negative input up
    to exactly ``2*pi``, which is folded back to ``0``.
    """
    reduced = np.mod(theta, TWO_PI)
    reduced = np.where(reduced >= TWO_PI, 0.0, reduced)
    if np.ndim(reduced) == 0:
        return float(reduced)
    return reduced


class Point2(NamedTuple):
    """A point of the plane."""

    x: float
    y: float


class Point3(NamedTuple):
    """A point of space (used by the spherical sector model)."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class NormKind:
    """An l^p norm on the plane, ``p`` in ``[1, inf]``."""

    p: float = 2.0

    def __post_init__(self) -> None:
        if not (self.p >= 1.0):
            raise ValueError(f"l^p norm requires p >= 1, got {self.p}")

    @classmethod
    def l2(cls) -> NormKind:
        return cls(2.0)

    @classmethod
    def lp(cls, p: float) -> NormKind:
        return cls(float(p))

    @classmethod
    def linf(cls) -> NormKind:
        return cls(math.inf)

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    @property
    def tag(self) -> str:
        if self.p == 2.0:
            return "L2"
        if math.isinf(self.p):
            return "Linf"
        return f"Lp({self.p:g})"

    def length(self, dx: ArrayLike, dy: ArrayLike) -> Any:
        """Vectorized norm of the displacement ``(dx, dy)``."""
        if self.p == 2.0:
            return np.hypot(dx, dy)
        ax = np.abs(dx)
        ay = np.abs(dy)
        if math.isinf(self.p):
            return np.maximum(ax, ay)
        if self.p == 1.0:
            return ax + ay
        return (ax**self.p + ay**self.p) ** (1.0 / self.p)

    def ball_area(self, r: float) -> float:
        """Lebesgue measure of the l^p ball of radius ``r``."""
        if math.isinf(self.p):
            return 4.0 * r * r
        return float(4.0 * gamma(1.0 + 1.0 / self.p) ** 2 / gamma(1.0 + 2.0 / self.p) * r * r)


L2 = NormKind.l2()


@dataclass(frozen=True)
class SectorSpec:
    """A planar sector with apex, start-ray inclination, amplitude and radius."""

    apex: Point2
    inclination: float
    amplitude: float
    radius: float

    def __post_init__(self) -> None:
        if not (0.0 < self.amplitude <= TWO_PI):
            raise ValueError(f"amplitude must lie in (0, 2pi], got {self.amplitude}")
        if not (self.radius > 0.0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "apex", Point2(*map(float, self.apex)))
        object.__setattr__(self, "inclination", normalize_angle(self.inclination))

    @property
    def area(self) -> float:
        return sector_area(self.amplitude, self.radius)

    def rotated(self, theta: float) -> SectorSpec:
        """The sector rotated by ``theta`` about the origin."""
        c, s = math.cos(theta), math.sin(theta)
        ax, ay = self.apex
        return SectorSpec(
            Point2(c * ax - s * ay, s * ax + c * ay),
            self.inclination + theta,
            self.amplitude,
            self.radius,
        )


@dataclass(frozen=True)
class SphericalSectorSpec:
    """A spherical sector: the cone of central angle ``amplitude`` cut by a ball.

    The cone axis has azimuth ``azimuth`` (angle of its xOy projection to the
    x-axis) and makes the angle ``elevation + amplitude / 2`` with that
    projection.
    """

    apex: Point3
    azimuth: float
    elevation: float
    amplitude: float
    radius: float
    axis: tuple[float, float, float] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.amplitude <= TWO_PI):
            raise ValueError(f"amplitude must lie in (0, 2pi], got {self.amplitude}")
        if not (self.radius > 0.0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "apex", Point3(*map(float, self.apex)))
        object.__setattr__(self, "azimuth", normalize_angle(self.azimuth))
        object.__setattr__(self, "elevation", normalize_angle(self.elevation))
        ax = spherical_axis(self.azimuth, self.elevation, self.amplitude)
        object.__setattr__(self, "axis", tuple(float(v) for v in ax))


# ---------------------------------------------------------------------------
# Regions (the set A of the degree statistics)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Plane:
    """The whole plane."""

    def contains(self, xy: NDArray[np.float64]) -> NDArray[np.bool_]:
        return np.ones(len(xy), dtype=bool)


@dataclass(frozen=True)
class Rectangle:
    """The half-open box ``[x0, x1) x [y0, y1)``."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self) -> None:
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, xy: NDArray[np.float64]) -> NDArray[np.bool_]:
        x, y = xy[:, 0], xy[:, 1]
        return (x >= self.x0) & (x < self.x1) & (y >= self.y0) & (y < self.y1)


@dataclass(frozen=True)
class Disk:
    """The open Euclidean disk of ``radius`` around ``(cx, cy)``."""

    cx: float
    cy: float
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0):
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def contains(self, xy: NDArray[np.float64]) -> NDArray[np.bool_]:
        return np.hypot(xy[:, 0] - self.cx, xy[:, 1] - self.cy) < self.radius


Region = Plane | Rectangle | Disk


# ---------------------------------------------------------------------------
# Vectorized predicates
# ---------------------------------------------------------------------------


def in_sector(
    dx: ArrayLike,
    dy: ArrayLike,
    inclination: ArrayLike,
    amplitude: float,
    radius: float,
    norm: NormKind = L2,
) -> Any:
    """Membership of displacements ``(dx, dy)`` in sectors anchored at the origin.

    This is the single containment predicate shared by every builder, so the
    grid and brute-force digraphs agree bit for bit.
    """
    dx = np.asarray(dx, dtype=np.float64)
    dy = np.asarray(dy, dtype=np.float64)
    inside = norm.length(dx, dy) < radius
    if amplitude >= TWO_PI:
        return inside
    delta = normalize_angle(np.arctan2(dy, dx) - inclination)
    apex = (dx == 0.0) & (dy == 0.0)
    return inside & ((delta < amplitude) | apex)


def spherical_axis(azimuth: ArrayLike, elevation: ArrayLike, amplitude: float) -> Any:
    """Unit cone axes for azimuth ``Y`` and elevation parameter ``Z``.

    The axis is inclined by ``Z + amplitude / 2`` above its projection on the
    xOy plane, whose direction is ``Y``.
    """
    azimuth = np.asarray(azimuth, dtype=np.float64)
    tilt = np.asarray(elevation, dtype=np.float64) + 0.5 * amplitude
    c = np.cos(tilt)
    return np.stack([c * np.cos(azimuth), c * np.sin(azimuth), np.sin(tilt)], axis=-1)


def in_spherical_sector(
    d: NDArray[np.float64],
    axis: NDArray[np.float64],
    amplitude: float,
    radius: float,
) -> Any:
    """Membership of displacements ``d`` (shape ``(m, 3)``) in spherical sectors."""
    # Explicit component sums keep the rounding independent of array shape.
    dist = np.sqrt(d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1] + d[..., 2] * d[..., 2])
    inside = dist < radius
    if amplitude >= TWO_PI:
        return inside
    dot = d[..., 0] * axis[..., 0] + d[..., 1] * axis[..., 1] + d[..., 2] * axis[..., 2]
    return inside & ((dot > dist * math.cos(0.5 * amplitude)) | (dist == 0.0))


def sector_bounding_box(
    x: NDArray[np.float64],
    y: NDArray[np.float64],
    inclination: NDArray[np.float64],
    amplitude: float,
    radius: float,
) -> tuple[NDArray[np.float64], ...]:
    """Axis-aligned bounding boxes ``(xmin, xmax, ymin, ymax)`` of Euclidean sectors."""
    xmin = x.copy()
    xmax = x.copy()
    ymin = y.copy()
    ymax = y.copy()
    extremes = [inclination, inclination + amplitude]
    for quarter in range(4):
        theta = quarter * HALF_PI
        hit = normalize_angle(theta - inclination) < amplitude
        extremes.append(np.where(hit, theta, inclination))
    for theta in extremes:
        ex = x + radius * np.cos(theta)
        ey = y + radius * np.sin(theta)
        np.minimum(xmin, ex, out=xmin)
        np.maximum(xmax, ex, out=xmax)
        np.minimum(ymin, ey, out=ymin)
        np.maximum(ymax, ey, out=ymax)
    return xmin, xmax, ymin, ymax


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------


def sector_contains(s: SectorSpec, z: Point2 | tuple[float, float], norm: NormKind = L2) -> bool:
    """True iff ``z`` lies in the sector ``s`` under ``norm``."""
    return bool(
        in_sector(z[0] - s.apex[0], z[1] - s.apex[1], s.inclination, s.amplitude, s.radius, norm)
    )


def ball_contains(
    center: Point2 | tuple[float, float],
    r: float,
    z: Point2 | tuple[float, float],
    norm: NormKind = L2,
) -> bool:
    """True iff ``||z - center|| < r``."""
    if not (r > 0.0):
        raise ValueError(f"radius must be positive, got {r}")
    return bool(norm.length(z[0] - center[0], z[1] - center[1]) < r)


def sector_area(alpha: float, r: float) -> float:
    """Euclidean area ``alpha * r**2 / 2`` of a sector."""
    return 0.5 * alpha * r * r


def disk_intersection_area(d: float, r1: float, r2: float) -> float:
    """Area of ``B(0, r1) ∩ B((d, 0), r2)`` (the circular lens)."""
    if d < 0.0 or r1 <= 0.0 or r2 <= 0.0:
        raise ValueError(f"invalid lens arguments d={d}, r1={r1}, r2={r2}")
    big, small = max(r1, r2), min(r1, r2)
    if d >= r1 + r2:
        return 0.0
    if d + small <= big:
        return math.pi * small * small
    d1 = (big * big - small * small + d * d) / (2.0 * d)
    d2 = d - d1
    a1 = big * big * math.acos(min(1.0, max(-1.0, d1 / big))) - d1 * math.sqrt(
        max(big * big - d1 * d1, 0.0)
    )
    a2 = small * small * math.acos(min(1.0, max(-1.0, d2 / small))) - d2 * math.sqrt(
        max(small * small - d2 * d2, 0.0)
    )
    return a1 + a2


def spherical_sector_contains(ss: SphericalSectorSpec, z: Point3 | tuple[float, float, float]) -> bool:
    """True iff ``z`` lies in the spherical sector ``ss``."""
    d = np.asarray(z, dtype=np.float64) - np.asarray(ss.apex, dtype=np.float64)
    return bool(in_spherical_sector(d, np.asarray(ss.axis), ss.amplitude, ss.radius))


def spherical_sector_solid_fraction(alpha: float) -> float:
    """Fraction ``(1 - cos(alpha / 2)) / 2`` of the ball covered by a spherical sector."""
    if not (0.0 < alpha <= TWO_PI):
        raise ValueError(f"amplitude must lie in (0, 2pi], got {alpha}")
    return 0.5 * (1.0 - math.cos(0.5 * alpha))


# ---------------------------------------------------------------------------
# Sector intersection area
# ---------------------------------------------------------------------------


class AreaEstimate(NamedTuple):
    """An area with its standard error (zero for exact evaluation)."""

    value: float
    std_error: float = 0.0


@dataclass(frozen=True)
class _Segment:
    p: NDArray[np.float64]
    q: NDArray[np.float64]

    def point(self, tau: float) -> NDArray[np.float64]:
        return self.p + tau * (self.q - self.p)

    def tangent(self, tau: float) -> NDArray[np.float64]:
        return self.q - self.p

    def distance(self, z: NDArray[np.float64]) -> float:
        d = self.q - self.p
        length2 = float(d @ d)
        tau = 0.0 if length2 == 0.0 else min(1.0, max(0.0, float((z - self.p) @ d) / length2))
        return float(np.linalg.norm(z - self.point(tau)))

    def green(self, a: float, b: float) -> float:
        pa, pb = self.point(a), self.point(b)
        return 0.5 * float(pa[0] * pb[1] - pa[1] * pb[0])


@dataclass(frozen=True)
class _Arc:
    c: NDArray[np.float64]
    r: float
    theta1: float
    theta2: float

    def point(self, theta: float) -> NDArray[np.float64]:
        return self.c + self.r * np.array([math.cos(theta), math.sin(theta)])

    def tangent(self, theta: float) -> NDArray[np.float64]:
        return np.array([-math.sin(theta), math.cos(theta)])

    def param_of(self, z: NDArray[np.float64]) -> float:
        theta = math.atan2(z[1] - self.c[1], z[0] - self.c[0])
        return self.theta1 + normalize_angle(theta - self.theta1)

    def distance(self, z: NDArray[np.float64]) -> float:
        theta = self.param_of(z)
        if theta <= self.theta2:
            return abs(float(np.linalg.norm(z - self.c)) - self.r)
        return min(
            float(np.linalg.norm(z - self.point(self.theta1))),
            float(np.linalg.norm(z - self.point(self.theta2))),
        )

    def green(self, a: float, b: float) -> float:
        cx, cy = self.c
        r = self.r
        return 0.5 * (
            r * r * (b - a)
            + r * (cx * (math.sin(b) - math.sin(a)) - cy * (math.cos(b) - math.cos(a)))
        )


_Element = _Segment | _Arc


def _convex_pieces(s: SectorSpec) -> list[SectorSpec]:
    if s.amplitude <= math.pi:
        return [s]
    half = 0.5 * s.amplitude
    return [
        SectorSpec(s.apex, s.inclination, half, s.radius),
        SectorSpec(s.apex, s.inclination + half, half, s.radius),
    ]


def _boundary(s: SectorSpec) -> list[_Element]:
    apex = np.asarray(s.apex, dtype=np.float64)
    t1 = s.inclination
    t2 = s.inclination + s.amplitude
    start = apex + s.radius * np.array([math.cos(t1), math.sin(t1)])
    end = apex + s.radius * np.array([math.cos(t2), math.sin(t2)])
    return [_Segment(apex, start), _Arc(apex, s.radius, t1, t2), _Segment(end, apex)]


def _cross(a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _line_circle(
    p: NDArray[np.float64], d: NDArray[np.float64], c: NDArray[np.float64], r: float
) -> list[float]:
    """Parameters ``tau`` with ``|p + tau d - c| = r``."""
    f = p - c
    a = float(d @ d)
    b = 2.0 * float(f @ d)
    cc = float(f @ f) - r * r
    disc = b * b - 4.0 * a * cc
    if a == 0.0 or disc < 0.0:
        return []
    root = math.sqrt(disc)
    return [(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)]


def _split_params(elem: _Element, others: list[_Element], scale: float) -> list[float]:
    """Parameters where ``elem`` may cross the boundary described by ``others``."""
    tol = _CLIP_TOL * scale
    params: list[float] = []
    endpoints: list[NDArray[np.float64]] = []
    for other in others:
        if isinstance(other, _Segment):
            endpoints.extend([other.p, other.q])
        else:
            endpoints.extend([other.point(other.theta1), other.point(other.theta2)])

    if isinstance(elem, _Segment):
        d = elem.q - elem.p
        lo, hi = 0.0, 1.0
        for other in others:
            if isinstance(other, _Segment):
                e = other.q - other.p
                denom = _cross(d, e)
                if abs(denom) > _CLIP_TOL * float(np.linalg.norm(d)) * float(np.linalg.norm(e)):
                    params.append(_cross(other.p - elem.p, e) / denom)
            else:
                params.extend(_line_circle(elem.p, d, other.c, other.r))
        length2 = float(d @ d)
        for z in endpoints:
            if elem.distance(z) < tol and length2 > 0.0:
                params.append(float((z - elem.p) @ d) / length2)
    else:
        lo, hi = elem.theta1, elem.theta2
        points: list[NDArray[np.float64]] = []
        for other in others:
            if isinstance(other, _Segment):
                e = other.q - other.p
                for tau in _line_circle(other.p, e, elem.c, elem.r):
                    points.append(other.p + tau * e)
            else:
                delta = other.c - elem.c
                dist = float(np.linalg.norm(delta))
                if dist < tol and abs(other.r - elem.r) < tol:
                    continue
                if dist == 0.0 or dist > elem.r + other.r or dist < abs(elem.r - other.r):
                    continue
                a = (elem.r**2 - other.r**2 + dist**2) / (2.0 * dist)
                h = math.sqrt(max(elem.r**2 - a * a, 0.0))
                mid = elem.c + a * delta / dist
                perp = np.array([-delta[1], delta[0]]) / dist
                points.extend([mid + h * perp, mid - h * perp])
        for z in endpoints:
            if elem.distance(z) < tol:
                points.append(z)
        params.extend(elem.param_of(z) for z in points)

    inner = sorted({p for p in params if lo < p < hi})
    return [lo, *inner, hi]


def _classify(z: NDArray[np.float64], sector: SectorSpec, boundary: list[_Element], scale: float) -> tuple[str, _Element | None, float]:
    tol = _CLIP_TOL * scale * 100.0
    best: tuple[float, _Element | None] = (math.inf, None)
    for elem in boundary:
        dist = elem.distance(z)
        if dist < best[0]:
            best = (dist, elem)
    if best[0] < tol:
        elem = best[1]
        assert elem is not None
        param = elem.param_of(z) if isinstance(elem, _Arc) else 0.0
        return "boundary", elem, param
    inside = in_sector(
        z[0] - sector.apex[0], z[1] - sector.apex[1], sector.inclination, sector.amplitude, sector.radius
    )
    return ("inside" if inside else "outside"), None, 0.0


def _boundary_share(
    first: SectorSpec, second: SectorSpec, scale: float, keep_shared: bool
) -> float:
    """Green's-theorem contribution of ``first``'s boundary lying inside ``second``."""
    own = _boundary(first)
    other = _boundary(second)
    total = 0.0
    for elem in own:
        cuts = _split_params(elem, other, scale)
        for a, b in zip(cuts[:-1], cuts[1:], strict=False):
            if b - a <= 0.0:
                continue
            mid = 0.5 * (a + b)
            where, hit, hit_param = _classify(elem.point(mid), second, other, scale)
            if where == "outside":
                continue
            if where == "boundary":
                if not keep_shared or hit is None:
                    continue
                if float(elem.tangent(mid) @ hit.tangent(hit_param)) <= 0.0:
                    continue
            total += elem.green(a, b)
    return total


def _convex_intersection_area(s1: SectorSpec, s2: SectorSpec) -> float:
    gap = math.hypot(s1.apex[0] - s2.apex[0], s1.apex[1] - s2.apex[1])
    if gap >= s1.radius + s2.radius:
        return 0.0
    scale = max(s1.radius, s2.radius, gap)
    area = _boundary_share(s1, s2, scale, keep_shared=True) + _boundary_share(
        s2, s1, scale, keep_shared=False
    )
    return min(max(area, 0.0), s1.area, s2.area)


def sector_intersection_area(
    s1: SectorSpec,
    s2: SectorSpec,
    method: str = "exact",
    samples: int = 0,
    rng: np.random.Generator | None = None,
) -> AreaEstimate:
    """Area of ``s1 ∩ s2``.

    ``method="exact"`` clips the boundaries (sectors wider than pi are split
    into two convex halves first); ``method="monte-carlo"`` draws ``samples``
    uniform points in the bounding square of ``s1`` and reports a standard
    error.
    """
    if method == "exact":
        area = 0.0
        for a in _convex_pieces(s1):
            for b in _convex_pieces(s2):
                area += _convex_intersection_area(a, b)
        return AreaEstimate(min(area, s1.area, s2.area))

    if method == "monte-carlo":
        if samples <= 0:
            raise ValueError("monte-carlo sector intersection needs samples >= 1")
        if rng is None:
            rng = np.random.default_rng()
        r = s1.radius
        pts = rng.uniform(-r, r, size=(samples, 2)) + np.asarray(s1.apex)
        hit = in_sector(
            pts[:, 0] - s1.apex[0], pts[:, 1] - s1.apex[1], s1.inclination, s1.amplitude, s1.radius
        ) & in_sector(
            pts[:, 0] - s2.apex[0], pts[:, 1] - s2.apex[1], s2.inclination, s2.amplitude, s2.radius
        )
        box = 4.0 * r * r
        frac = float(hit.mean())
        return AreaEstimate(box * frac, box * math.sqrt(frac * (1.0 - frac) / samples))

    raise ValueError(f"Unknown intersection method: {method!r} (expected 'exact' or 'monte-carlo')")
