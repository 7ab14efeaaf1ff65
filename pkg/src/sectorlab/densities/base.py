"""Base class and protocol for planar density models."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from typing import Any, NamedTuple, Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray

from sectorlab.geometry import TWO_PI, Disk, Plane, Rectangle, Region
from sectorlab.quadrature import QuadResult, integrate_1d, integrate_2d

logger = logging.getLogger(__name__)

# Level sets are exact-equality sets; cell values are matched within this
# relative tolerance.
LEVEL_SET_RTOL = 1e-9


class LevelSetMass(NamedTuple):
    """F-masses of ``L_s ∩ A`` and ``L_s^+ ∩ A`` plus the Lebesgue measure of ``L_s ∩ A``."""

    mass_on_L: float
    mass_on_Lplus: float
    area_on_L: float


@runtime_checkable
class DensityProtocol(Protocol):
    """Protocol every density model satisfies."""

    name: str
    dimension: int

    @property
    def f_max(self) -> float: ...

    def evaluate(self, xy: NDArray[np.float64]) -> NDArray[np.float64]: ...

    def sample_positions(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]: ...


def ray_box_interval(
    px: float, py: float, theta: float, box: tuple[float, float, float, float]
) -> tuple[float, float]:
    """Parameter interval ``[t0, t1]`` (possibly empty) of the ray inside ``box``.

    The ray is ``(px, py) + t (cos theta, sin theta)``, ``t >= 0``; ``box`` is
    ``(x0, x1, y0, y1)``.
    """
    t0, t1 = 0.0, math.inf
    for p, d, lo, hi in (
        (px, math.cos(theta), box[0], box[1]),
        (py, math.sin(theta), box[2], box[3]),
    ):
        if abs(d) < 1e-300:
            if p < lo or p > hi:
                return 0.0, 0.0
            continue
        a, b = (lo - p) / d, (hi - p) / d
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
    if t1 <= t0:
        return 0.0, 0.0
    return t0, t1


def sector_box_area(
    apex: tuple[float, float],
    inclination: float,
    alpha: float,
    r: float,
    box: tuple[float, float, float, float],
) -> float:
    """Area of a Euclidean sector intersected with an axis-aligned box.

    Integrates ``(b^2 - a^2) / 2`` over the sector's angles, where ``[a, b]`` is
    the part of each ray inside both the box and the disk; breakpoints are put
    at the corner directions.
    """
    px, py = apex
    x0, x1, y0, y1 = box
    if px + r <= x0 or px - r >= x1 or py + r <= y0 or py - r >= y1:
        return 0.0

    def _radial(theta: float) -> float:
        a, b = ray_box_interval(px, py, theta, box)
        a, b = min(a, r), min(b, r)
        return 0.5 * (b * b - a * a)

    corners = [math.atan2(cy - py, cx - px) for cx in (x0, x1) for cy in (y0, y1)]
    breaks: list[float] = []
    for c in corners:
        for shift in (-TWO_PI, 0.0, TWO_PI):
            breaks.append(c + shift)
    res = integrate_1d(
        _radial, inclination, inclination + alpha, points=breaks, epsrel=1e-10, epsabs=1e-15
    )
    return max(res.value, 0.0)


def rectangle_overlap(
    box: tuple[float, float, float, float], rect: Rectangle
) -> float:
    """Area of ``box ∩ rect``."""
    w = min(box[1], rect.x1) - max(box[0], rect.x0)
    h = min(box[3], rect.y1) - max(box[2], rect.y0)
    return max(w, 0.0) * max(h, 0.0)


def region_box_area(box: tuple[float, float, float, float], region: Region) -> float:
    """Lebesgue measure of ``box ∩ region`` for the supported region shapes."""
    if isinstance(region, Plane):
        return (box[1] - box[0]) * (box[3] - box[2])
    if isinstance(region, Rectangle):
        return rectangle_overlap(box, region)
    if isinstance(region, Disk):
        return sector_box_area((region.cx, region.cy), 0.0, TWO_PI, region.radius, box)
    raise TypeError(f"Unsupported region shape: {type(region).__name__}")


class BaseDensity:
    """Shared behaviour of the planar density models.

    Subclasses implement ``evaluate``, ``sample_positions``, ``region_mass``,
    ``integrate_over``, ``level_set`` and ``sector_mass``; the base class offers a
    generic quadrature fallback and the common dunder methods.
    """

    name = "density"
    dimension = 2

    def __init__(self) -> None:
        logger.debug(f"Constructed {self!r}")

    @property
    def f_max(self) -> float:
        raise NotImplementedError

    def support_box(self) -> tuple[float, float, float, float]:
        """A box outside of which the density is zero (or negligible)."""
        raise NotImplementedError

    def evaluate(self, xy: NDArray[np.float64]) -> NDArray[np.float64]:
        raise NotImplementedError

    def __call__(self, x: float, y: float) -> float:
        return float(self.evaluate(np.array([[x, y]], dtype=np.float64))[0])

    def sample_positions(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
        raise NotImplementedError

    def region_mass(self, region: Region) -> float:
        raise NotImplementedError

    def integrate_over(self, region: Region, phi: Callable[[float], float]) -> float:
        """``∫_A phi(f(x)) f(x) dx``."""
        raise NotImplementedError

    def level_set(self, s: float, alpha: float, region: Region | None = None) -> LevelSetMass:
        raise NotImplementedError

    def sector_mass(
        self, apex: tuple[float, float], inclination: float, alpha: float, r: float
    ) -> float:
        """F-mass of the Euclidean sector ``S(apex, inclination, r)`` of amplitude ``alpha``."""
        raise NotImplementedError

    def disk_mass(self, center: tuple[float, float], r: float) -> float:
        """F-mass of the open disk ``B(center, r)``."""
        return self.sector_mass(center, 0.0, TWO_PI, r)

    def quadrature_over(self, region: Region, phi: Callable[[float], float]) -> QuadResult:
        """Direct two-dimensional quadrature of ``phi(f) f`` over ``region``."""
        x0, x1, y0, y1 = self.support_box()
        if isinstance(region, Rectangle):
            x0, x1 = max(x0, region.x0), min(x1, region.x1)
            y0, y1 = max(y0, region.y0), min(y1, region.y1)
        elif isinstance(region, Disk):
            x0, x1 = max(x0, region.cx - region.radius), min(x1, region.cx + region.radius)
            y0, y1 = max(y0, region.cy - region.radius), min(y1, region.cy + region.radius)
        elif not isinstance(region, Plane):
            raise TypeError(f"Unsupported region shape: {type(region).__name__}")
        if x0 >= x1 or y0 >= y1:
            return QuadResult(0.0, 0.0, True)

        def _integrand(x: float, y: float) -> float:
            if isinstance(region, Disk) and math.hypot(x - region.cx, y - region.cy) >= region.radius:
                return 0.0
            fx = self(x, y)
            return phi(fx) * fx if fx > 0.0 else 0.0

        return integrate_2d(_integrand, x0, x1, y0, y1)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.name}

    def __repr__(self) -> str:
        """Return a debug-friendly representation."""
        return f"{self.__class__.__name__}()"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BaseDensity):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(self.to_dict()))
