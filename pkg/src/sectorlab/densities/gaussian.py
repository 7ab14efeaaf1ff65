"""Standard bivariate normal density."""

import math
from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.special import ndtr
from scipy.stats import ncx2

from sectorlab.densities.base import BaseDensity, LevelSetMass
from sectorlab.geometry import TWO_PI, Disk, Plane, Rectangle, Region
from sectorlab.quadrature import integrate_1d, integrate_2d

_PEAK = 1.0 / TWO_PI
_SQRT_2PI = math.sqrt(TWO_PI)
# Beyond this radius the remaining mass is below 1e-27.
_TAIL_RADIUS = 11.0


class StdGaussian2(BaseDensity):
    """``f(x) = exp(-|x|^2 / 2) / (2 pi)``; never truncated."""

    name = "gaussian"

    @property
    def f_max(self) -> float:
        return _PEAK

    def support_box(self) -> tuple[float, float, float, float]:
        return (-_TAIL_RADIUS, _TAIL_RADIUS, -_TAIL_RADIUS, _TAIL_RADIUS)

    def evaluate(self, xy: NDArray[np.float64]) -> NDArray[np.float64]:
        xy = np.atleast_2d(xy)
        return _PEAK * np.exp(-0.5 * np.einsum("ij,ij->i", xy, xy))

    def sample_positions(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
        return rng.standard_normal((n, 2))

    def region_mass(self, region: Region) -> float:
        if isinstance(region, Plane):
            return 1.0
        if isinstance(region, Rectangle):
            return float(
                (ndtr(region.x1) - ndtr(region.x0)) * (ndtr(region.y1) - ndtr(region.y0))
            )
        if isinstance(region, Disk):
            offset2 = region.cx**2 + region.cy**2
            if offset2 == 0.0:
                return -math.expm1(-0.5 * region.radius**2)
            return float(ncx2.cdf(region.radius**2, 2, offset2))
        raise TypeError(f"Unsupported region shape: {type(region).__name__}")

    def integrate_over(self, region: Region, phi: Callable[[float], float]) -> float:
        # Centred disks (and the plane) reduce to a one-dimensional integral in
        # u = exp(-rho^2 / 2), since f dx = 2 pi rho f d rho = du.
        if isinstance(region, Plane):
            return integrate_1d(lambda u: phi(u * _PEAK), 0.0, 1.0).value
        if isinstance(region, Disk) and region.cx == 0.0 and region.cy == 0.0:
            lower = math.exp(-0.5 * region.radius**2)
            return integrate_1d(lambda u: phi(u * _PEAK), lower, 1.0).value
        if isinstance(region, Disk):
            cx, cy, big_r = region.cx, region.cy, region.radius

            def _polar(theta: float, rho: float) -> float:
                fx = self(cx + rho * math.cos(theta), cy + rho * math.sin(theta))
                return phi(fx) * fx * rho

            return integrate_2d(_polar, 0.0, TWO_PI, 0.0, big_r).value
        return self.quadrature_over(region, phi).value

    def level_set(self, s: float, alpha: float, region: Region | None = None) -> LevelSetMass:
        region = region if region is not None else Plane()
        level = 2.0 / (s * alpha)
        if level >= _PEAK:
            return LevelSetMass(0.0, 0.0, 0.0)
        # {f > level} is the centred disk of radius^2 = -2 ln(2 pi level).
        radius = math.sqrt(-2.0 * math.log(level / _PEAK))
        if isinstance(region, Plane):
            return LevelSetMass(0.0, 1.0 - level / _PEAK, 0.0)
        if isinstance(region, Disk) and region.cx == 0.0 and region.cy == 0.0:
            return LevelSetMass(0.0, self.region_mass(Disk(0.0, 0.0, min(radius, region.radius))), 0.0)
        if isinstance(region, Disk):
            plus = self._disk_overlap_mass(region, Disk(0.0, 0.0, radius))
        else:
            plus = self.quadrature_over(region, lambda fx: 1.0 if fx > level else 0.0).value
        return LevelSetMass(0.0, plus, 0.0)

    def _disk_overlap_mass(self, region: Disk, inner: Disk) -> float:
        cx, cy, big_r = region.cx, region.cy, region.radius

        def _polar(theta: float, rho: float) -> float:
            x, y = cx + rho * math.cos(theta), cy + rho * math.sin(theta)
            if math.hypot(x, y) >= inner.radius:
                return 0.0
            return self(x, y) * rho

        return integrate_2d(_polar, 0.0, TWO_PI, 0.0, big_r).value

    def sector_mass(
        self, apex: tuple[float, float], inclination: float, alpha: float, r: float
    ) -> float:
        px, py = apex
        base2 = px * px + py * py

        def _radial(theta: float) -> float:
            # ∫_0^r rho f(apex + rho e) d rho in closed form, b = apex . e.
            b = px * math.cos(theta) + py * math.sin(theta)
            perp = math.exp(-0.5 * (base2 - b * b))
            w0, w1 = b, r + b
            part = math.exp(-0.5 * w0 * w0) - math.exp(-0.5 * w1 * w1)
            part -= b * _SQRT_2PI * (ndtr(w1) - ndtr(w0))
            return _PEAK * perp * part

        return max(integrate_1d(_radial, inclination, inclination + alpha, epsrel=1e-10).value, 0.0)
