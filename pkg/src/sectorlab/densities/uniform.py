"""Uniform densities on the unit square and the unit cube."""

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from sectorlab.densities.base import (
    LEVEL_SET_RTOL,
    BaseDensity,
    LevelSetMass,
    region_box_area,
    sector_box_area,
)
from sectorlab.geometry import Plane, Region

_UNIT_BOX = (0.0, 1.0, 0.0, 1.0)


class UniformUnitSquare(BaseDensity):
    """``f = 1`` on ``[0, 1]^2``."""

    name = "uniform"

    @property
    def f_max(self) -> float:
        return 1.0

    def support_box(self) -> tuple[float, float, float, float]:
        return _UNIT_BOX

    def evaluate(self, xy: NDArray[np.float64]) -> NDArray[np.float64]:
        xy = np.atleast_2d(xy)
        inside = np.all((xy >= 0.0) & (xy <= 1.0), axis=1)
        return inside.astype(np.float64)

    def sample_positions(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
        return rng.random((n, 2))

    def region_mass(self, region: Region) -> float:
        return min(max(region_box_area(_UNIT_BOX, region), 0.0), 1.0)

    def integrate_over(self, region: Region, phi: Callable[[float], float]) -> float:
        return phi(1.0) * self.region_mass(region)

    def level_set(self, s: float, alpha: float, region: Region | None = None) -> LevelSetMass:
        region = region if region is not None else Plane()
        level = 2.0 / (s * alpha)
        mass = self.region_mass(region)
        if abs(1.0 - level) <= LEVEL_SET_RTOL * level:
            return LevelSetMass(mass, 0.0, mass)
        if 1.0 > level:
            return LevelSetMass(0.0, mass, 0.0)
        return LevelSetMass(0.0, 0.0, 0.0)

    def sector_mass(
        self, apex: tuple[float, float], inclination: float, alpha: float, r: float
    ) -> float:
        return sector_box_area(apex, inclination, alpha, r, _UNIT_BOX)


class UniformUnitCube(BaseDensity):
    """``f = 1`` on ``[0, 1]^3`` (spherical sector model only).

    Only whole-space queries are meaningful in three dimensions.
    """

    name = "uniform-cube"
    dimension = 3

    @property
    def f_max(self) -> float:
        return 1.0

    def evaluate(self, xyz: NDArray[np.float64]) -> NDArray[np.float64]:
        xyz = np.atleast_2d(xyz)
        return np.all((xyz >= 0.0) & (xyz <= 1.0), axis=1).astype(np.float64)

    def sample_positions(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
        return rng.random((n, 3))

    def region_mass(self, region: Region) -> float:
        if not isinstance(region, Plane):
            raise TypeError("3-D densities only support whole-space regions")
        return 1.0

    def integrate_over(self, region: Region, phi: Callable[[float], float]) -> float:
        return phi(1.0) * self.region_mass(region)

    def support_box(self) -> tuple[float, float, float, float]:
        raise ValueError(f"{self.name}: planar quadrature does not apply in three dimensions")

    def level_set(self, s: float, alpha: float, region: Region | None = None) -> LevelSetMass:
        raise ValueError(f"{self.name}: growing-k level sets are defined for planar densities only")

    def sector_mass(
        self, apex: tuple[float, float], inclination: float, alpha: float, r: float
    ) -> float:
        raise ValueError(f"{self.name}: use spherical sectors, planar sector masses do not apply")
