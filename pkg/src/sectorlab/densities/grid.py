"""Piecewise-constant densities on a rectangular grid of square cells."""

from collections.abc import Callable, Sequence
from decimal import Decimal
from typing import Any

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

_MASS_TOL = 1e-12


class PiecewiseConstantGrid(BaseDensity):
    """Density constant on each cell of an ``nx`` by ``ny`` grid.

    ``cell_values[j][i]`` is the value on ``[x0 + i h, x0 + (i+1) h) x
    [y0 + j h, y0 + (j+1) h)`` with ``h = cell_size``. Values may be given as
    decimal strings; they are parsed once.
    """

    name = "grid"

    def __init__(
        self,
        origin: tuple[float, float],
        cell_size: float,
        cell_values: Sequence[Sequence[float | str]] | NDArray[np.float64],
    ) -> None:
        values = np.array(
            [[float(Decimal(str(v))) for v in row] for row in cell_values], dtype=np.float64
        )
        if values.ndim != 2 or values.size == 0:
            raise ValueError("cell_values must be a non-empty 2-D table")
        if not (cell_size > 0.0):
            raise ValueError(f"cell_size must be positive, got {cell_size}")
        if np.any(~np.isfinite(values)) or np.any(values < 0.0):
            raise ValueError("cell_values must be finite and non-negative")
        mass = float(values.sum()) * cell_size * cell_size
        if abs(mass - 1.0) > _MASS_TOL:
            raise ValueError(f"grid density has total mass {mass!r}; it must be 1")

        self.origin = (float(origin[0]), float(origin[1]))
        self.cell_size = float(cell_size)
        self.values = values
        self.ny, self.nx = values.shape
        self._cell_mass = (values * cell_size * cell_size).ravel()
        self._cdf = np.cumsum(self._cell_mass)
        self._cdf /= self._cdf[-1]
        super().__init__()

    @property
    def f_max(self) -> float:
        return float(self.values.max())

    def support_box(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin
        return (x0, x0 + self.nx * self.cell_size, y0, y0 + self.ny * self.cell_size)

    def cell_boxes(self) -> list[tuple[float, float, float, float]]:
        """Boxes of all cells in row-major (y, then x) order."""
        x0, y0 = self.origin
        h = self.cell_size
        return [
            (x0 + i * h, x0 + (i + 1) * h, y0 + j * h, y0 + (j + 1) * h)
            for j in range(self.ny)
            for i in range(self.nx)
        ]

    def evaluate(self, xy: NDArray[np.float64]) -> NDArray[np.float64]:
        xy = np.atleast_2d(xy)
        i = np.floor((xy[:, 0] - self.origin[0]) / self.cell_size).astype(np.int64)
        j = np.floor((xy[:, 1] - self.origin[1]) / self.cell_size).astype(np.int64)
        ok = (i >= 0) & (i < self.nx) & (j >= 0) & (j < self.ny)
        out = np.zeros(len(xy), dtype=np.float64)
        out[ok] = self.values[j[ok], i[ok]]
        return out

    def sample_positions(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
        # Inverse CDF over the flattened cells, then uniform within the cell.
        cells = np.searchsorted(self._cdf, rng.random(n), side="right")
        cells = np.minimum(cells, len(self._cdf) - 1)
        j, i = np.divmod(cells, self.nx)
        offsets = rng.random((n, 2))
        x = self.origin[0] + (i + offsets[:, 0]) * self.cell_size
        y = self.origin[1] + (j + offsets[:, 1]) * self.cell_size
        return np.column_stack([x, y])

    def cell_areas_in(self, region: Region) -> NDArray[np.float64]:
        """Lebesgue measure of each cell intersected with ``region``."""
        if isinstance(region, Plane):
            return np.full(self.nx * self.ny, self.cell_size**2)
        return np.array([region_box_area(box, region) for box in self.cell_boxes()])

    def region_mass(self, region: Region) -> float:
        areas = self.cell_areas_in(region)
        return float(np.clip(np.dot(self.values.ravel(), areas), 0.0, 1.0))

    def integrate_over(self, region: Region, phi: Callable[[float], float]) -> float:
        flat = self.values.ravel()
        areas = self.cell_areas_in(region)
        return float(sum(phi(v) * v * a for v, a in zip(flat, areas, strict=True) if v > 0.0 and a > 0.0))

    def level_set(self, s: float, alpha: float, region: Region | None = None) -> LevelSetMass:
        region = region if region is not None else Plane()
        level = 2.0 / (s * alpha)
        flat = self.values.ravel()
        areas = self.cell_areas_in(region)
        on = np.abs(flat - level) <= LEVEL_SET_RTOL * level
        plus = (flat > level) & ~on
        return LevelSetMass(
            float(np.dot(flat[on], areas[on])),
            float(np.dot(flat[plus], areas[plus])),
            float(areas[on].sum()),
        )

    def sector_mass(
        self, apex: tuple[float, float], inclination: float, alpha: float, r: float
    ) -> float:
        total = 0.0
        for v, box in zip(self.values.ravel(), self.cell_boxes(), strict=True):
            if v > 0.0:
                total += v * sector_box_area(apex, inclination, alpha, r, box)
        return total

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.name,
            "origin": list(self.origin),
            "cell_size": self.cell_size,
            "cell_values": self.values.tolist(),
        }

    def __repr__(self) -> str:
        """Return a debug-friendly representation."""
        return (
            f"PiecewiseConstantGrid(origin={self.origin}, cell_size={self.cell_size}, "
            f"shape=({self.ny}, {self.nx}))"
        )
