"""Density models for the point processes."""

from .base import BaseDensity, DensityProtocol, LevelSetMass
from .gaussian import StdGaussian2
from .grid import PiecewiseConstantGrid
from .uniform import UniformUnitCube, UniformUnitSquare

DensityModel = UniformUnitSquare | StdGaussian2 | PiecewiseConstantGrid | UniformUnitCube

__all__ = [
    "BaseDensity",
    "DensityModel",
    "DensityProtocol",
    "LevelSetMass",
    "PiecewiseConstantGrid",
    "StdGaussian2",
    "UniformUnitCube",
    "UniformUnitSquare",
]
