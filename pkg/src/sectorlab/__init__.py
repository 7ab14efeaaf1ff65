"""Sectorlab - random scaled sector digraphs.

Samples marked point processes, builds sector (and spherical sector)
digraphs on them, counts vertices by degree and compares those counts with
their limiting means, distributions and covariances through seeded Monte
Carlo experiments.
"""

from .config import ConfigError, ExperimentConfig, GenerateConfig, TheoryRequest
from .densities import (
    BaseDensity,
    PiecewiseConstantGrid,
    StdGaussian2,
    UniformUnitCube,
    UniformUnitSquare,
)
from .digraph import (
    GeometricDigraph,
    build_digraph,
    build_digraph_3d,
    count_deg_at_least,
    count_deg_exact,
    knn_indices,
)
from .geometry import Disk, NormKind, Plane, Rectangle, SectorSpec, SphericalSectorSpec
from .montecarlo import ExperimentReport, register_experiment, run_experiment
from .pointprocess import MarkedPointCloud, SeededRng, sample_coupled, sample_marked
from .theory import FixedK, GrowingK, KnSchedule, evaluate_formula

__version__ = "0.1.0"

__all__ = [
    "BaseDensity",
    "ConfigError",
    "Disk",
    "ExperimentConfig",
    "ExperimentReport",
    "FixedK",
    "GenerateConfig",
    "GeometricDigraph",
    "GrowingK",
    "KnSchedule",
    "MarkedPointCloud",
    "NormKind",
    "PiecewiseConstantGrid",
    "Plane",
    "Rectangle",
    "SectorSpec",
    "SeededRng",
    "SphericalSectorSpec",
    "StdGaussian2",
    "TheoryRequest",
    "UniformUnitCube",
    "UniformUnitSquare",
    "build_digraph",
    "build_digraph_3d",
    "count_deg_at_least",
    "count_deg_exact",
    "evaluate_formula",
    "knn_indices",
    "register_experiment",
    "run_experiment",
    "sample_coupled",
    "sample_marked",
]
