import csv
from pathlib import Path

import numpy as np
import pytest

from sectorlab.config import ExperimentConfig
from sectorlab.densities import PiecewiseConstantGrid, StdGaussian2, UniformUnitSquare
from sectorlab.io import load_data
from sectorlab.pointprocess import MarkedPointCloud, SeededRng, sample_marked

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    """Directory holding the JSON test documents."""
    return DATA_DIR


@pytest.fixture(scope="session")
def oracles():
    """Closed-form reference values."""
    return load_data(DATA_DIR / "oracles.json")


@pytest.fixture(scope="session")
def read_table():
    """Rows of a written result CSV as dicts."""

    def read(path):
        with open(path, newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))

    return read


@pytest.fixture
def uniform():
    return UniformUnitSquare()


@pytest.fixture
def gaussian():
    return StdGaussian2()


@pytest.fixture
def grid_density():
    """Two by two grid on the unit square with one raised cell."""
    return PiecewiseConstantGrid((0.0, 0.0), 0.5, [["0.5", "1.5"], ["1", "1"]])


@pytest.fixture
def small_cloud(uniform):
    """A seeded uniform cloud of 400 marked points."""
    return sample_marked(uniform, 400, SeededRng(123))


@pytest.fixture
def line_cloud():
    """Three collinear points, all sectors pointing along +x with a quarter turn."""
    return MarkedPointCloud.from_arrays(
        [[0.0, 0.0], [0.1, 0.0], [0.3, 0.0]],
        np.full(3, -np.pi / 4),
    )


@pytest.fixture
def tiny_experiment():
    """Factory for small experiment configs that run in well under a second."""

    def make(preset="mean", **overrides):
        raw = {"n": 300, "replicates": 4, "seed": 5, **overrides}
        return ExperimentConfig.parse(raw, preset)

    return make
