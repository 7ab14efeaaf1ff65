"""Binomial and coupled Poissonized marked point processes, plus scalar kernels.

Every sampling call takes an explicit :class:`SeededRng`; identical
``(seed, stream)`` pairs reproduce identical samples regardless of the order
or thread in which they are drawn.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import erfc, gammaln, xlog1py, xlogy
from scipy.stats import binom, poisson

from sectorlab.densities import BaseDensity, LevelSetMass
from sectorlab.geometry import TWO_PI, Plane, Point2, Region

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / math.sqrt(TWO_PI)


@dataclass(frozen=True)
class SeededRng:
    """A reproducible random stream keyed by ``(seed, stream, substream)``."""

    seed: int
    stream: int = 0
    substream: int = 0

    def __post_init__(self) -> None:
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def generator(self) -> np.random.Generator:
        """A fresh PCG64 generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream, self.substream))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, substream: int) -> SeededRng:
        """An independent stream derived from this one."""
        return SeededRng(self.seed, self.stream, substream)


@dataclass(frozen=True)
class MarkedPointCloud:
    """Positions with their sector marks.

    ``inclinations`` are the planar sector start rays (or the azimuths ``Y``
    in 3-D); ``elevations`` holds the 3-D parameters ``Z`` and is ``None`` in
    the plane.
    """

    positions: NDArray[np.float64]
    inclinations: NDArray[np.float64]
    elevations: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        n = len(self.positions)
        if self.positions.ndim != 2 or self.positions.shape[1] not in (2, 3):
            raise ValueError(f"positions must have shape (n, 2) or (n, 3), got {self.positions.shape}")
        if len(self.inclinations) != n:
            raise ValueError("positions and inclinations must share their length")
        if self.positions.shape[1] == 3 and (self.elevations is None or len(self.elevations) != n):
            raise ValueError("3-D clouds need one elevation per point")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def dimension(self) -> int:
        return int(self.positions.shape[1])

    def __len__(self) -> int:
        return self.n

    def head(self, m: int) -> MarkedPointCloud:
        """The first ``m`` points (a view, no copy)."""
        return MarkedPointCloud(
            self.positions[:m],
            self.inclinations[:m],
            None if self.elevations is None else self.elevations[:m],
        )

    @classmethod
    def from_arrays(
        cls,
        positions: NDArray[np.float64] | list,
        inclinations: NDArray[np.float64] | list,
        elevations: NDArray[np.float64] | list | None = None,
    ) -> MarkedPointCloud:
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 3 if elevations is not None else 2)
        inc = np.asarray(inclinations, dtype=np.float64)
        ele = None if elevations is None else np.asarray(elevations, dtype=np.float64)
        return cls(pos, inc, ele)


@dataclass(frozen=True)
class CoupledSample:
    """One marked stream seen as a binomial and as a Poissonized process."""

    stream: MarkedPointCloud
    n: int
    N: int

    @property
    def binomial(self) -> MarkedPointCloud:
        return self.stream.head(self.n)

    @property
    def poisson(self) -> MarkedPointCloud:
        return self.stream.head(self.N)


# ---------------------------------------------------------------------------
# Density queries
# ---------------------------------------------------------------------------


def density_eval(d: BaseDensity, x: Point2 | tuple[float, float]) -> float:
    """``f(x)``."""
    return d(float(x[0]), float(x[1]))


def region_mass(d: BaseDensity, region: Region) -> float:
    """``F(A)`` for a rectangle, disk or the whole plane."""
    return d.region_mass(region)


def level_set_mass(
    d: BaseDensity, s: float, alpha: float, region: Region | None = None
) -> LevelSetMass:
    """F-masses of ``L_s`` and ``L_s^+`` (intersected with ``region``)."""
    if not (s > 0.0):
        raise ValueError(f"s must be positive, got {s}")
    if not (0.0 < alpha <= TWO_PI):
        raise ValueError(f"alpha must lie in (0, 2pi], got {alpha}")
    return d.level_set(s, alpha, region if region is not None else Plane())


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _draw(d: BaseDensity, n: int, gen: np.random.Generator) -> MarkedPointCloud:
    positions = d.sample_positions(n, gen)
    inclinations = gen.uniform(0.0, TWO_PI, size=n)
    elevations = gen.uniform(0.0, TWO_PI, size=n) if d.dimension == 3 else None
    return MarkedPointCloud(positions, inclinations, elevations)


def sample_marked(d: BaseDensity, n: int, rng: SeededRng) -> MarkedPointCloud:
    """``n`` i.i.d. positions from ``d`` with i.i.d. ``U[0, 2 pi)`` marks."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return _draw(d, n, rng.generator())


def sample_coupled(d: BaseDensity, n: int, rng: SeededRng) -> CoupledSample:
    """Draw ``N ~ Poisson(n)`` and a single marked stream of length ``max(n, N)``."""
    if n < 1:
        raise ValueError(f"coupled sampling needs n >= 1, got {n}")
    gen = rng.generator()
    big_n = int(gen.poisson(n))
    stream = _draw(d, max(n, big_n), gen)
    logger.debug(f"Coupled sample n={n} N={big_n} (stream {rng.stream})")
    return CoupledSample(stream, n, big_n)


# ---------------------------------------------------------------------------
# Scalar kernels
# ---------------------------------------------------------------------------


def poisson_pmf(lam: float, k: int) -> float:
    """``P(Poi(lam) = k)`` evaluated in log-space."""
    if lam < 0.0:
        raise ValueError(f"Poisson mean must be non-negative, got {lam}")
    if k < 0:
        return 0.0
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def poisson_tail(lam: float, k: int) -> float:
    """``P(Poi(lam) >= k)``, clamped to ``[0, 1]``."""
    if lam < 0.0:
        raise ValueError(f"Poisson mean must be non-negative, got {lam}")
    if k <= 0:
        return 1.0
    if lam == 0.0:
        return 0.0
    return min(max(float(poisson.sf(k - 1, lam)), 0.0), 1.0)


def poisson_quantile(lam: float, q: float = 1.0 - 1e-12) -> int:
    """Smallest ``m`` with ``P(Poi(lam) <= m) >= q`` (truncation point for sums)."""
    if lam <= 0.0:
        return 0
    return int(poisson.ppf(q, lam))


def binomial_pmf(n: int, p: float, k: int) -> float:
    """``P(Bin(n, p) = k)`` evaluated in log-space."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if k < 0 or k > n:
        return 0.0
    log_pmf = (
        gammaln(n + 1)
        - gammaln(k + 1)
        - gammaln(n - k + 1)
        + xlogy(k, p)
        + xlog1py(n - k, -p)
    )
    return float(np.exp(log_pmf))


def binomial_tail(n: int, p: float, k: int) -> float:
    """``P(Bin(n, p) >= k)``."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    return min(max(float(binom.sf(k - 1, n, p)), 0.0), 1.0)


def normal_cdf(t: float) -> float:
    """Standard normal distribution function via ``erfc``."""
    return float(0.5 * erfc(-t / math.sqrt(2.0)))


def normal_pdf(t: float) -> float:
    """Standard normal density."""
    return _INV_SQRT_2PI * math.exp(-0.5 * t * t)
