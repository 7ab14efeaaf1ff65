"""Limit values of the degree statistics: radii, means, degree distribution, covariances.

Every functional of the density is routed through
:meth:`BaseDensity.integrate_over`, which evaluates ``∫_A phi(f(x)) f(x) dx`` in
closed form where the density allows it and by adaptive quadrature otherwise.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Literal, NamedTuple

import numpy as np

from sectorlab.densities import BaseDensity, StdGaussian2, UniformUnitCube, UniformUnitSquare
from sectorlab.densities.base import region_box_area
from sectorlab.geometry import (
    TWO_PI,
    Disk,
    Plane,
    Region,
    SectorSpec,
    disk_intersection_area,
    sector_contains,
    sector_intersection_area,
    spherical_sector_solid_fraction,
)
from sectorlab.pointprocess import (
    SeededRng,
    binomial_tail,
    level_set_mass,
    normal_cdf,
    normal_pdf,
    poisson_pmf,
    poisson_tail,
)
from sectorlab.quadrature import integrate_1d

logger = logging.getLogger(__name__)

DegreeKind = Literal["out", "in"]

DEFAULT_TRIALS = 4000
_BVN_EPSABS = 1e-10


class Estimate(NamedTuple):
    """A value with its standard error (zero for deterministic evaluations)."""

    value: float
    std_error: float = 0.0
    components: Mapping[str, float] | None = None


# ---------------------------------------------------------------------------
# Regimes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedK:
    """``n r^2 = t`` with a fixed degree threshold ``k``."""

    k: int
    t: float

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        if not (self.t > 0.0):
            raise ValueError(f"t must be positive in the fixed-k regime, got {self.t}")

    @property
    def tag(self) -> str:
        return "fixed-k"

    def threshold(self, n: int) -> int:
        return self.k

    def radius(self, n: int) -> float:
        return radius(self, n)


@dataclass(frozen=True)
class GrowingK:
    """``n r^2 = s (k_n + t sqrt(k_n))`` with threshold ``k_n``."""

    s: float
    t: float
    kn: int

    def __post_init__(self) -> None:
        if not (self.s > 0.0):
            raise ValueError(f"s must be positive, got {self.s}")
        if self.kn < 1:
            raise ValueError(f"k_n must be at least 1, got {self.kn}")

    @property
    def tag(self) -> str:
        return "growing-k"

    def threshold(self, n: int) -> int:
        return self.kn

    def radius(self, n: int) -> float:
        return radius(self, n)


RadiusRegime = FixedK | GrowingK


@dataclass(frozen=True)
class KnSchedule:
    """``k_n = ceil(n ** gamma)`` with ``gamma`` in ``(0, 1/2)``."""

    gamma: float

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma < 0.5):
            raise ValueError(f"gamma must lie in (0, 1/2), got {self.gamma}")

    def kn(self, n: int) -> int:
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        return max(1, math.ceil(n**self.gamma))

    def concentration_ratio(self, n: int) -> float:
        """``k_n^2 ln(n) / n``, which must vanish for the concentration results."""
        return self.kn(n) ** 2 * math.log(n) / n

    def regime(self, n: int, s: float, t: float) -> GrowingK:
        return GrowingK(s, t, self.kn(n))


@dataclass(frozen=True)
class LimitMean:
    """Limit of ``E[xi] / n``; growing-k values carry their level-set components."""

    value: float
    regime: str
    level_plus_mass: float | None = None
    level_mass: float | None = None


def radius(regime: RadiusRegime, n: int) -> float:
    """Connection radius ``r_n`` for the given regime."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if isinstance(regime, FixedK):
        return math.sqrt(regime.t / n)
    radicand = regime.s * (regime.kn + regime.t * math.sqrt(regime.kn)) / n
    if radicand <= 0.0:
        raise ValueError(
            f"k_n + t sqrt(k_n) must be positive (k_n={regime.kn}, t={regime.t})"
        )
    return math.sqrt(radicand)


def radius_3d(t: float, n: int) -> float:
    """Radius of the spherical sector model, ``n r^3 = t``."""
    if n < 1 or not (t > 0.0):
        raise ValueError(f"need n >= 1 and t > 0, got n={n}, t={t}")
    return (t / n) ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# Means and the degree distribution
# ---------------------------------------------------------------------------


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= TWO_PI):
        raise ValueError(f"alpha must lie in (0, 2pi], got {alpha}")


def limit_mean_fixed_k(
    d: BaseDensity, alpha: float, t: float, k: int, region: Region | None = None
) -> float:
    """``∫_A P(Poi(alpha t f / 2) >= k) f dx``."""
    _check_alpha(alpha)
    if t < 0.0 or k < 0:
        raise ValueError(f"need t >= 0 and k >= 0, got t={t}, k={k}")
    region = region if region is not None else Plane()
    if d.dimension == 3:
        return limit_mean_fixed_k_3d(d, alpha, t, k)
    half = 0.5 * alpha * t
    value = d.integrate_over(region, lambda v: poisson_tail(half * v, k))
    return min(max(value, 0.0), 1.0)


def limit_mean_fixed_k_3d(d: BaseDensity, alpha: float, t: float, k: int) -> float:
    """Spherical sector analogue: mean ``(4 pi / 3) * solid fraction * t * f``."""
    if not isinstance(d, UniformUnitCube):
        raise TypeError("the spherical sector model is supported for the uniform cube only")
    scale = (4.0 * math.pi / 3.0) * spherical_sector_solid_fraction(alpha) * t
    return d.integrate_over(Plane(), lambda v: poisson_tail(scale * v, k))


def limit_mean_growing(
    d: BaseDensity, alpha: float, s: float, t: float, region: Region | None = None
) -> LimitMean:
    """``F(L_s^+ ∩ A) + Phi(t) F(L_s ∩ A)``."""
    ls = level_set_mass(d, s, alpha, region)
    value = ls.mass_on_Lplus + normal_cdf(t) * ls.mass_on_L
    return LimitMean(min(max(value, 0.0), 1.0), "growing-k", ls.mass_on_Lplus, ls.mass_on_L)


def degree_distribution(
    d: BaseDensity, alpha: float, t: float, k: int, method: str = "closed-form"
) -> float:
    """Limiting probability ``p(k)`` that a vertex has out- (or in-) degree ``k``.

    ``p(k) = ∫ P(Poi(alpha t f / 2) = k) f dx``. The uniform density gives a
    Poisson law; the Gaussian closed form
    ``1/a - e^{-a} sum_{i<=k} a^{i-1} / i!`` with ``a = alpha t / (4 pi)`` is
    evaluated as ``P(Poi(a) >= k + 1) / a``, which is the same quantity
    without cancellation. ``method="quadrature"`` forces direct integration.
    """
    _check_alpha(alpha)
    if not (t > 0.0) or k < 0:
        raise ValueError(f"need t > 0 and k >= 0, got t={t}, k={k}")
    if d.dimension == 3:
        scale = (4.0 * math.pi / 3.0) * spherical_sector_solid_fraction(alpha) * t
        return d.integrate_over(Plane(), lambda v: poisson_pmf(scale * v, k))
    half = 0.5 * alpha * t
    if method == "closed-form":
        if isinstance(d, UniformUnitSquare):
            return poisson_pmf(half, k)
        if isinstance(d, StdGaussian2):
            a = alpha * t / (2.0 * TWO_PI)
            return poisson_tail(a, k + 1) / a
    elif method != "quadrature":
        raise ValueError(f"unknown method {method!r}; expected 'closed-form' or 'quadrature'")
    return d.integrate_over(Plane(), lambda v: poisson_pmf(half * v, k))


def gaussian_degree_distribution_series(alpha: float, t: float, k: int) -> float:
    """The Gaussian closed form summed term by term (small ``k`` only)."""
    a = alpha * t / (2.0 * TWO_PI)
    series = sum(a ** (i - 1) / math.factorial(i) for i in range(k + 1))
    return 1.0 / a - math.exp(-a) * series


def degree_tail_bound(alpha: float, t: float, f_max: float, k: int) -> float:
    """Light-tail bound ``(alpha t f_max / 2)^k / k!``."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k == 0:
        return 1.0
    lam = 0.5 * alpha * t * f_max
    if lam <= 0.0:
        return 0.0
    return math.exp(k * math.log(lam) - math.lgamma(k + 1))


def h_correction(
    d: BaseDensity, alpha: float, t: float, k: int, method: str = "closed-form"
) -> float:
    """``h(t) = ∫ {P(Poi(l) = k-1) l + P(Poi(l) >= k)} f dx`` with ``l = alpha t f / 2``."""
    _check_alpha(alpha)
    if t < 0.0 or k < 1:
        raise ValueError(f"need t >= 0 and k >= 1, got t={t}, k={k}")
    half = 0.5 * alpha * t

    def phi(v: float) -> float:
        lam = half * v
        return poisson_pmf(lam, k - 1) * lam + poisson_tail(lam, k)

    if method == "closed-form":
        return d.integrate_over(Plane(), phi)
    if method == "quadrature":
        return d.quadrature_over(Plane(), phi).value
    raise ValueError(f"unknown method {method!r}; expected 'closed-form' or 'quadrature'")


# ---------------------------------------------------------------------------
# Fixed-k covariance of the Poissonized statistics
# ---------------------------------------------------------------------------


def _joint_tail(
    lam_shared: float, lam_1: float, lam_2: float, need_1: int, need_2: int
) -> float:
    """``P(N + N_1 >= need_1, N + N_2 >= need_2)`` for independent Poisson counts.

    Once the shared count reaches ``max(need_1, need_2)`` both events hold, so
    the sum is finite and exact.
    """
    top = max(need_1, need_2, 0)
    total = poisson_tail(lam_shared, top)
    for m in range(top):
        total += (
            poisson_pmf(lam_shared, m)
            * poisson_tail(lam_1, need_1 - m)
            * poisson_tail(lam_2, need_2 - m)
        )
    return min(total, 1.0)


def _overlap_psi(
    lam: float,
    area_1: float,
    area_2: float,
    shared: float,
    z_in_first: bool,
    origin_in_second: bool,
    k: int,
) -> float:
    shared = min(max(shared, 0.0), area_1, area_2)
    joint = _joint_tail(
        lam * shared,
        lam * (area_1 - shared),
        lam * (area_2 - shared),
        k - int(z_in_first),
        k - int(origin_in_second),
    )
    return joint - poisson_tail(lam * area_1, k) * poisson_tail(lam * area_2, k)


def psi_in(rho: float, lam: float, t: float, u: float, k: int) -> float:
    """In-degree covariance kernel at separation ``rho = ||z||`` and intensity ``lam``.

    The first disk ``B(0, sqrt t)`` also counts the inserted point ``z`` and
    the second ``B(z, sqrt u)`` the inserted point ``0``.
    """
    rt, ru = math.sqrt(t), math.sqrt(u)
    if rho >= rt + ru:
        return 0.0
    shared = disk_intersection_area(rho, rt, ru)
    return _overlap_psi(lam, math.pi * t, math.pi * u, shared, rho < rt, rho < ru, k)


def psi_in_integral(lam: float, t: float, u: float, k: int) -> float:
    """``∫_{R^2} psi_in(||z||, lam) dz`` (the kernel vanishes beyond ``sqrt t + sqrt u``)."""
    rt, ru = math.sqrt(t), math.sqrt(u)
    res = integrate_1d(
        lambda rho: psi_in(rho, lam, t, u, k) * TWO_PI * rho,
        0.0,
        rt + ru,
        points=[abs(rt - ru), rt, ru],
    )
    return res.value


def poissonized_cov_in_fixed_k(
    d: BaseDensity,
    alpha: float,
    t: float,
    u: float,
    k: int,
    region: Region | None = None,
) -> float:
    """Limiting covariance of the Poissonized in-degree statistics at ``t`` and ``u``."""
    _check_alpha(alpha)
    if not (t > 0.0 and u > 0.0) or k < 1:
        raise ValueError(f"need t, u > 0 and k >= 1, got t={t}, u={u}, k={k}")
    region = region if region is not None else Plane()
    first = limit_mean_fixed_k(d, alpha, min(t, u), k, region)
    scale = alpha / TWO_PI

    @lru_cache(maxsize=4096)
    def big_psi(lam: float) -> float:
        return psi_in_integral(lam, t, u, k)

    second = d.integrate_over(region, lambda v: big_psi(scale * v) * v)
    logger.debug(f"In-degree covariance t={t} u={u} k={k}: {first} + {second}")
    return first + second


def psi_out(
    z: tuple[float, float],
    y1: float,
    y2: float,
    lam: float,
    alpha: float,
    t: float,
    u: float,
    k: int,
) -> float:
    """Out-degree covariance kernel for sectors ``S(0, y1, sqrt t)`` and ``S(z, y2, sqrt u)``."""
    s1 = SectorSpec((0.0, 0.0), y1, alpha, math.sqrt(t))
    s2 = SectorSpec(z, y2, alpha, math.sqrt(u))
    if math.hypot(*z) >= s1.radius + s2.radius:
        return 0.0
    shared = sector_intersection_area(s1, s2).value
    return _overlap_psi(
        lam,
        s1.area,
        s2.area,
        shared,
        sector_contains(s1, z),
        sector_contains(s2, (0.0, 0.0)),
        k,
    )


def _mean_and_error(samples: np.ndarray, bound: float) -> tuple[float, float]:
    if len(samples) == 1:
        return float(samples[0]), bound
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(len(samples)))


def estimate_cov_out_fixed_k(
    d: BaseDensity,
    alpha: float,
    t: float,
    u: float,
    k: int,
    trials: int = DEFAULT_TRIALS,
    rng: SeededRng | None = None,
    region: Region | None = None,
) -> Estimate:
    """Monte Carlo estimate of the out-degree Poissonized covariance.

    Draws ``X ~ F``, ``z`` uniform on the disk of radius ``sqrt t + sqrt u``
    and the two sector directions; each trial evaluates the kernel exactly.
    """
    _check_alpha(alpha)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if not (t > 0.0 and u > 0.0) or k < 1:
        raise ValueError(f"need t, u > 0 and k >= 1, got t={t}, u={u}, k={k}")
    region = region if region is not None else Plane()
    gen = (rng or SeededRng(0)).generator()
    reach = math.sqrt(t) + math.sqrt(u)
    disk_area = math.pi * reach * reach

    x = d.sample_positions(trials, gen)
    fx = d.evaluate(x)
    inside = region.contains(x)
    rad = reach * np.sqrt(gen.random(trials))
    ang = gen.uniform(0.0, TWO_PI, trials)
    y1 = gen.uniform(0.0, TWO_PI, trials)
    y2 = gen.uniform(0.0, TWO_PI, trials)

    samples = np.zeros(trials)
    for i in range(trials):
        if inside[i] and fx[i] > 0.0:
            z = (float(rad[i] * math.cos(ang[i])), float(rad[i] * math.sin(ang[i])))
            samples[i] = fx[i] * disk_area * psi_out(z, y1[i], y2[i], fx[i], alpha, t, u, k)
    second, se = _mean_and_error(samples, d.f_max * disk_area)
    first = limit_mean_fixed_k(d, alpha, min(t, u), k, region)
    return Estimate(first + second, se, {"mean_term": first, "overlap_term": second})


# ---------------------------------------------------------------------------
# Growing-k covariance (white-noise limits)
# ---------------------------------------------------------------------------


def bivariate_normal_cdf(h: float, k: float, rho: float) -> float:
    """``P(X <= h, Y <= k)`` for standard normals with correlation ``rho``.

    Integrates the density along ``rho = sin(theta)`` from independence.
    """
    if not (-1.0 <= rho <= 1.0):
        raise ValueError(f"correlation must lie in [-1, 1], got {rho}")
    base = normal_cdf(h) * normal_cdf(k)
    if rho == 0.0:
        return base
    if rho == 1.0:
        return normal_cdf(min(h, k))
    if rho == -1.0:
        return max(0.0, normal_cdf(h) + normal_cdf(k) - 1.0)
    hk2 = h * h + k * k
    hk = 2.0 * h * k

    def integrand(theta: float) -> float:
        c2 = math.cos(theta) ** 2
        return math.exp(-(hk2 - hk * math.sin(theta)) / (2.0 * c2))

    res = integrate_1d(integrand, 0.0, math.asin(rho), epsabs=_BVN_EPSABS, epsrel=1e-10)
    return min(max(base + res.value / TWO_PI, 0.0), 1.0)


def _indicator_cov(t: float, u: float, rho: float) -> float:
    return bivariate_normal_cdf(t, u, rho) - normal_cdf(t) * normal_cdf(u)


def limit_cov_growing(
    d: BaseDensity,
    alpha: float,
    s: float,
    t: float,
    u: float,
    kind: DegreeKind = "in",
    region: Region | None = None,
    trials: int = DEFAULT_TRIALS,
    rng: SeededRng | None = None,
) -> Estimate:
    """Limiting covariance of the Poissonized statistics in the growing-k regime.

    The in-degree form integrates the unit-disk white-noise covariance
    exactly; the out-degree form averages over sector pairs by Monte Carlo.
    """
    _check_alpha(alpha)
    if kind not in ("in", "out"):
        raise ValueError(f"kind must be 'in' or 'out', got {kind!r}")
    ls = level_set_mass(d, s, alpha, region)
    if ls.mass_on_L == 0.0:
        logger.warning(f"F(L_s ∩ A) = 0 for s={s}, alpha={alpha}; growing-k covariance is 0")
        return Estimate(0.0, 0.0)

    if kind == "in":
        prefactor = 4.0 * ls.area_on_L / (s * alpha * alpha)

        def radial(r: float) -> float:
            rho = disk_intersection_area(r, 1.0, 1.0) / math.pi
            return _indicator_cov(t, u, min(rho, 1.0)) * TWO_PI * r

        res = integrate_1d(radial, 0.0, 2.0)
        return Estimate(prefactor * res.value, 0.0)

    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    gen = (rng or SeededRng(0)).generator()
    prefactor = ls.area_on_L / (s * (math.pi * alpha) ** 2)
    volume = TWO_PI * TWO_PI * 4.0 * math.pi
    rad = 2.0 * np.sqrt(gen.random(trials))
    ang = gen.uniform(0.0, TWO_PI, trials)
    y1 = gen.uniform(0.0, TWO_PI, trials)
    y2 = gen.uniform(0.0, TWO_PI, trials)
    samples = np.empty(trials)
    for i in range(trials):
        z = (float(rad[i] * math.cos(ang[i])), float(rad[i] * math.sin(ang[i])))
        shared = sector_intersection_area(
            SectorSpec((0.0, 0.0), y1[i], alpha, 1.0), SectorSpec(z, y2[i], alpha, 1.0)
        ).value
        samples[i] = _indicator_cov(t, u, min(2.0 * shared / alpha, 1.0))
    mean, se = _mean_and_error(samples, 0.25)
    scale = prefactor * volume
    return Estimate(scale * mean, scale * se)


# ---------------------------------------------------------------------------
# Covariances of the binomial statistics
# ---------------------------------------------------------------------------


def variance_fixed_k(
    d: BaseDensity,
    alpha: float,
    t: float,
    u: float,
    k: int,
    kind: DegreeKind = "in",
    trials: int = DEFAULT_TRIALS,
    rng: SeededRng | None = None,
) -> Estimate:
    """Limiting covariance of ``n^{-1/2} xi_n`` at ``t`` and ``u``: Poissonized minus ``h(t) h(u)``."""
    correction = h_correction(d, alpha, t, k) * h_correction(d, alpha, u, k)
    if kind == "in":
        return Estimate(poissonized_cov_in_fixed_k(d, alpha, t, u, k) - correction, 0.0)
    if kind == "out":
        est = estimate_cov_out_fixed_k(d, alpha, t, u, k, trials, rng)
        return Estimate(est.value - correction, est.std_error)
    raise ValueError(f"kind must be 'in' or 'out', got {kind!r}")


def variance_growing(
    d: BaseDensity,
    alpha: float,
    s: float,
    t: float,
    u: float,
    kind: DegreeKind = "in",
    trials: int = DEFAULT_TRIALS,
    rng: SeededRng | None = None,
) -> Estimate:
    """Limiting covariance of ``(n k_n)^{-1/2} xi_n``: white-noise term minus ``g(t) g(u)``."""
    cov = limit_cov_growing(d, alpha, s, t, u, kind, None, trials, rng)
    mass = level_set_mass(d, s, alpha).mass_on_L
    return Estimate(cov.value - normal_pdf(t) * normal_pdf(u) * mass * mass, cov.std_error)


# ---------------------------------------------------------------------------
# Finite-n integrands
# ---------------------------------------------------------------------------


def mean_integrand_finite_n(
    d: BaseDensity,
    alpha: float,
    n: int,
    regime: RadiusRegime,
    x: tuple[float, float],
    y: float = 0.0,
    kind: DegreeKind = "out",
    poissonized: bool = False,
) -> float:
    """Probability that a vertex at ``x`` (direction ``y``) reaches the threshold at size ``n``.

    Out-degree uses the sector mass ``p_n = F(S_n(x, y))`` and
    ``P(Bin(n-1, p_n) >= k_n)``; in-degree uses
    ``q_n = alpha / (2 pi) F(B_n(x))``. ``poissonized`` swaps the binomial
    for ``Poi(n p_n)``.
    """
    _check_alpha(alpha)
    r = regime.radius(n)
    k = regime.threshold(n)
    if kind == "out":
        p = d.sector_mass((float(x[0]), float(x[1])), y, alpha, r)
    elif kind == "in":
        p = alpha / TWO_PI * d.disk_mass((float(x[0]), float(x[1])), r)
    else:
        raise ValueError(f"kind must be 'in' or 'out', got {kind!r}")
    p = min(max(p, 0.0), 1.0)
    if poissonized:
        return poisson_tail(n * p, k)
    return binomial_tail(n - 1, p, k)


def spherical_in_mass(
    d: BaseDensity, x: tuple[float, float, float], r: float, alpha: float
) -> float:
    """``q_n = F(B(x, r)) (1 - cos(alpha/2)) / 2`` for the uniform cube."""
    if not isinstance(d, UniformUnitCube):
        raise TypeError("the spherical sector model is supported for the uniform cube only")
    cx, cy, cz = (float(v) for v in x)

    def slice_area(z: float) -> float:
        rad2 = r * r - (z - cz) ** 2
        if rad2 <= 0.0:
            return 0.0
        return region_box_area((0.0, 1.0, 0.0, 1.0), Disk(cx, cy, math.sqrt(rad2)))

    lo, hi = max(0.0, cz - r), min(1.0, cz + r)
    volume = integrate_1d(slice_area, lo, hi).value if hi > lo else 0.0
    return volume * spherical_sector_solid_fraction(alpha)


def mean_integrand_finite_n_3d(
    d: BaseDensity, alpha: float, n: int, t: float, k: int, x: tuple[float, float, float]
) -> float:
    """``P(Bin(n-1, q_n) >= k)`` for in-degrees of the spherical sector model."""
    return binomial_tail(n - 1, spherical_in_mass(d, x, radius_3d(t, n), alpha), k)


# ---------------------------------------------------------------------------
# Formula registry
# ---------------------------------------------------------------------------

Formula = Callable[[BaseDensity, Mapping[str, Any], SeededRng], Estimate]


def _region(p: Mapping[str, Any]) -> Region:
    return p.get("region") or Plane()


def _regime(p: Mapping[str, Any]) -> RadiusRegime:
    if "s" in p:
        return GrowingK(float(p["s"]), float(p.get("t", 0.0)), int(p["kn"]))
    return FixedK(int(p.get("k", 0)), float(p["t"]))


def _radius_formula(d: BaseDensity, p: Mapping[str, Any], rng: SeededRng) -> Estimate:
    n = int(p["n"])
    if d.dimension == 3:
        return Estimate(radius_3d(float(p["t"]), n))
    return Estimate(radius(_regime(p), n))


def _scale_pair(p: Mapping[str, Any]) -> tuple[float, float]:
    """``(alpha, s)`` for level-set formulas; only the product ``s alpha`` matters there."""
    if "alpha" not in p and "s_alpha" in p:
        return TWO_PI, float(p["s_alpha"]) / TWO_PI
    return float(p["alpha"]), float(p["s"])


def _level_set_formula(d: BaseDensity, p: Mapping[str, Any], rng: SeededRng) -> Estimate:
    alpha, s = _scale_pair(p)
    ls = level_set_mass(d, s, alpha, _region(p))
    return Estimate(
        ls.mass_on_L,
        0.0,
        {"mass_on_L": ls.mass_on_L, "mass_on_Lplus": ls.mass_on_Lplus, "area_on_L": ls.area_on_L},
    )


def _mean_growing_formula(d: BaseDensity, p: Mapping[str, Any], rng: SeededRng) -> Estimate:
    alpha, s = _scale_pair(p)
    lm = limit_mean_growing(d, alpha, s, float(p["t"]), _region(p))
    return Estimate(
        lm.value, 0.0, {"level_plus_mass": lm.level_plus_mass or 0.0, "level_mass": lm.level_mass or 0.0}
    )


def _finite_n_formula(d: BaseDensity, p: Mapping[str, Any], rng: SeededRng) -> Estimate:
    x = p["x"]
    if d.dimension == 3:
        return Estimate(
            mean_integrand_finite_n_3d(d, float(p["alpha"]), int(p["n"]), float(p["t"]), int(p["k"]), x)
        )
    return Estimate(
        mean_integrand_finite_n(
            d,
            float(p["alpha"]),
            int(p["n"]),
            _regime(p),
            x,
            float(p.get("y", 0.0)),
            p.get("kind", "out"),
            bool(p.get("poissonized", False)),
        )
    )


FORMULAS: dict[str, Formula] = {
    "radius": _radius_formula,
    "level-set-mass": _level_set_formula,
    "solid-fraction": lambda d, p, rng: Estimate(spherical_sector_solid_fraction(float(p["alpha"]))),
    "degree-distribution": lambda d, p, rng: Estimate(
        degree_distribution(d, float(p["alpha"]), float(p["t"]), int(p["k"]), p.get("method", "closed-form"))
    ),
    "degree-tail-bound": lambda d, p, rng: Estimate(
        degree_tail_bound(float(p["alpha"]), float(p["t"]), float(p.get("f_max", d.f_max)), int(p["k"]))
    ),
    "mean-fixed-k": lambda d, p, rng: Estimate(
        limit_mean_fixed_k(d, float(p["alpha"]), float(p["t"]), int(p["k"]), _region(p))
    ),
    "mean-growing": _mean_growing_formula,
    "mean-finite-n": _finite_n_formula,
    "h-correction": lambda d, p, rng: Estimate(
        h_correction(d, float(p["alpha"]), float(p["t"]), int(p["k"]), p.get("method", "closed-form"))
    ),
    "cov-in-fixed-k": lambda d, p, rng: Estimate(
        poissonized_cov_in_fixed_k(
            d, float(p["alpha"]), float(p["t"]), float(p["u"]), int(p["k"]), _region(p)
        )
    ),
    "cov-out-fixed-k": lambda d, p, rng: estimate_cov_out_fixed_k(
        d,
        float(p["alpha"]),
        float(p["t"]),
        float(p["u"]),
        int(p["k"]),
        int(p.get("trials", DEFAULT_TRIALS)),
        rng,
        _region(p),
    ),
    "cov-growing": lambda d, p, rng: limit_cov_growing(
        d,
        float(p["alpha"]),
        float(p["s"]),
        float(p["t"]),
        float(p["u"]),
        p.get("kind", "in"),
        _region(p),
        int(p.get("trials", DEFAULT_TRIALS)),
        rng,
    ),
    "variance-fixed-k": lambda d, p, rng: variance_fixed_k(
        d,
        float(p["alpha"]),
        float(p["t"]),
        float(p["u"]),
        int(p["k"]),
        p.get("kind", "in"),
        int(p.get("trials", DEFAULT_TRIALS)),
        rng,
    ),
    "variance-growing": lambda d, p, rng: variance_growing(
        d,
        float(p["alpha"]),
        float(p["s"]),
        float(p["t"]),
        float(p["u"]),
        p.get("kind", "in"),
        int(p.get("trials", DEFAULT_TRIALS)),
        rng,
    ),
}


# Equation labels used by the original derivations.
FORMULA_ALIASES: dict[str, str] = {
    "eq13": "h-correction",
    "eq15": "mean-fixed-k",
    "eq16": "mean-growing",
    "eq62": "degree-distribution",
    "lemma2": "cov-growing",
}

# Formulas that also make sense for the spherical sector model.
SPATIAL_FORMULAS = frozenset(
    {"radius", "solid-fraction", "degree-distribution", "mean-fixed-k", "mean-finite-n"}
)


def evaluate_formula(
    name: str, d: BaseDensity, params: Mapping[str, Any], rng: SeededRng | None = None
) -> Estimate:
    """Evaluate a registered formula by name.

    Raises:
        KeyError: If ``name`` is not registered (the message lists valid names).
        KeyError: If a required parameter is missing.
        ValueError: If a planar-only formula is asked of a 3-D density.
    """
    canonical = resolve_formula(name)
    if d.dimension == 3 and canonical not in SPATIAL_FORMULAS:
        raise ValueError(f"{name} is defined for planar densities only, not {d.name}")
    logger.debug(f"Evaluating {canonical} with {dict(params)}")
    return FORMULAS[canonical](d, params, rng or SeededRng(0))


def resolve_formula(name: str) -> str:
    """Registered name for ``name`` or one of its aliases.

    Raises:
        KeyError: If ``name`` is neither registered nor an alias.
    """
    if name in FORMULAS:
        return name
    if name in FORMULA_ALIASES:
        return FORMULA_ALIASES[name]
    raise KeyError(f"Unknown formula {name!r}. Available: {formula_names()}")


def formula_names() -> list[str]:
    """Registered names followed by ``alias=name`` pairs."""
    return sorted(FORMULAS) + [f"{a}={n}" for a, n in sorted(FORMULA_ALIASES.items())]
