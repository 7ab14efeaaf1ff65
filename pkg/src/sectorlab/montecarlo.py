"""Seeded replicate experiments comparing simulated degree statistics with their limits.

Replicate ``i`` always draws from stream ``(seed, i)`` and aggregation folds
records in replicate order, so a report does not depend on the thread count.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.stats import kstest

from sectorlab.config import PRESETS, SCHEMA_VERSION, ConfigError, ExperimentConfig
from sectorlab.densities import BaseDensity
from sectorlab.digraph import (
    GeometricDigraph,
    build_digraph,
    build_digraph_3d,
    count_deg_at_least,
    region_mask,
)
from sectorlab.geometry import Plane, spherical_sector_solid_fraction
from sectorlab.pointprocess import (
    MarkedPointCloud,
    SeededRng,
    level_set_mass,
    normal_pdf,
    poisson_pmf,
    sample_coupled,
    sample_marked,
)
from sectorlab.theory import (
    degree_distribution,
    h_correction,
    limit_cov_growing,
    limit_mean_fixed_k,
    limit_mean_growing,
    radius_3d,
    variance_fixed_k,
    variance_growing,
)

logger = logging.getLogger(__name__)

Key = tuple[float, str]

# Theory-side Monte Carlo uses substreams of stream 0 so it never collides
# with replicate streams (substream 0).
_THEORY_SUBSTREAM = 1


# ---------------------------------------------------------------------------
# Records and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplicateRecord:
    """Statistics of one replicate: ``xi`` per ``(t, kind)``, ``eta`` histograms, ``N``."""

    replicate: int
    n: int
    N: int | None
    xi: dict[Key, int]
    xi_poisson: dict[Key, int] | None
    eta: dict[Key, NDArray[np.int64]]
    wall_time: float = field(default=0.0, compare=False)

    def csv_rows(self) -> Iterator[tuple[Any, ...]]:
        for (t, kind), value in self.xi.items():
            poisson = None if self.xi_poisson is None else self.xi_poisson[(t, kind)]
            yield (self.replicate, t, kind, value, poisson, self.N)


REPLICATE_HEADER = ("replicate", "t", "kind", "xi", "xi_poisson", "N")


@dataclass(frozen=True)
class Criterion:
    """One comparison of an empirical quantity with its theoretical counterpart.

    ``relation="abs"`` passes when ``|empirical - theory| <= tolerance``;
    ``relation="le"`` passes when ``empirical <= theory``. Criteria with
    ``enforced=False`` are informational and never fail a report.
    """

    name: str
    t: float | None
    kind: str | None
    empirical: float | None
    theory: float | None
    std_error: float | None
    tolerance: float
    passed: bool
    enforced: bool = True
    relation: str = "abs"

    @property
    def discrepancy(self) -> float | None:
        if self.empirical is None or self.theory is None:
            return None
        return abs(self.empirical - self.theory)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "t": self.t,
            "kind": self.kind,
            "empirical": self.empirical,
            "theory": self.theory,
            "std_error": self.std_error,
            "discrepancy": self.discrepancy,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "passed": self.passed,
            "enforced": self.enforced,
        }


def check(
    name: str,
    t: float | None,
    kind: str | None,
    empirical: float | None,
    theory: float | None,
    std_error: float | None,
    tolerance: float,
    *,
    enforced: bool = True,
    relation: str = "abs",
) -> Criterion:
    """Build a criterion; unavailable values are never enforced."""
    if empirical is None or theory is None or not math.isfinite(empirical):
        return Criterion(name, t, kind, empirical, theory, std_error, tolerance, False, False, relation)
    if relation == "le":
        passed = empirical <= theory
    else:
        passed = abs(empirical - theory) <= tolerance
    return Criterion(name, t, kind, empirical, theory, std_error, tolerance, passed, enforced, relation)


@dataclass(frozen=True)
class ExperimentReport:
    experiment: str
    config: dict[str, Any]
    criteria: tuple[Criterion, ...]
    metrics: dict[str, Any]
    replicates: tuple[ReplicateRecord, ...] = field(default=(), repr=False, compare=False)
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria if c.enforced)

    @property
    def failures(self) -> list[Criterion]:
        return [c for c in self.criteria if c.enforced and not c.passed]

    def to_dict(self, tool_version: str) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "tool_version": tool_version,
            "experiment": self.experiment,
            "config": self.config,
            "passed": self.passed,
            "criteria": [c.to_dict() for c in self.criteria],
            "metrics": self.metrics,
        }

    def replicate_rows(self) -> Iterator[tuple[Any, ...]]:
        for record in self.replicates:
            yield from record.csv_rows()


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def radius_and_threshold(cfg: ExperimentConfig, d: BaseDensity, t: float) -> tuple[float, int]:
    n = cfg.n
    if d.dimension == 3:
        return radius_3d(t, n), cfg.regime.threshold(n)
    regime = cfg.regime.at(n, t)
    return regime.radius(n), regime.threshold(n)


def _digraph(d: BaseDensity, cloud: MarkedPointCloud, alpha: float, r: float) -> GeometricDigraph:
    if d.dimension == 3:
        return build_digraph_3d(cloud, alpha, r, keep_arcs=False)
    return build_digraph(cloud, alpha, r, keep_arcs=False)


def run_replicate(cfg: ExperimentConfig, d: BaseDensity, replicate: int) -> ReplicateRecord:
    """Simulate one replicate on stream ``(cfg.seed, replicate)``."""
    started = time.perf_counter()
    rng = SeededRng(cfg.seed, replicate)
    if cfg.coupled:
        sample = sample_coupled(d, cfg.n, rng)
        cloud, poisson_cloud, big_n = sample.binomial, sample.poisson, sample.N
    else:
        cloud, poisson_cloud, big_n = sample_marked(d, cfg.n, rng), None, None
    mask = region_mask(cloud, cfg.region)

    xi: dict[Key, int] = {}
    xi_poisson: dict[Key, int] | None = {} if poisson_cloud is not None else None
    eta: dict[Key, NDArray[np.int64]] = {}
    for t in cfg.t_list:
        r, k = radius_and_threshold(cfg, d, t)
        g = _digraph(d, cloud, cfg.alpha, r)
        for kind in cfg.kinds:
            xi[(t, kind)] = count_deg_at_least(g, cloud, k, cfg.region, kind)  # type: ignore[arg-type]
            eta[(t, kind)] = np.bincount(g.degrees(kind)[mask], minlength=1)  # type: ignore[arg-type]
        if poisson_cloud is not None and xi_poisson is not None:
            gp = _digraph(d, poisson_cloud, cfg.alpha, r)
            for kind in cfg.kinds:
                xi_poisson[(t, kind)] = count_deg_at_least(gp, poisson_cloud, k, cfg.region, kind)  # type: ignore[arg-type]
    return ReplicateRecord(
        replicate, cfg.n, big_n, xi, xi_poisson, eta, time.perf_counter() - started
    )


def simulate(cfg: ExperimentConfig, d: BaseDensity | None = None) -> tuple[ReplicateRecord, ...]:
    """Run all replicates, concurrently when ``cfg.threads > 1``, returned in replicate order."""
    d = d if d is not None else cfg.density.build()
    work = partial(run_replicate, cfg, d)
    ids = range(cfg.replicates)
    started = time.perf_counter()
    if cfg.threads > 1 and cfg.replicates > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            records = tuple(pool.map(work, ids))
    else:
        records = tuple(work(i) for i in ids)
    logger.info(
        f"Simulated {cfg.replicates} replicate(s) of n={cfg.n} in {time.perf_counter() - started:.2f}s"
    )
    return records


# ---------------------------------------------------------------------------
# Aggregation helpers
# ---------------------------------------------------------------------------


def _keys(cfg: ExperimentConfig) -> Iterator[Key]:
    for t in cfg.t_list:
        for kind in cfg.kinds:
            yield (t, kind)


def _values(records: Iterable[ReplicateRecord], key: Key, poisson: bool = False) -> NDArray[np.float64]:
    if poisson:
        return np.array([rec.xi_poisson[key] for rec in records if rec.xi_poisson is not None], dtype=np.float64)
    return np.array([rec.xi[key] for rec in records], dtype=np.float64)


def mean_and_se(values: NDArray[np.float64]) -> tuple[float, float | None]:
    """Sample mean and its standard error (``None`` below two replicates)."""
    mean = float(values.mean())
    if len(values) < 2:
        return mean, None
    return mean, float(values.std(ddof=1) / math.sqrt(len(values)))


def _variance(values: NDArray[np.float64]) -> float | None:
    return float(values.var(ddof=1)) if len(values) >= 2 else None


def standardize(values: NDArray[np.float64]) -> NDArray[np.float64] | None:
    """``(v - mean) / sd`` with empirical moments; ``None`` if degenerate."""
    if len(values) < 3:
        return None
    sd = float(values.std(ddof=1))
    if sd == 0.0:
        return None
    return (values - values.mean()) / sd


def ks_statistic(values: NDArray[np.float64]) -> float | None:
    """Kolmogorov-Smirnov distance of the standardized values to ``Phi``."""
    z = standardize(values)
    if z is None:
        return None
    return float(kstest(z, "norm").statistic)


def correlation(a: NDArray[np.float64], b: NDArray[np.float64]) -> float | None:
    if len(a) < 2 or float(a.std()) == 0.0 or float(b.std()) == 0.0:
        return None
    return float(np.corrcoef(a, b)[0, 1])


def total_variation(
    empirical: NDArray[np.float64],
    theory: NDArray[np.float64],
    empirical_tail: float = 0.0,
    theory_tail: float = 0.0,
) -> float:
    """TV distance over ``0..K`` plus the lumped remainder beyond ``K``."""
    head = float(np.abs(empirical - theory).sum())
    return 0.5 * (head + abs(empirical_tail - theory_tail))


def azuma_bound(epsilon: float, n: int, kn: int) -> float:
    """``2 exp(-epsilon^2 n / (648 k_n^2))``."""
    kn = max(kn, 1)
    return 2.0 * math.exp(-epsilon * epsilon * n / (648.0 * kn * kn))


def _theory_rng(cfg: ExperimentConfig, index: int) -> SeededRng:
    return SeededRng(cfg.seed, 0, _THEORY_SUBSTREAM + index)


def _scale(cfg: ExperimentConfig) -> float:
    """``n`` in the fixed-k regime, ``n k_n`` in the growing-k regime."""
    return float(cfg.n) if cfg.regime.is_fixed else float(cfg.n * cfg.regime.threshold(cfg.n))


def _report(
    cfg: ExperimentConfig,
    criteria: list[Criterion],
    metrics: dict[str, Any],
    records: tuple[ReplicateRecord, ...],
) -> ExperimentReport:
    report = ExperimentReport(cfg.experiment, cfg.to_dict(), tuple(criteria), metrics, records)
    for c in report.failures:
        logger.warning(
            f"{cfg.experiment}: criterion {c.name} (t={c.t}, kind={c.kind}) failed: "
            f"empirical={c.empirical} theory={c.theory} tolerance={c.tolerance}"
        )
    return report


def _azuma_criteria(cfg: ExperimentConfig, records: tuple[ReplicateRecord, ...], epsilon: float) -> list[Criterion]:
    rows = []
    kn = cfg.regime.threshold(cfg.n)
    bound = azuma_bound(epsilon, cfg.n, kn)
    for key in _keys(cfg):
        values = _values(records, key)
        freq = float(np.mean(np.abs(values - values.mean()) > epsilon * cfg.n))
        se = math.sqrt(freq * (1.0 - freq) / len(values))
        rows.append(check("azuma", key[0], key[1], freq, bound, se, 0.0, relation="le"))
    return rows


def _correlations(cfg: ExperimentConfig, records: tuple[ReplicateRecord, ...]) -> list[dict[str, Any]]:
    rows = []
    for kind in cfg.kinds:
        for i, t in enumerate(cfg.t_list):
            for u in cfg.t_list[i:]:
                rows.append(
                    {
                        "kind": kind,
                        "t": t,
                        "u": u,
                        "correlation": correlation(_values(records, (t, kind)), _values(records, (u, kind))),
                    }
                )
    return rows


def _depoisson_rows(
    cfg: ExperimentConfig,
    records: tuple[ReplicateRecord, ...],
    theory: Callable[[float], float],
    enforced_kinds: tuple[str, ...],
) -> list[Criterion]:
    rows = []
    for t, kind in _keys(cfg):
        x = _values(records, (t, kind), poisson=True)
        y = _values(records, (t, kind))
        scale = _scale(cfg)
        target = theory(t)
        if len(x) < 2:
            rows.append(check("depoisson", t, kind, None, target, None, 0.0))
            continue
        w = (x - x.mean()) ** 2 - (y - y.mean()) ** 2
        diff = float(w.sum() / (len(w) - 1)) / scale
        se = float(w.std(ddof=1) / math.sqrt(len(w))) / scale
        rows.append(
            check(
                "depoisson",
                t,
                kind,
                diff,
                target,
                se,
                cfg.relative_tolerance * abs(target),
                enforced=kind in enforced_kinds,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def run_mean_convergence(
    cfg: ExperimentConfig, records: tuple[ReplicateRecord, ...] | None = None
) -> ExperimentReport:
    """Empirical ``E[xi] / n`` per ``t`` and kind against the limit mean."""
    d = cfg.density.build()
    records = records if records is not None else simulate(cfg, d)
    criteria: list[Criterion] = []
    for t, kind in _keys(cfg):
        mean, se = mean_and_se(_values(records, (t, kind)) / cfg.n)
        if cfg.regime.is_fixed:
            theory = limit_mean_fixed_k(d, cfg.alpha, t, cfg.regime.k, cfg.region)
            tolerance = cfg.bias_allowance + (cfg.se_multiplier * se if se is not None else 0.0)
        else:
            theory = limit_mean_growing(d, cfg.alpha, float(cfg.regime.s), t, cfg.region).value
            tolerance = cfg.growing_tolerance
        criteria.append(check("mean", t, kind, mean, theory, se, tolerance))
        if cfg.coupled:
            p_mean, p_se = mean_and_se(_values(records, (t, kind), poisson=True) / cfg.n)
            criteria.append(check("mean-poisson", t, kind, p_mean, theory, p_se, tolerance, enforced=False))
    return _report(cfg, criteria, {}, records)


def _degree_pmf(d: BaseDensity, cfg: ExperimentConfig, t: float, k_max: int) -> NDArray[np.float64]:
    if d.dimension == 3:
        lam = (4.0 * math.pi / 3.0) * spherical_sector_solid_fraction(cfg.alpha) * t
        return np.array([poisson_pmf(lam, k) for k in range(k_max + 1)])
    if isinstance(cfg.region, Plane):
        return np.array([degree_distribution(d, cfg.alpha, t, k) for k in range(k_max + 1)])
    half = 0.5 * cfg.alpha * t
    return np.array(
        [d.integrate_over(cfg.region, lambda v, k=k: poisson_pmf(half * v, k)) for k in range(k_max + 1)]
    )


def run_degree_distribution(
    cfg: ExperimentConfig,
    k_max: int | None = None,
    records: tuple[ReplicateRecord, ...] | None = None,
) -> ExperimentReport:
    """Pooled ``eta(k) / n`` against the limiting degree distribution, per kind."""
    k_max = cfg.k_max if k_max is None else k_max
    if cfg.alpha < math.pi:
        logger.warning(
            f"alpha={cfg.alpha:.6g} < pi: the degree-distribution limit is only proven for alpha >= pi"
        )
    d = cfg.density.build()
    records = records if records is not None else simulate(cfg, d)
    theory_total = 1.0 if isinstance(cfg.region, Plane) else d.region_mass(cfg.region)
    criteria: list[Criterion] = []
    table: list[dict[str, Any]] = []
    per_kind: dict[Key, tuple[NDArray[np.float64], NDArray[np.float64]]] = {}

    for t in cfg.t_list:
        pmf = _degree_pmf(d, cfg, t, k_max)
        for kind in cfg.kinds:
            per_rep = np.zeros((len(records), k_max + 1))
            for row, rec in enumerate(records):
                hist = rec.eta[(t, kind)][: k_max + 1]
                per_rep[row, : len(hist)] = hist / rec.n
            tails = np.array([rec.eta[(t, kind)][k_max + 1 :].sum() / rec.n for rec in records])
            pooled = per_rep.mean(axis=0)
            se = per_rep.std(axis=0, ddof=1) / math.sqrt(len(records)) if len(records) > 1 else None
            per_kind[(t, kind)] = (pooled, se if se is not None else np.zeros_like(pooled))

            theory_tail = max(theory_total - float(pmf.sum()), 0.0)
            tv = total_variation(pooled, pmf, float(tails.mean()), theory_tail)
            rep_tv = np.array(
                [total_variation(per_rep[i], pmf, float(tails[i]), theory_tail) for i in range(len(records))]
            )
            _, tv_se = mean_and_se(rep_tv)
            criteria.append(check("tv", t, kind, tv, 0.0, tv_se, cfg.tv_tolerance))
            criteria.append(
                check(
                    "p0",
                    t,
                    kind,
                    float(pooled[0]),
                    float(pmf[0]),
                    None if se is None else float(se[0]),
                    cfg.p0_tolerance,
                )
            )
            for k in range(k_max + 1):
                table.append(
                    {
                        "t": t,
                        "kind": kind,
                        "k": k,
                        "empirical": float(pooled[k]),
                        "theory": float(pmf[k]),
                        "std_error": None if se is None else float(se[k]),
                    }
                )

        if ("out" in cfg.kinds and "in" in cfg.kinds) and len(records) > 1:
            out_p, out_se = per_kind[(t, "out")]
            in_p, in_se = per_kind[(t, "in")]
            pooled_se = np.sqrt(out_se**2 + in_se**2)
            live = pooled_se > 0.0
            zmax = float(np.max(np.abs(out_p - in_p)[live] / pooled_se[live])) if live.any() else 0.0
            criteria.append(check("out-in-zmax", t, None, zmax, 0.0, None, 2.0, enforced=False))

    return _report(cfg, criteria, {"distribution": table}, records)


def run_clt_fixed_k(
    cfg: ExperimentConfig, records: tuple[ReplicateRecord, ...] | None = None
) -> ExperimentReport:
    """Shape of the fixed-k fluctuations: KS distance of standardized ``xi`` to ``Phi``."""
    if not cfg.regime.is_fixed:
        raise ConfigError("clt-fixed needs a fixed-k regime")
    if cfg.replicates < 500:
        logger.warning(f"clt-fixed with only {cfg.replicates} replicates; KS bands assume at least 500")
    d = cfg.density.build()
    records = records if records is not None else simulate(cfg, d)
    criteria: list[Criterion] = []
    variances: list[dict[str, Any]] = []
    for index, (t, kind) in enumerate(_keys(cfg)):
        values = _values(records, (t, kind))
        criteria.append(check("ks", t, kind, ks_statistic(values), 0.0, None, cfg.ks_tolerance))
        var = _variance(values)
        empirical = None if var is None else var / cfg.n
        theory = None
        if d.dimension == 2 and cfg.regime.k >= 1:
            theory = variance_fixed_k(
                d, cfg.alpha, t, t, cfg.regime.k, kind, cfg.trials, _theory_rng(cfg, index)  # type: ignore[arg-type]
            ).value
        variances.append({"t": t, "kind": kind, "empirical": empirical, "theory": theory})
        if theory is not None:
            criteria.append(
                check(
                    "variance",
                    t,
                    kind,
                    empirical,
                    theory,
                    None,
                    cfg.relative_tolerance * abs(theory),
                    enforced=False,
                )
            )
    criteria.extend(_azuma_criteria(cfg, records, cfg.epsilon))
    metrics = {"correlations": _correlations(cfg, records), "variances": variances}
    return _report(cfg, criteria, metrics, records)


def run_clt_growing(
    cfg: ExperimentConfig, records: tuple[ReplicateRecord, ...] | None = None
) -> ExperimentReport:
    """Growing-k fluctuations: KS shape plus the ``(n k_n)``-scaled variance."""
    if cfg.regime.is_fixed:
        raise ConfigError("clt-growing needs a growing-k regime")
    d = cfg.density.build()
    if d.dimension != 2:
        raise ConfigError("clt-growing supports planar densities only")
    s = float(cfg.regime.s)
    mass = level_set_mass(d, s, cfg.alpha, cfg.region).mass_on_L
    if mass == 0.0:
        raise ConfigError(
            f"clt-growing needs F(L_s ∩ A) > 0, but it is 0 for density {d.name!r}, "
            f"s={s:.6g}, alpha={cfg.alpha:.6g}"
        )
    records = records if records is not None else simulate(cfg, d)
    criteria: list[Criterion] = []
    for index, (t, kind) in enumerate(_keys(cfg)):
        values = _values(records, (t, kind))
        scale = _scale(cfg)
        criteria.append(check("ks", t, kind, ks_statistic(values), 0.0, None, cfg.ks_tolerance))
        rng = _theory_rng(cfg, index)
        var = _variance(values)
        theory = variance_growing(d, cfg.alpha, s, t, t, kind, cfg.trials, rng).value  # type: ignore[arg-type]
        criteria.append(
            check(
                "variance",
                t,
                kind,
                None if var is None else var / scale,
                theory,
                None,
                cfg.relative_tolerance * abs(theory),
                enforced=kind == "in",
            )
        )
        if cfg.coupled:
            p_var = _variance(_values(records, (t, kind), poisson=True))
            cov = limit_cov_growing(d, cfg.alpha, s, t, t, kind, None, cfg.trials, rng).value  # type: ignore[arg-type]
            criteria.append(
                check(
                    "variance-poisson",
                    t,
                    kind,
                    None if p_var is None else p_var / scale,
                    cov,
                    None,
                    cfg.relative_tolerance * abs(cov),
                    enforced=kind == "in",
                )
            )
    if cfg.coupled:
        full_mass = level_set_mass(d, s, cfg.alpha).mass_on_L
        criteria.extend(
            _depoisson_rows(cfg, records, lambda t: (normal_pdf(t) * full_mass) ** 2, ("in",))
        )
    criteria.extend(_azuma_criteria(cfg, records, cfg.epsilon))
    return _report(cfg, criteria, {"correlations": _correlations(cfg, records)}, records)


def run_depoisson(
    cfg: ExperimentConfig, records: tuple[ReplicateRecord, ...] | None = None
) -> ExperimentReport:
    """``Var xi' - Var xi`` (scaled) against ``h(t)^2`` or ``(phi(t) F(L_s))^2``."""
    if not cfg.coupled:
        raise ConfigError("depoisson needs poissonized = 'coupled'")
    d = cfg.density.build()
    if d.dimension != 2:
        raise ConfigError("depoisson supports planar densities only")
    if cfg.regime.is_fixed:
        k = cfg.regime.k
        if k < 1:
            raise ConfigError("depoisson needs k >= 1")

        def theory(t: float) -> float:
            return h_correction(d, cfg.alpha, t, k) ** 2
    else:
        full_mass = level_set_mass(d, float(cfg.regime.s), cfg.alpha).mass_on_L

        def theory(t: float) -> float:
            return (normal_pdf(t) * full_mass) ** 2

    records = records if records is not None else simulate(cfg, d)
    criteria = _depoisson_rows(cfg, records, theory, cfg.kinds)
    for t, kind in _keys(cfg):
        same = [rec for rec in records if rec.N == rec.n and rec.xi_poisson is not None]
        mismatches = sum(1 for rec in same if rec.xi_poisson[(t, kind)] != rec.xi[(t, kind)])  # type: ignore[index]
        criteria.append(check("coupling", t, kind, float(mismatches), 0.0, 0.0, 0.0))
    criteria.extend(_azuma_criteria(cfg, records, cfg.epsilon))
    return _report(cfg, criteria, {}, records)


def run_concentration(
    cfg: ExperimentConfig,
    epsilon: float | None = None,
    records: tuple[ReplicateRecord, ...] | None = None,
) -> ExperimentReport:
    """Frequency of ``|xi - mean| > epsilon n`` against the Azuma bound."""
    eps = cfg.epsilon if epsilon is None else epsilon
    if not (eps > 0.0):
        raise ValueError(f"epsilon must be positive, got {eps}")
    records = records if records is not None else simulate(cfg)
    criteria = _azuma_criteria(cfg, records, eps)
    metrics = {"epsilon": eps, "bound": azuma_bound(eps, cfg.n, cfg.regime.threshold(cfg.n))}
    return _report(cfg, criteria, metrics, records)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

Runner = Callable[[ExperimentConfig], ExperimentReport]


class ExperimentRegistry:
    """Registry of experiment runners by preset name."""

    def __init__(self) -> None:
        self._runners: dict[str, Runner] = {}
        self._register_default_runners()

    def _register_default_runners(self) -> None:
        self.register("mean", run_mean_convergence)
        self.register("mean-growing", run_mean_convergence)
        self.register("degree-dist", run_degree_distribution)
        self.register("clt-fixed", run_clt_fixed_k)
        self.register("clt-growing", run_clt_growing)
        self.register("depoisson", run_depoisson)
        self.register("concentration", run_concentration)

    def register(self, name: str, runner: Runner) -> None:
        self._runners[name] = runner
        logger.debug(f"Registered experiment runner: {name}")

    def __repr__(self) -> str:
        """Return a debug-friendly representation."""
        return f"ExperimentRegistry(runners=[{', '.join(sorted(self._runners))}])"

    def get_runner(self, name: str) -> Runner | None:
        return self._runners.get(name)

    def names(self) -> list[str]:
        return sorted(self._runners)

    def run(self, cfg: ExperimentConfig) -> ExperimentReport:
        runner = self.get_runner(cfg.experiment)
        if runner is None:
            raise ConfigError(f"Unknown experiment {cfg.experiment!r}. Available: {self.names()}")
        logger.info(f"Running experiment {cfg.experiment} (seed={cfg.seed}, threads={cfg.threads})")
        return runner(cfg)


_experiment_registry = ExperimentRegistry()


def register_experiment(name: str, defaults: dict[str, Any] | None = None) -> Callable[[Runner], Runner]:
    """Decorator registering a runner, optionally with preset defaults.

    Example:
        @register_experiment("mean-disk", defaults={**PRESETS["mean"], "region": {...}})
        def run_mean_disk(cfg):
            return run_mean_convergence(cfg)
    """

    def wrapper(runner: Runner) -> Runner:
        if defaults is not None:
            PRESETS[name] = dict(defaults)
        _experiment_registry.register(name, runner)
        return runner

    return wrapper


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return _experiment_registry.run(cfg)


def experiment_names() -> list[str]:
    return _experiment_registry.names()
