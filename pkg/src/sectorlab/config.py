"""Configuration documents: parsing, validation and experiment presets.

Every document is validated completely before any work starts; problems
raise :class:`ConfigError` naming the offending key.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from sectorlab.densities import (
    BaseDensity,
    PiecewiseConstantGrid,
    StdGaussian2,
    UniformUnitCube,
    UniformUnitSquare,
)
from sectorlab.geometry import Disk, NormKind, Plane, Rectangle, Region
from sectorlab.io import load_data
from sectorlab.theory import FixedK, GrowingK, KnSchedule, RadiusRegime

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_ANGLE_RE = re.compile(r"^\s*(?P<c>\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(?P<d>\d+(?:\.\d*)?))?\s*$")
_SCALE_RE = re.compile(r"^\s*(?P<c>\d+(?:\.\d*)?)\s*/\s*alpha\s*$")
_U64_MAX = 2**64 - 1


class ConfigError(ValueError):
    """A configuration document failed validation."""


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


def parse_angle(value: Any, key: str = "alpha") -> float:
    """Radians from a number or an exact string such as ``"pi"``, ``"3pi/2"`` or ``"2pi"``."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected an angle, got {value!r}")
    if isinstance(value, int | float):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE_RE.match(value)
        if m:
            c = float(m.group("c")) if m.group("c") else 1.0
            d = float(m.group("d")) if m.group("d") else 1.0
            if d == 0.0:
                raise ConfigError(f"{key}: division by zero in {value!r}")
            return c * math.pi / d
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"{key}: cannot parse angle {value!r} (use radians or '[c]pi[/d]')")


def parse_scale(value: Any, alpha: float, key: str = "s") -> float:
    """The level-set scale ``s`` from a number or a string ``"c/alpha"``."""
    if isinstance(value, str):
        m = _SCALE_RE.match(value)
        if m:
            return float(m.group("c")) / alpha
    if isinstance(value, bool) or not isinstance(value, int | float | str):
        raise ConfigError(f"{key}: expected a number or 'c/alpha', got {value!r}")
    try:
        return float(value)
    except ValueError as e:
        raise ConfigError(f"{key}: cannot parse {value!r} (use a number or 'c/alpha')") from e


def _int(raw: Mapping[str, Any], key: str, default: int | None = None, minimum: int | None = None) -> int:
    value = raw.get(key, default)
    if value is None:
        raise ConfigError(f"{key}: required")
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key}: must be at least {minimum}, got {value}")
    return value


def _float(raw: Mapping[str, Any], key: str, default: float | None = None) -> float:
    value = raw.get(key, default)
    if value is None:
        raise ConfigError(f"{key}: required")
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {value!r}")
    return float(value)


def _seed(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not (0 <= value <= _U64_MAX):
        raise ConfigError(f"seed: expected an unsigned 64-bit integer, got {value!r}")
    return value


def _check_keys(raw: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed: {sorted(allowed)}")


def _alpha(raw: Mapping[str, Any]) -> float:
    alpha = parse_angle(raw.get("alpha", math.pi))
    if not (0.0 < alpha <= 2.0 * math.pi + 1e-15):
        raise ConfigError(f"alpha: must lie in (0, 2pi], got {alpha}")
    return min(alpha, 2.0 * math.pi)


# ---------------------------------------------------------------------------
# Densities, regimes and regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensitySpec:
    """Declarative density description; ``build`` returns the model."""

    kind: str
    origin: tuple[float, float] = (0.0, 0.0)
    cell_size: float = 1.0
    cell_values: tuple[tuple[str, ...], ...] = ()

    @classmethod
    def parse(cls, raw: Any) -> DensitySpec:
        if isinstance(raw, str):
            raw = {"kind": raw}
        if not isinstance(raw, Mapping):
            raise ConfigError(f"density: expected a name or an object, got {raw!r}")
        _check_keys(raw, {"kind", "origin", "cell_size", "cell_values"}, "density")
        kind = raw.get("kind")
        if kind not in ("uniform", "gaussian", "grid", "uniform-cube"):
            raise ConfigError(
                f"density.kind: unknown density {kind!r}; expected uniform, gaussian, grid or uniform-cube"
            )
        if kind != "grid":
            return cls(kind)
        origin = raw.get("origin", [0.0, 0.0])
        if not (isinstance(origin, list | tuple) and len(origin) == 2):
            raise ConfigError(f"density.origin: expected [x, y], got {origin!r}")
        values = raw.get("cell_values")
        if not isinstance(values, list) or not values or not all(isinstance(r, list) for r in values):
            raise ConfigError("density.cell_values: expected a non-empty list of rows")
        spec = cls(
            kind,
            (float(origin[0]), float(origin[1])),
            _float(raw, "cell_size"),
            tuple(tuple(str(v) for v in row) for row in values),
        )
        spec.build()
        return spec

    def build(self) -> BaseDensity:
        if self.kind == "uniform":
            return UniformUnitSquare()
        if self.kind == "gaussian":
            return StdGaussian2()
        if self.kind == "uniform-cube":
            return UniformUnitCube()
        try:
            return PiecewiseConstantGrid(self.origin, self.cell_size, self.cell_values)
        except ValueError as e:
            raise ConfigError(f"density: {e}") from e

    def to_dict(self) -> dict[str, Any]:
        if self.kind != "grid":
            return {"kind": self.kind}
        return {
            "kind": self.kind,
            "origin": list(self.origin),
            "cell_size": self.cell_size,
            "cell_values": [list(row) for row in self.cell_values],
        }


@dataclass(frozen=True)
class RegimeSpec:
    """Radius regime without its ``t``: fixed ``k``, or ``s`` with a ``k_n`` rule."""

    kind: str
    k: int = 0
    s: float | None = None
    gamma: float | None = None
    kn: int | None = None

    @classmethod
    def parse(cls, raw: Any, alpha: float) -> RegimeSpec:
        if not isinstance(raw, Mapping):
            raise ConfigError(f"regime: expected an object, got {raw!r}")
        _check_keys(raw, {"kind", "k", "s", "gamma", "kn"}, "regime")
        kind = raw.get("kind", "fixed-k")
        if kind == "fixed-k":
            return cls(kind, k=_int(raw, "k", 0, minimum=0))
        if kind != "growing-k":
            raise ConfigError(f"regime.kind: expected 'fixed-k' or 'growing-k', got {kind!r}")
        if "s" not in raw:
            raise ConfigError("regime.s: required for the growing-k regime")
        s = parse_scale(raw["s"], alpha)
        if not (s > 0.0):
            raise ConfigError(f"regime.s: must be positive, got {s}")
        if ("gamma" in raw) == ("kn" in raw):
            raise ConfigError("regime: give exactly one of 'gamma' or 'kn' for the growing-k regime")
        if "gamma" in raw:
            gamma = _float(raw, "gamma")
            try:
                KnSchedule(gamma)
            except ValueError as e:
                raise ConfigError(f"regime.gamma: {e}") from e
            return cls(kind, s=s, gamma=gamma)
        return cls(kind, s=s, kn=_int(raw, "kn", minimum=1))

    @property
    def is_fixed(self) -> bool:
        return self.kind == "fixed-k"

    def threshold(self, n: int) -> int:
        if self.is_fixed:
            return self.k
        if self.kn is not None:
            return self.kn
        return KnSchedule(float(self.gamma)).kn(max(n, 1))

    def at(self, n: int, t: float) -> RadiusRegime:
        """The concrete regime for size ``n`` and parameter ``t``."""
        try:
            if self.is_fixed:
                return FixedK(self.k, t)
            return GrowingK(float(self.s), t, self.threshold(n))
        except ValueError as e:
            raise ConfigError(f"regime: {e}") from e

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}


def parse_region(raw: Any) -> Region:
    """A region descriptor: plane, rectangle ``[x0, x1) x [y0, y1)`` or disk."""
    if raw is None:
        return Plane()
    if not isinstance(raw, Mapping):
        raise ConfigError(f"region: expected an object, got {raw!r}")
    kind = raw.get("kind", "plane")
    try:
        if kind == "plane":
            _check_keys(raw, {"kind"}, "region")
            return Plane()
        if kind == "rectangle":
            _check_keys(raw, {"kind", "x0", "x1", "y0", "y1"}, "region")
            return Rectangle(*(_float(raw, key) for key in ("x0", "x1", "y0", "y1")))
        if kind == "disk":
            _check_keys(raw, {"kind", "cx", "cy", "radius"}, "region")
            return Disk(_float(raw, "cx"), _float(raw, "cy"), _float(raw, "radius"))
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"region: {e}") from e
    raise ConfigError(f"region.kind: expected plane, rectangle or disk, got {kind!r}")


def region_to_dict(region: Region) -> dict[str, Any]:
    if isinstance(region, Rectangle):
        return {"kind": "rectangle", "x0": region.x0, "x1": region.x1, "y0": region.y0, "y1": region.y1}
    if isinstance(region, Disk):
        return {"kind": "disk", "cx": region.cx, "cy": region.cy, "radius": region.radius}
    return {"kind": "plane"}


def parse_norm(raw: Any) -> NormKind:
    if raw is None or raw in ("l2", "L2", 2):
        return NormKind.l2()
    if raw in ("linf", "Linf", "inf"):
        return NormKind.linf()
    if isinstance(raw, int | float) and not isinstance(raw, bool):
        try:
            return NormKind.lp(float(raw))
        except ValueError as e:
            raise ConfigError(f"norm: {e}") from e
    raise ConfigError(f"norm: expected 'l2', 'linf' or a number p >= 1, got {raw!r}")


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenerateConfig:
    """Parameters of a single digraph generation."""

    density: DensitySpec
    n: int
    alpha: float
    regime: RegimeSpec
    t: float
    seed: int = 0
    norm: NormKind = field(default_factory=NormKind.l2)
    method: str = "grid"
    write_arcs: bool = False
    threads: int = 1

    _KEYS = frozenset(
        {"density", "n", "alpha", "regime", "t", "seed", "norm", "method", "write_arcs", "threads"}
    )

    @classmethod
    def parse(cls, raw: Mapping[str, Any]) -> GenerateConfig:
        if not isinstance(raw, Mapping):
            raise ConfigError("generate config must be a JSON object")
        _check_keys(raw, set(cls._KEYS), "generate")
        alpha = _alpha(raw)
        density = DensitySpec.parse(raw.get("density", "uniform"))
        method = raw.get("method", "grid")
        if method not in ("grid", "brute"):
            raise ConfigError(f"method: expected 'grid' or 'brute', got {method!r}")
        write_arcs = raw.get("write_arcs", False)
        if not isinstance(write_arcs, bool):
            raise ConfigError(f"write_arcs: expected true or false, got {write_arcs!r}")
        cfg = cls(
            density=density,
            n=_int(raw, "n", minimum=0),
            alpha=alpha,
            regime=RegimeSpec.parse(raw.get("regime", {"kind": "fixed-k"}), alpha),
            t=_float(raw, "t"),
            seed=_seed(raw.get("seed", 0)),
            norm=parse_norm(raw.get("norm")),
            method=method,
            write_arcs=write_arcs,
            threads=_int(raw, "threads", 1, minimum=1),
        )
        if density.kind == "uniform-cube" and not cfg.norm.is_euclidean:
            raise ConfigError("norm: the spherical sector model uses the Euclidean norm only")
        if cfg.regime.is_fixed and not (cfg.t > 0.0):
            raise ConfigError(f"t: must be positive in the fixed-k regime, got {cfg.t}")
        if cfg.density.kind == "uniform-cube" and not (cfg.t > 0.0):
            raise ConfigError(f"t: must be positive for the spherical sector model, got {cfg.t}")
        if not cfg.regime.is_fixed:
            n = max(cfg.n, 1)
            try:
                cfg.regime.at(n, cfg.t).radius(n)
            except ValueError as e:
                raise ConfigError(f"t: {e}") from e
        return cfg

    def with_overrides(self, seed: int | None = None, threads: int | None = None) -> GenerateConfig:
        return replace(
            self,
            seed=self.seed if seed is None else _seed(seed),
            threads=self.threads if threads is None else max(1, threads),
        )

    def to_dict(self) -> dict[str, Any]:
        """Echo without ``threads``."""
        return {
            "density": self.density.to_dict(),
            "n": self.n,
            "alpha": self.alpha,
            "regime": self.regime.to_dict(),
            "t": self.t,
            "seed": self.seed,
            "norm": self.norm.tag,
            "method": self.method,
            "write_arcs": self.write_arcs,
        }


# Acceptance-scale defaults for each experiment preset.
PRESETS: dict[str, dict[str, Any]] = {
    "mean": {
        "density": "uniform",
        "alpha": "pi",
        "regime": {"kind": "fixed-k", "k": 3},
        "t_list": [2.0],
        "n": 50_000,
        "replicates": 200,
        "kind": "both",
        "bias_allowance": 0.01,
    },
    "mean-growing": {
        "density": "uniform",
        "alpha": "pi",
        "regime": {"kind": "growing-k", "s": "2/alpha", "gamma": 0.3},
        "t_list": [-1.0, 0.0, 1.0],
        "n": 100_000,
        "replicates": 20,
        "kind": "both",
        "growing_tolerance": 0.03,
    },
    "degree-dist": {
        "density": "uniform",
        "alpha": "pi",
        "regime": {"kind": "fixed-k", "k": 0},
        "t_list": [2.0],
        "n": 20_000,
        "replicates": 10,
        "kind": "both",
        "k_max": 20,
        "tv_tolerance": 0.02,
    },
    "clt-fixed": {
        "density": "uniform",
        "alpha": "pi",
        "regime": {"kind": "fixed-k", "k": 2},
        "t_list": [1.0, 2.0, 4.0],
        "n": 20_000,
        "replicates": 2000,
        "kind": "out",
        "ks_tolerance": 0.05,
    },
    "clt-growing": {
        "density": "uniform",
        "alpha": "pi",
        "regime": {"kind": "growing-k", "s": "2/alpha", "gamma": 0.3},
        "t_list": [0.0],
        "n": 100_000,
        "replicates": 1000,
        "kind": "in",
        "poissonized": "coupled",
        "ks_tolerance": 0.06,
        "relative_tolerance": 0.25,
    },
    "depoisson": {
        "density": "uniform",
        "alpha": "pi",
        "regime": {"kind": "fixed-k", "k": 1},
        "t_list": [2.0],
        "n": 20_000,
        "replicates": 5000,
        "kind": "out",
        "poissonized": "coupled",
        "relative_tolerance": 0.2,
    },
    "concentration": {
        "density": "uniform",
        "alpha": "pi",
        "regime": {"kind": "fixed-k", "k": 1},
        "t_list": [2.0],
        "n": 10_000,
        "replicates": 200,
        "kind": "both",
        "epsilon": 0.05,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A replicate experiment and the tolerances of its criteria."""

    experiment: str
    density: DensitySpec
    alpha: float
    regime: RegimeSpec
    n: int
    replicates: int
    t_list: tuple[float, ...]
    region: Region = field(default_factory=Plane)
    seed: int = 0
    poissonized: str = "none"
    kind: str = "both"
    threads: int = 1
    k_max: int = 20
    epsilon: float = 0.05
    trials: int = 4000
    se_multiplier: float = 3.0
    bias_allowance: float = 0.01
    growing_tolerance: float = 0.03
    tv_tolerance: float = 0.02
    p0_tolerance: float = 0.02
    ks_tolerance: float = 0.05
    relative_tolerance: float = 0.25

    _KEYS = frozenset(
        {
            "experiment", "density", "alpha", "regime", "n", "replicates", "t_list", "region",
            "seed", "poissonized", "kind", "threads", "k_max", "epsilon", "trials",
            "se_multiplier", "bias_allowance", "growing_tolerance", "tv_tolerance",
            "p0_tolerance", "ks_tolerance", "relative_tolerance",
        }
    )

    @classmethod
    def parse(cls, raw: Mapping[str, Any], preset: str | None = None) -> ExperimentConfig:
        """Merge ``raw`` over the preset's defaults and validate the result.

        The preset is ``preset`` if given, otherwise ``raw["experiment"]``.
        """
        if not isinstance(raw, Mapping):
            raise ConfigError("experiment config must be a JSON object")
        name = preset or raw.get("experiment")
        if name is None:
            raise ConfigError("experiment: required (or pass --preset)")
        if name not in PRESETS:
            raise ConfigError(f"experiment: unknown preset {name!r}; available: {sorted(PRESETS)}")
        merged = {**PRESETS[name], **raw, "experiment": name}
        _check_keys(merged, set(cls._KEYS), "experiment")

        alpha = _alpha(merged)
        t_list = merged.get("t_list")
        if not isinstance(t_list, list | tuple) or not t_list:
            raise ConfigError("t_list: expected a non-empty list of numbers")
        ts = tuple(_float({"t": t}, "t") for t in t_list)
        poissonized = merged.get("poissonized", "none")
        if poissonized not in ("none", "coupled"):
            raise ConfigError(f"poissonized: expected 'none' or 'coupled', got {poissonized!r}")
        kind = merged.get("kind", "both")
        if kind not in ("out", "in", "both"):
            raise ConfigError(f"kind: expected 'out', 'in' or 'both', got {kind!r}")

        cfg = cls(
            experiment=name,
            density=DensitySpec.parse(merged.get("density", "uniform")),
            alpha=alpha,
            regime=RegimeSpec.parse(merged.get("regime", {"kind": "fixed-k"}), alpha),
            n=_int(merged, "n", minimum=1),
            replicates=_int(merged, "replicates", minimum=1),
            t_list=ts,
            region=parse_region(merged.get("region")),
            seed=_seed(merged.get("seed", 0)),
            poissonized=poissonized,
            kind=kind,
            threads=_int(merged, "threads", 1, minimum=1),
            k_max=_int(merged, "k_max", 20, minimum=0),
            epsilon=_float(merged, "epsilon", 0.05),
            trials=_int(merged, "trials", 4000, minimum=1),
            se_multiplier=_float(merged, "se_multiplier", 3.0),
            bias_allowance=_float(merged, "bias_allowance", 0.01),
            growing_tolerance=_float(merged, "growing_tolerance", 0.03),
            tv_tolerance=_float(merged, "tv_tolerance", 0.02),
            p0_tolerance=_float(merged, "p0_tolerance", 0.02),
            ks_tolerance=_float(merged, "ks_tolerance", 0.05),
            relative_tolerance=_float(merged, "relative_tolerance", 0.25),
        )
        if not (cfg.epsilon > 0.0):
            raise ConfigError(f"epsilon: must be positive, got {cfg.epsilon}")
        if cfg.density.kind == "uniform-cube" and not isinstance(cfg.region, Plane):
            raise ConfigError("region: the spherical sector model supports the whole space only")
        for t in cfg.t_list:
            regime = cfg.regime.at(cfg.n, t)
            if isinstance(regime, GrowingK):
                try:
                    regime.radius(cfg.n)
                except ValueError as e:
                    raise ConfigError(f"t_list: {e}") from e
        return cfg

    @property
    def kinds(self) -> tuple[str, ...]:
        return ("out", "in") if self.kind == "both" else (self.kind,)

    @property
    def coupled(self) -> bool:
        return self.poissonized == "coupled"

    def with_overrides(self, seed: int | None = None, threads: int | None = None) -> ExperimentConfig:
        return replace(
            self,
            seed=self.seed if seed is None else _seed(seed),
            threads=self.threads if threads is None else max(1, threads),
        )

    def to_dict(self) -> dict[str, Any]:
        """Echo of the validated configuration (``threads`` is left out: it never changes results)."""
        return {
            "experiment": self.experiment,
            "density": self.density.to_dict(),
            "alpha": self.alpha,
            "regime": self.regime.to_dict(),
            "n": self.n,
            "replicates": self.replicates,
            "t_list": list(self.t_list),
            "region": region_to_dict(self.region),
            "seed": self.seed,
            "poissonized": self.poissonized,
            "kind": self.kind,
            "k_max": self.k_max,
            "epsilon": self.epsilon,
            "trials": self.trials,
            "se_multiplier": self.se_multiplier,
            "bias_allowance": self.bias_allowance,
            "growing_tolerance": self.growing_tolerance,
            "tv_tolerance": self.tv_tolerance,
            "p0_tolerance": self.p0_tolerance,
            "ks_tolerance": self.ks_tolerance,
            "relative_tolerance": self.relative_tolerance,
        }


@dataclass(frozen=True)
class TheoryRequest:
    """One formula evaluation: its name, the density and the parsed parameters."""

    formula: str
    density: DensitySpec
    params: Mapping[str, Any]
    seed: int = 0

    _RESERVED = frozenset({"formula", "density", "params", "seed"})

    @classmethod
    def parse(cls, raw: Mapping[str, Any], default_density: Any = "uniform") -> TheoryRequest:
        if not isinstance(raw, Mapping):
            raise ConfigError(f"theory request must be an object, got {raw!r}")
        formula = raw.get("formula")
        if not isinstance(formula, str):
            raise ConfigError("formula: required")
        params = dict(raw.get("params", {}))
        params.update({k: v for k, v in raw.items() if k not in cls._RESERVED})
        return cls(
            formula,
            DensitySpec.parse(raw.get("density", default_density)),
            _theory_params(params),
            _seed(raw.get("seed", 0)),
        )

    def to_echo(self) -> dict[str, Any]:
        """JSON-friendly view of the parameters."""
        echo: dict[str, Any] = {"density": self.density.to_dict()}
        for key, value in self.params.items():
            if isinstance(value, Plane | Rectangle | Disk):
                echo[key] = region_to_dict(value)
            elif isinstance(value, tuple):
                echo[key] = list(value)
            else:
                echo[key] = value
        return echo


def _theory_params(params: dict[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    alpha = parse_angle(params["alpha"]) if "alpha" in params else None
    for key, value in params.items():
        if key == "alpha":
            out[key] = alpha
        elif key == "s":
            if alpha is not None:
                out[key] = parse_scale(value, alpha)
            elif isinstance(value, str) and (m := _SCALE_RE.match(value)):
                # level sets depend on s alpha only
                out["s_alpha"] = float(m.group("c"))
            else:
                out[key] = parse_scale(value, 1.0)
        elif key in ("y", "inclination"):
            out["y"] = parse_angle(value, key)
        elif key == "region":
            out[key] = parse_region(value)
        elif key == "x":
            if not isinstance(value, list | tuple) or len(value) not in (2, 3):
                raise ConfigError(f"x: expected a point [x, y] or [x, y, z], got {value!r}")
            out[key] = tuple(float(v) for v in value)
        else:
            out[key] = value
    return out


def parse_theory_document(raw: Any) -> list[TheoryRequest]:
    """A single request, a list of requests, or ``{"density": ..., "requests": [...]}``."""
    if isinstance(raw, list):
        return [TheoryRequest.parse(item) for item in raw]
    if isinstance(raw, Mapping) and "requests" in raw:
        density = raw.get("density", "uniform")
        items = raw["requests"]
        if not isinstance(items, list) or not items:
            raise ConfigError("requests: expected a non-empty list")
        return [TheoryRequest.parse(item, density) for item in items]
    if isinstance(raw, Mapping):
        return [TheoryRequest.parse(raw)]
    raise ConfigError("theory config must be an object or a list of objects")


def load_config(path: Path) -> Any:
    """Read a JSON configuration document."""
    try:
        return load_data(path)
    except ValueError as e:
        raise ConfigError(str(e)) from e
