"""Command-line front end.

Exit codes: 0 pass, 1 criteria failed, 2 config or usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from sectorlab import __version__
from sectorlab.config import (
    SCHEMA_VERSION,
    ConfigError,
    ExperimentConfig,
    GenerateConfig,
    load_config,
    parse_theory_document,
)
from sectorlab.densities import BaseDensity
from sectorlab.digraph import GeometricDigraph, build_digraph, build_digraph_3d
from sectorlab.io import (
    format_value,
    jsonable,
    load_data,
    write_arcs_csv,
    write_csv,
    write_degrees_csv,
    write_json,
    write_points_csv,
)
from sectorlab.montecarlo import REPLICATE_HEADER, experiment_names, run_experiment
from sectorlab.pointprocess import MarkedPointCloud, SeededRng, sample_marked
from sectorlab.theory import FORMULA_ALIASES, FORMULAS, evaluate_formula, formula_names, radius_3d

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3

SUMMARY_HEADER = (
    "experiment",
    "t",
    "kind",
    "criterion",
    "empirical",
    "theory",
    "std_error",
    "tolerance",
    "passed",
    "enforced",
)


def _manifest(command: str, config: Any, seed: int | None, files: Sequence[str]) -> dict[str, Any]:
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "files": list(files),
    }


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def generation_radius(cfg: GenerateConfig, d: BaseDensity) -> float | None:
    """``r_n`` for the configured regime, ``None`` when ``n = 0``."""
    if cfg.n == 0:
        return None
    if d.dimension == 3:
        return radius_3d(cfg.t, cfg.n)
    return cfg.regime.at(cfg.n, cfg.t).radius(cfg.n)


def _generate_digraph(
    cfg: GenerateConfig, cloud: MarkedPointCloud, r: float | None
) -> GeometricDigraph:
    if r is None:
        empty = np.zeros(0, dtype=np.int64)
        arcs = np.zeros((0, 2), dtype=np.int64) if cfg.write_arcs else None
        return GeometricDigraph(0, cfg.alpha, 0.0, cfg.norm, empty, empty, arcs, cloud.dimension)
    if cloud.dimension == 3:
        return build_digraph_3d(
            cloud, cfg.alpha, r, cfg.method, keep_arcs=cfg.write_arcs, threads=cfg.threads  # type: ignore[arg-type]
        )
    return build_digraph(
        cloud, cfg.alpha, r, cfg.norm, cfg.method, keep_arcs=cfg.write_arcs, threads=cfg.threads  # type: ignore[arg-type]
    )


def cmd_generate(cfg: GenerateConfig, out: Path) -> int:
    """Sample one marked cloud, build its digraph and write CSVs plus a manifest."""
    d = cfg.density.build()
    cloud = sample_marked(d, cfg.n, SeededRng(cfg.seed))
    r = generation_radius(cfg, d)
    g = _generate_digraph(cfg, cloud, r)

    files = ["points.csv", "degrees.csv"]
    write_points_csv(out / "points.csv", cloud)
    write_degrees_csv(out / "degrees.csv", g)
    if cfg.write_arcs:
        write_arcs_csv(out / "arcs.csv", g)
        files.append("arcs.csv")
    manifest = _manifest("generate", cfg.to_dict(), cfg.seed, files)
    manifest["r_n"] = r
    manifest["arc_count"] = g.arc_count
    write_json(out / "manifest.json", manifest)
    logger.info(f"Generated n={cfg.n} digraph with {g.arc_count} arcs into {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# theory
# ---------------------------------------------------------------------------


def cmd_theory(raw: Any, out: Path | None, seed: int | None = None) -> int:
    """Evaluate each requested formula and emit one JSON record per request."""
    requests = parse_theory_document(raw)
    known = FORMULAS.keys() | FORMULA_ALIASES.keys()
    unknown = sorted({req.formula for req in requests if req.formula not in known})
    if unknown:
        raise ConfigError(f"unknown formula(s) {unknown}; available: {formula_names()}")

    records = []
    for req in requests:
        rng = SeededRng(req.seed if seed is None else seed)
        try:
            est = evaluate_formula(req.formula, req.density.build(), req.params, rng)
        except KeyError as e:
            raise ConfigError(f"{req.formula}: missing parameter {e}") from e
        except (TypeError, ValueError, NotImplementedError) as e:
            raise ConfigError(f"{req.formula}: {str(e) or type(e).__name__}") from e
        record: dict[str, Any] = {
            "formula": req.formula,
            "params": req.to_echo(),
            "value": est.value,
            "std_error": est.std_error,
        }
        if est.components:
            record["components"] = est.components
        records.append(record)

    for record in records:
        sys.stdout.write(json.dumps(jsonable(record), allow_nan=False) + "\n")
    if out is not None:
        write_json(out / "theory.json", records)
        write_json(out / "manifest.json", _manifest("theory", [r["params"] for r in records], seed, ["theory.json"]))
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


def cmd_experiment(cfg: ExperimentConfig, out: Path) -> int:
    """Run the named experiment; exit 1 if any enforced criterion fails."""
    report = run_experiment(cfg)
    write_csv(out / "replicates.csv", REPLICATE_HEADER, report.replicate_rows())
    write_json(out / "report.json", report.to_dict(__version__))
    write_json(
        out / "manifest.json",
        _manifest("experiment", report.config, cfg.seed, ["replicates.csv", "report.json"]),
    )
    verdict = "PASS" if report.passed else "FAIL"
    logger.info(f"Experiment {cfg.experiment}: {verdict} ({len(report.failures)} failing criteria)")
    return EXIT_OK if report.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _sort_key(row: Sequence[Any]) -> tuple[Any, ...]:
    t = row[1]
    return (row[0], t is None, t if t is not None else 0.0)


def summary_rows(reports: Sequence[dict[str, Any]]) -> list[tuple[Any, ...]]:
    """Criterion rows of all reports, sorted by ``(experiment, t)``."""
    rows = []
    for report in reports:
        for c in report.get("criteria", []):
            rows.append(
                (
                    report["experiment"],
                    c.get("t"),
                    c.get("kind"),
                    c.get("name"),
                    c.get("empirical"),
                    c.get("theory"),
                    c.get("std_error"),
                    c.get("tolerance"),
                    bool(c.get("passed")),
                    bool(c.get("enforced", True)),
                )
            )
    return sorted(rows, key=_sort_key)


def _summary_text(reports: Sequence[dict[str, Any]], rows: Sequence[tuple[Any, ...]]) -> str:
    lines = []
    for report in sorted(reports, key=lambda r: r["experiment"]):
        verdict = "PASS" if report.get("passed") else "FAIL"
        lines.append(f"{report['experiment']}: {verdict}")
    lines.append("")
    widths = [max([len(SUMMARY_HEADER[i]), *(len(format_value(r[i])) for r in rows)]) for i in range(4)]
    for row in [SUMMARY_HEADER, *rows]:
        head = "  ".join(format_value(v).ljust(w) for v, w in zip(row[:4], widths, strict=True))
        if row is SUMMARY_HEADER:
            lines.append(f"{head}  verdict")
            continue
        status = ("pass" if row[8] else "FAIL") if row[9] else "info"
        lines.append(f"{head}  {status}  empirical={format_value(row[4])} theory={format_value(row[5])}")
    return "\n".join(lines) + "\n"


def cmd_report(paths: Sequence[Path], out: Path) -> int:
    """Merge report JSON files into ``summary.csv`` and ``summary.txt``."""
    reports = []
    for path in paths:
        try:
            data = load_data(path)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if not isinstance(data, dict) or "experiment" not in data:
            raise ConfigError(f"{path} is not an experiment report")
        reports.append(data)
    versions = sorted({r.get("schema_version") for r in reports}, key=str)
    if len(versions) > 1 or versions[0] != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version mismatch: reports carry {versions}, this tool reads {SCHEMA_VERSION}"
        )

    rows = summary_rows(reports)
    text = _summary_text(reports, rows)
    write_csv(out / "summary.csv", SUMMARY_HEADER, rows)
    (out / "summary.txt").write_text(text, encoding="utf-8")
    write_json(
        out / "manifest.json",
        _manifest("report", [str(p) for p in paths], None, ["summary.csv", "summary.txt"]),
    )
    sys.stdout.write(text)
    return EXIT_OK if all(r.get("passed") for r in reports) else EXIT_FAILED


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _u64(value: str) -> int:
    seed = int(value)
    if not (0 <= seed < 1 << 64):
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def _positive(value: str) -> int:
    count = int(value)
    if count < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return count


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sectorlab", description="Random scaled sector digraph laboratory.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeatable).")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=None, help="Override the config seed.")
    common.add_argument("--threads", type=_positive, default=None, help="Worker threads.")

    g = sub.add_parser("generate", parents=[common], help="Sample a digraph and write CSVs.")
    g.add_argument("--config", type=Path, required=True)
    g.add_argument("--out", type=Path, required=True)

    t = sub.add_parser("theory", parents=[common], help="Evaluate named limit formulas.")
    t.add_argument("--config", type=Path, required=True)
    t.add_argument("--out", type=Path, default=None)

    e = sub.add_parser("experiment", parents=[common], help="Run an experiment preset.")
    e.add_argument("--config", type=Path, default=None)
    e.add_argument("--preset", choices=experiment_names(), default=None)
    e.add_argument("--out", type=Path, required=True)

    r = sub.add_parser("report", help="Merge experiment reports.")
    r.add_argument("reports", type=Path, nargs="+")
    r.add_argument("--out", type=Path, required=True)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "generate":
        gen = GenerateConfig.parse(load_config(args.config)).with_overrides(args.seed, args.threads)
        return cmd_generate(gen, args.out)
    if args.command == "theory":
        return cmd_theory(load_config(args.config), args.out, args.seed)
    if args.command == "experiment":
        raw = load_config(args.config) if args.config is not None else {}
        exp = ExperimentConfig.parse(raw, args.preset).with_overrides(args.seed, args.threads)
        return cmd_experiment(exp, args.out)
    return cmd_report(args.reports, args.out)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
    _configure_logging(args.verbose)

    try:
        return _dispatch(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"I/O error: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
