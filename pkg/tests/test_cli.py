import json
import math

import pytest

from sectorlab import __version__
from sectorlab.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_IO, EXIT_OK, main, summary_rows
from sectorlab.io import load_data


def _criterion(name, t, kind, passed, enforced=True):
    return {
        "name": name,
        "t": t,
        "kind": kind,
        "empirical": 0.5,
        "theory": 0.5 if passed else 0.7,
        "std_error": None,
        "tolerance": 0.05,
        "passed": passed,
        "enforced": enforced,
    }


def _report(experiment, criteria, schema_version=1):
    return {
        "schema_version": schema_version,
        "tool_version": __version__,
        "experiment": experiment,
        "config": {},
        "passed": all(c["passed"] for c in criteria if c["enforced"]),
        "criteria": criteria,
        "metrics": {},
    }


def _write(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_generate_writes_tables_and_manifest(data_dir, tmp_path, read_table):
    out = tmp_path / "run"
    assert main(["generate", "--config", str(data_dir / "generate_uniform.json"), "--out", str(out)]) == EXIT_OK
    manifest = load_data(out / "manifest.json")
    assert manifest["command"] == "generate"
    assert manifest["files"] == ["points.csv", "degrees.csv", "arcs.csv"]
    assert manifest["r_n"] == pytest.approx(math.sqrt(2.0 / 300))
    assert manifest["schema_version"] == 1
    assert "threads" not in manifest["config"]
    degrees = read_table(out / "degrees.csv")
    arcs = read_table(out / "arcs.csv")
    assert len(degrees) == 300
    assert len(read_table(out / "points.csv")) == 300
    assert len(arcs) == manifest["arc_count"]
    assert sum(int(row["out_deg"]) for row in degrees) == len(arcs)


def test_generate_is_byte_identical_across_threads(data_dir, tmp_path):
    """Same seed, different thread counts: identical bytes in every file."""
    cfg = str(data_dir / "generate_uniform.json")
    assert main(["generate", "--config", cfg, "--out", str(tmp_path / "a"), "--threads", "1"]) == EXIT_OK
    assert main(["generate", "--config", cfg, "--out", str(tmp_path / "b"), "--threads", "4"]) == EXIT_OK
    for name in ("points.csv", "degrees.csv", "arcs.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_generate_seed_override(data_dir, tmp_path):
    cfg = str(data_dir / "generate_uniform.json")
    main(["generate", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["generate", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "9"])
    assert load_data(tmp_path / "b" / "manifest.json")["seed"] == 9
    assert (tmp_path / "a" / "points.csv").read_bytes() != (tmp_path / "b" / "points.csv").read_bytes()


def test_generate_empty_cloud(tmp_path):
    cfg = _write(tmp_path / "empty.json", {"n": 0, "t": 1.0, "write_arcs": True})
    out = tmp_path / "out"
    assert main(["generate", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    assert (out / "points.csv").read_text() == "index,x,y,inclination\n"
    assert (out / "degrees.csv").read_text() == "index,out_deg,in_deg\n"
    assert (out / "arcs.csv").read_text() == "source,target\n"
    manifest = load_data(out / "manifest.json")
    assert manifest["r_n"] is None
    assert manifest["arc_count"] == 0


def test_generate_config_errors(tmp_path, capsys):
    cfg = _write(tmp_path / "bad.json", {"n": 10, "t": 1.0, "alpha": "tau"})
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "alpha" in capsys.readouterr().err
    assert main(["generate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == EXIT_IO
    assert main(["generate", "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["generate", "--config", str(cfg), "--out", "o", "--seed", "-1"]) == EXIT_CONFIG


def test_theory_prints_one_record_per_request(data_dir, tmp_path, capsys):
    out = tmp_path / "theory"
    assert main(["theory", "--config", str(data_dir / "theory_requests.json"), "--out", str(out)]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    records = [json.loads(line) for line in lines]
    assert [r["formula"] for r in records][:3] == ["degree-distribution", "mean-growing", "h-correction"]
    assert records[0]["value"] == pytest.approx(math.exp(-math.pi))
    assert records[1]["value"] == pytest.approx(0.5)
    assert records[1]["components"]["level_mass"] == pytest.approx(1.0)
    assert records[2]["value"] == pytest.approx(math.exp(-math.pi) * math.pi + 1.0 - math.exp(-math.pi))
    assert records[2]["value"] == pytest.approx(1.092546, abs=1e-6)
    assert [r["formula"] for r in records][3:] == ["eq62", "eq16", "eq13"]
    for named, labelled in zip(records[:3], records[3:], strict=True):
        assert labelled["value"] == pytest.approx(named["value"])
    assert records[4]["params"]["s_alpha"] == 2.0
    assert all(r["std_error"] == 0.0 for r in records)
    assert load_data(out / "theory.json") == records
    assert load_data(out / "manifest.json")["command"] == "theory"


def test_theory_unknown_formula(tmp_path, capsys):
    cfg = _write(tmp_path / "t.json", {"formula": "warp-drive", "alpha": "pi", "t": 2})
    assert main(["theory", "--config", str(cfg)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "warp-drive" in err
    assert "degree-distribution" in err


def test_theory_missing_parameter(tmp_path):
    cfg = _write(tmp_path / "t.json", {"formula": "degree-distribution", "alpha": "pi", "k": 0})
    assert main(["theory", "--config", str(cfg)]) == EXIT_CONFIG


def test_theory_invalid_value(tmp_path):
    cfg = _write(tmp_path / "t.json", {"formula": "degree-distribution", "alpha": "pi", "t": -1, "k": 0})
    assert main(["theory", "--config", str(cfg)]) == EXIT_CONFIG


def test_theory_planar_formula_on_cube(tmp_path, capsys):
    cfg = _write(tmp_path / "t.json", {"formula": "level-set-mass", "density": "uniform-cube", "alpha": "pi", "s": 1.0})
    assert main(["theory", "--config", str(cfg)]) == EXIT_CONFIG
    assert "planar" in capsys.readouterr().err


def test_theory_alias_without_alpha(tmp_path, capsys):
    cfg = _write(tmp_path / "t.json", {"formula": "eq62", "s": "2/alpha", "t": 2, "k": 0})
    assert main(["theory", "--config", str(cfg)]) == EXIT_CONFIG
    assert "eq62: missing parameter" in capsys.readouterr().err


def test_experiment_writes_report(data_dir, tmp_path, read_table):
    out = tmp_path / "exp"
    code = main(["experiment", "--config", str(data_dir / "experiment_mean.json"), "--out", str(out)])
    report = load_data(out / "report.json")
    assert code == (EXIT_OK if report["passed"] else EXIT_FAILED)
    assert report["experiment"] == "mean"
    assert report["config"]["seed"] == 11
    assert len(read_table(out / "replicates.csv")) == 6 * 2
    assert load_data(out / "manifest.json")["files"] == ["replicates.csv", "report.json"]


def test_experiment_is_byte_identical_across_threads(data_dir, tmp_path):
    cfg = str(data_dir / "experiment_mean.json")
    main(["experiment", "--config", cfg, "--out", str(tmp_path / "a"), "--threads", "1"])
    main(["experiment", "--config", cfg, "--out", str(tmp_path / "b"), "--threads", "3"])
    for name in ("replicates.csv", "report.json", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_experiment_usage_errors(tmp_path):
    assert main(["experiment", "--preset", "warp", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["experiment", "--out", str(tmp_path)]) == EXIT_CONFIG
    cfg = _write(tmp_path / "e.json", {"experiment": "mean", "n": 0})
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_report_merges_and_sorts(tmp_path, capsys):
    mean = _write(
        tmp_path / "mean.json",
        _report("mean", [_criterion("mean", 2.0, "out", True), _criterion("mean", 1.0, "out", True)]),
    )
    dist = _write(
        tmp_path / "dist.json",
        _report("degree-dist", [_criterion("tv", 2.0, "in", False), _criterion("out-in-zmax", 2.0, None, False, False)]),
    )
    out = tmp_path / "summary"
    assert main(["report", str(mean), str(dist), "--out", str(out)]) == EXIT_FAILED
    lines = (out / "summary.csv").read_text().splitlines()
    assert lines[0] == "experiment,t,kind,criterion,empirical,theory,std_error,tolerance,passed,enforced"
    assert [line.split(",")[:4] for line in lines[1:]] == [
        ["degree-dist", "2", "in", "tv"],
        ["degree-dist", "2", "", "out-in-zmax"],
        ["mean", "1", "out", "mean"],
        ["mean", "2", "out", "mean"],
    ]
    text = capsys.readouterr().out
    assert "degree-dist: FAIL" in text
    assert "mean: PASS" in text
    assert (out / "summary.txt").read_text() == text


def test_report_all_passing(tmp_path):
    path = _write(tmp_path / "r.json", _report("mean", [_criterion("mean", 2.0, "in", True)]))
    assert main(["report", str(path), "--out", str(tmp_path / "s")]) == EXIT_OK


def test_report_rejects_schema_mismatch(tmp_path):
    old = _write(tmp_path / "old.json", _report("mean", [], schema_version=1))
    new = _write(tmp_path / "new.json", _report("mean", [], schema_version=2))
    assert main(["report", str(old), str(new), "--out", str(tmp_path / "s")]) == EXIT_CONFIG
    assert main(["report", str(new), "--out", str(tmp_path / "s")]) == EXIT_CONFIG


def test_report_input_errors(tmp_path):
    assert main(["report", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == EXIT_IO
    not_a_report = _write(tmp_path / "x.json", {"hello": "world"})
    assert main(["report", str(not_a_report), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_summary_rows_put_untimed_criteria_last():
    rows = summary_rows([_report("c", [_criterion("a", None, None, True), _criterion("b", 0.5, "in", True)])])
    assert [r[3] for r in rows] == ["b", "a"]
