from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from nashprox.cli import main

PGR_DOC = {
    "scheme": "pgr", "seed": 11, "replications": 2,
    "game": {"kind": "quadratic", "h": [[2.0, 1.0], [1.0, 2.0]], "c": [-1.0, -1.0],
             "noise": {"kind": "gaussian", "nu": 1.0}},
    "solver": {"alpha": 0.2, "rho": 0.9, "max_iter": 20},
}

DIST_DOC = {
    "scheme": "dist-pgr", "seed": 5, "replications": 2,
    "game": {"kind": "cournot", "a": [1.0] * 5, "b": [0.0] * 5, "d": 2.0,
             "c_price": 1.0, "lo": 0.0, "hi": 1.0, "nu": 0.5},
    "graph": {"family": "ring", "nodes": 5},
    "solver": {"alpha": 0.02, "max_iter": 15},
}

PBR_DOC = {
    "scheme": "pbr", "seed": 2, "replications": 2,
    "game": {"kind": "quadratic", "h": [[2.0, 1.0], [1.0, 2.0]], "c": [-1.0, -1.0],
             "noise": {"kind": "gaussian", "nu": 1.4142135623730951}},
    "solver": {"mu": 1.0, "eta_br": 0.7, "max_iter": 10, "eta_tilde": 0.75},
}

BOUNDS_DOC = {
    "scheme": "bounds",
    "solver": {"eta": 1.0, "lip": 2.0, "nu": 1.0, "alpha": 0.25, "rho": 0.875,
               "c_start": 1.0, "eps": 0.01},
}


def _write(tmp_path: Path, doc: dict, name: str = "config.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.mark.parametrize("command,doc", [
    ("pgr", PGR_DOC),
    ("dist-pgr", DIST_DOC),
    ("pbr", PBR_DOC),
    ("bounds", BOUNDS_DOC),
])
def test_subcommands_run_and_emit_artifacts(tmp_path: Path, command: str, doc: dict):
    cfg = _write(tmp_path, doc)
    out = tmp_path / "out"
    assert main([command, "--config", cfg, "--out", str(out), "--quiet"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["scheme"] == command
    if command != "bounds":
        assert (out / "trace.csv").exists()


def test_validate_reports_game_and_graph_assumptions(tmp_path: Path, capsys):
    cfg = _write(tmp_path, DIST_DOC)
    assert main(["validate", "--config", cfg]) == 0
    text = capsys.readouterr().out
    assert "eta" in text
    assert "beta" in text


def test_missing_required_solver_key_exits_with_config_error(tmp_path: Path):
    doc = dict(PGR_DOC)
    doc["solver"] = {"alpha": 0.2, "rho": 0.9}
    assert main(["pgr", "--config", _write(tmp_path, doc), "--quiet"]) == 2


def test_unknown_top_level_key_is_rejected(tmp_path: Path):
    doc = dict(PGR_DOC)
    doc["surprise"] = 1
    assert main(["pgr", "--config", _write(tmp_path, doc), "--quiet"]) == 2


def test_unknown_solver_key_is_rejected(tmp_path: Path):
    doc = dict(PGR_DOC)
    doc["solver"] = dict(PGR_DOC["solver"], momentum=0.9)
    assert main(["pgr", "--config", _write(tmp_path, doc), "--quiet"]) == 2


def test_scheme_mismatch_is_a_config_error(tmp_path: Path):
    assert main(["pbr", "--config", _write(tmp_path, PGR_DOC), "--quiet"]) == 2


def test_unreadable_config_is_a_config_error(tmp_path: Path):
    assert main(["pgr", "--config", str(tmp_path / "missing.json"), "--quiet"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["pgr", "--config", str(bad), "--quiet"]) == 2


def test_assumption_violations_exit_with_validation_code(tmp_path: Path):
    non_monotone = dict(PGR_DOC)
    non_monotone["game"] = {"kind": "quadratic", "h": [[1.0, 2.0], [0.0, 1.0]],
                            "c": [0.0, 0.0]}
    assert main(["pgr", "--config", _write(tmp_path, non_monotone), "--quiet"]) == 3
    bad_step = dict(PGR_DOC)
    bad_step["solver"] = {"alpha": 5.0, "rho": 0.9, "max_iter": 20}
    assert main(["pgr", "--config", _write(tmp_path, bad_step, "s.json"), "--quiet"]) == 3


def test_seed_and_replication_overrides_reach_the_report(tmp_path: Path):
    cfg = _write(tmp_path, PGR_DOC)
    out = tmp_path / "out"
    assert main(["pgr", "--config", cfg, "--out", str(out), "--seed", "99",
                 "--replications", "3", "--quiet"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["seed"] == 99
    assert report["replications"] == 3
    lines = (out / "trace.csv").read_text().splitlines()
    assert len(lines) - 1 == 20 * 3


def test_module_entry_point_matches_the_console_script(tmp_path: Path):
    cfg = _write(tmp_path, BOUNDS_DOC)
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "nashprox", "bounds", "--config", cfg,
         "--out", str(out), "--quiet"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "report.json").exists()
