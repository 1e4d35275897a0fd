import csv
import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from wpmix import cli
from wpmix.acceptance import CriterionResult
from wpmix.config import load_schema
from wpmix.errors import InconclusiveOracleError, NumericalError

MODEL = {
    "p": 1.0, "d": 2, "I": [1],
    "radial": {"family": "exponential"},
    "mixing": {"family": "uniform"},
}


def write_cfg(tmp_path, **blocks):
    doc = {"schema": 1, "seed": 11, "model": MODEL, **blocks}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc, indent=1))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_sample_csv(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert cli.run(["sample", "--config", write_cfg(tmp_path, sample={"n": 50}), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["x1", "x2"] and len(rows) == 50
    assert "sample: 50 rows" in capsys.readouterr().err
    assert b"\r\n" not in out.read_bytes()


def test_sample_independent_of_threads_and_chunks(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, sample={"n": 2 * cli.CHUNK_ROWS + 17})
    blobs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("WPMIX_THREADS", threads)
        out = tmp_path / f"s{threads}.csv"
        assert cli.run(["sample", "--config", cfg, "--out", str(out)]) == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


def test_seed_override_changes_output(tmp_path, capsys):
    cfg = write_cfg(tmp_path, sample={"n": 5})
    cli.run(["sample", "--config", cfg])
    a = capsys.readouterr().out
    cli.run(["sample", "--config", cfg, "--seed", "12"])
    assert capsys.readouterr().out != a


def test_json_output_round_trips(tmp_path):
    out = tmp_path / "x.json"
    cfg = write_cfg(tmp_path, sample={"n": 20})
    assert cli.run(["sample", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, load_schema("output"))
    csv_out = tmp_path / "x.csv"
    cli.run(["sample", "--config", cfg, "--out", str(csv_out)])
    _, rows = read_csv(csv_out)
    # repr floats round-trip exactly through both formats
    np.testing.assert_array_equal(np.array(rows, dtype=float), np.array(doc["rows"]))
    assert doc["command"] == "sample" and doc["seed"] == 11


def test_cond_grid_matches_law(tmp_path):
    out = tmp_path / "c.csv"
    cfg = write_cfg(tmp_path, cond={"a_J": [1.0], "grid": 11})
    assert cli.run(["cond", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["z", "cdf", "pdf"]
    F = np.array([float(r[1]) for r in rows])
    assert F[0] == 0.0 and np.all(np.diff(F) >= 0)
    summary = json.loads((tmp_path / "c.csv.summary.json").read_text())
    assert summary["summary"]["tau"] == 1.0


def test_cond_samples(tmp_path, capsys):
    cfg = write_cfg(tmp_path, cond={"a_J": [1.0], "mode": "sample", "n": 30})
    assert cli.run(["cond", "--config", cfg]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x1" and len(lines) == 31


def test_limit_sweep(tmp_path, capsys):
    cfg = write_cfg(tmp_path, limit={"levels": [5.0, 20.0], "grid_size": 50})
    assert cli.run(["limit", "--config", cfg]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "regime,level,tau,scale,sup_gap" and lines[1].startswith("gumbel,5.0,")


def test_concomitants_command(tmp_path):
    model = {"p": 2.0, "rho": 0.5, "radial": {"family": "exponential"},
             "mixing": {"family": "beta", "params": {"a": 1.0, "alpha": 1.0}}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"schema": 1, "seed": 2, "model": model,
                                "concomitants": {"n": 300, "k": 2, "reps": 5}}))
    out = tmp_path / "c.csv"
    assert cli.run(["concomitants", "--config", str(path), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["rep", "position", "eta", "xi"] and len(rows) == 10
    summary = json.loads((tmp_path / "c.csv.summary.json").read_text())["summary"]
    assert summary["reps"] == 5 and len(summary["marginal_ks"]) == 2


def test_lemma_command(tmp_path, capsys):
    cfg = write_cfg(tmp_path, lemma={"c": {"levels": [30.0, 50.0], "beta": 0.0, "mu": 2.0}})
    assert cli.run(["lemma", "--config", cfg]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["check", "level", "statistic", "value", "threshold", "pass"]
    assert all(r[-1] == "true" for r in rows[1:])


def test_verify_selected_criteria(tmp_path, capsys):
    cfg = write_cfg(tmp_path, verify={"criteria": [3, 5]})
    assert cli.run(["verify", "--config", cfg]) == 0
    assert "verify: 2/2 criteria passed" in capsys.readouterr().err


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    from wpmix import acceptance

    def failing(numbers, seed):
        res = CriterionResult(1, "forced")
        res.below("x", 1.0, 0.0)
        return [res]

    monkeypatch.setattr(acceptance, "run_acceptance", failing)
    assert cli.run(["verify", "--config", write_cfg(tmp_path)]) == cli.EXIT_FAILED


def test_configuration_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": 1,\n "seed": "x"}')
    assert cli.run(["sample", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert "bad.json:2" in capsys.readouterr().err
    assert cli.run(["cond", "--config", write_cfg(tmp_path)]) == cli.EXIT_CONFIG


@pytest.mark.parametrize("exc,code", [(NumericalError("x"), cli.EXIT_NUMERIC),
                                      (InconclusiveOracleError("x"), cli.EXIT_ORACLE)])
def test_runtime_error_exit_codes(tmp_path, monkeypatch, exc, code):
    def boom(cfg, seed):
        raise exc

    monkeypatch.setitem(cli.HANDLERS, "sample", boom)
    assert cli.run(["sample", "--config", write_cfg(tmp_path)]) == code


def test_module_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, sample={"n": 3})
    proc = subprocess.run([sys.executable, "-m", "wpmix", "sample", "--config", cfg],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("x1,x2\n")
