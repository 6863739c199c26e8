import csv
import json

import pytest

from mdopt import cli
from mdopt.io import SUMMARY_COLUMNS

from conftest import requires_fixtures


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_toy_writes_outputs(tmp_path):
    rc = cli.main(["run", "--problem", "toy", "--alg", "alg1,alg5", "--eps", "1/10", "--out", str(tmp_path)])
    assert rc == cli.EXIT_OK
    rows = read_csv(tmp_path / "summary.csv")
    assert [r["algorithm"] for r in rows] == ["alg1", "alg5"]
    assert all(r["iterations"] == "100" for r in rows)
    assert list(rows[0]) == SUMMARY_COLUMNS
    lines = (tmp_path / "trace-toy-alg1-0p1.jsonl").read_text().splitlines()
    assert len(lines) == 100
    assert json.loads(lines[0])["kind"] == "productive"


def test_run_with_timing_column(tmp_path):
    cli.main(["run", "--problem", "toy", "--alg", "alg1", "--eps", "0.1", "--out", str(tmp_path),
              "--with-timing", "--no-trace"])
    rows = read_csv(tmp_path / "summary.csv")
    assert "wall_ms" in rows[0]
    assert not list(tmp_path.glob("trace-*"))


@pytest.mark.parametrize("args", [
    ["--problem", "nope", "--alg", "alg1", "--eps", "0.1"],
    ["--problem", "toy", "--alg", "alg9", "--eps", "0.1"],
    ["--problem", "toy", "--alg", "alg1"],
    ["--problem", "toy", "--alg", "alg1", "--eps", "-1"],
    ["--problem", "toy", "--alg", "alg1", "--eps", "abc"],
])
def test_run_config_errors(tmp_path, args):
    assert cli.main(["run", *args, "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_run_from_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": "toy", "algorithms": ["alg2"], "eps_list": ["1/10"],
                               "output_dir": str(tmp_path / "out"), "traces": False}))
    assert cli.main(["run", "--config", str(cfg)]) == cli.EXIT_OK
    assert read_csv(tmp_path / "out" / "summary.csv")[0]["iterations"] == "100"


def test_run_restart_rows(tmp_path):
    rc = cli.main(["run", "--problem", "sc-ex4", "--alg", "restart_alg1", "--eps", "0.05",
                   "--out", str(tmp_path), "--no-trace"])
    assert rc == cli.EXIT_OK
    rows = read_csv(tmp_path / "summary.csv")
    assert [r["p"] for r in rows] == ["", "1", "2", "3", "4", "5"]
    assert int(rows[0]["iterations"]) == sum(int(r["iterations"]) for r in rows[1:])


def test_run_audit_failure_exit_code(tmp_path, monkeypatch, capsys):
    # force the audit to see a violation by making the tolerance absurdly strict and negative
    monkeypatch.setattr("mdopt.solvers.AUDIT_TOL", -1e9)
    rc = cli.main(["run", "--problem", "toy", "--alg", "alg1", "--eps", "0.1", "--audit",
                   "--out", str(tmp_path), "--no-trace"])
    assert rc == cli.EXIT_AUDIT
    assert "step 0" in capsys.readouterr().out


def test_run_cap_exit_code(tmp_path):
    rc = cli.main(["run", "--problem", "toy", "--alg", "alg1", "--eps", "0.1", "--cap", "5",
                   "--out", str(tmp_path)])
    assert rc == cli.EXIT_NOT_CONVERGED
    assert read_csv(tmp_path / "summary.csv")[0]["stop_reason"] == "iteration_cap"


def test_run_restart_cap_keeps_partial_chain(tmp_path):
    rc = cli.main(["run", "--problem", "sc-ex4", "--alg", "restart_alg1", "--eps", "0.05",
                   "--cap", "50", "--out", str(tmp_path), "--no-trace"])
    assert rc == cli.EXIT_NOT_CONVERGED
    rows = read_csv(tmp_path / "summary.csv")
    assert rows[0]["stop_reason"] == "iteration_cap" and len(rows) >= 2


def test_suite_missing_fixture(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "fixture_path", lambda name: tmp_path / f"{name}.json")
    assert cli.main(["suite", "table1", "--out", str(tmp_path)]) == cli.EXIT_FIXTURE


def test_verify_unknown_problem():
    assert cli.main(["verify", "--problem", "nope"]) == cli.EXIT_CONFIG


def test_parse_eps():
    assert cli.parse_eps("1/8") == 0.125
    assert cli.parse_eps(0.5) == 0.5


def test_suite_report_shape():
    class R:
        def __init__(self, n):
            self.iterations = n

    counts = cli.PUBLISHED["table1"]["counts"]
    results = {("fts-quadratic", a, e): R(counts[e][a]) for e in counts for a in counts[e]}
    rep = cli.suite_report("table1", results)
    assert rep["all_within_band"] and rep["all_orderings_hold"]
    half = [r for r in rep["rows"] if r["eps"] == 0.5]
    assert sorted(r["published"] for r in half) == [231, 283, 1659]
    assert all(r["ratio"] == 1.0 for r in rep["rows"])


@requires_fixtures
def test_suite_table1(tmp_path):
    assert cli.main(["suite", "table1", "--out", str(tmp_path)]) == cli.EXIT_OK
    report = json.loads((tmp_path / "report-table1.json").read_text())
    assert len(report["rows"]) == 9
    assert {(r["algorithm"], r["published"]) for r in report["rows"] if r["eps"] == 0.5} == {
        ("alg5", 1659), ("alg1", 283), ("alg6", 231)}


@requires_fixtures
def test_verify_toy():
    assert cli.main(["verify", "--problem", "toy"]) == cli.EXIT_OK
