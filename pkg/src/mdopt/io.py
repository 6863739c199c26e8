"""Trace, summary and report writers."""
from __future__ import annotations

import csv
import json
from pathlib import Path

__all__ = ["SUMMARY_COLUMNS", "summary_row", "restart_rows", "write_summary", "write_trace", "write_json"]

SUMMARY_COLUMNS = [
    "algorithm", "problem", "eps", "p", "iterations", "productive", "nonproductive",
    "f_out", "g_out", "stop_reason",
]
TIMING_COLUMN = "wall_ms"


def _num(v):
    return "" if v is None else repr(float(v))


def summary_row(algorithm, problem, eps, result, p=None):
    x = result.output
    return {
        "algorithm": algorithm,
        "problem": problem.name,
        "eps": _num(eps),
        "p": "" if p is None else str(p),
        "iterations": str(result.iterations),
        "productive": str(result.productive_count),
        "nonproductive": str(result.nonproductive_count),
        "f_out": _num(problem.objective.value(x)),
        "g_out": _num(problem.g_max(x)),
        "stop_reason": result.stop_reason,
        TIMING_COLUMN: f"{1000.0 * result.wall_time:.3f}",
    }


def restart_rows(algorithm, problem, eps, report):
    """One row for the whole chain (``p`` empty) plus one per restart."""
    x = report.output
    wall = sum(s.inner.wall_time for s in report.chain)
    prod = sum(s.inner.productive_count for s in report.chain)
    total = {
        "algorithm": algorithm,
        "problem": problem.name,
        "eps": _num(eps),
        "p": "",
        "iterations": str(report.total_inner_iterations),
        "productive": str(prod),
        "nonproductive": str(report.total_inner_iterations - prod),
        "f_out": _num(problem.objective.value(x)),
        "g_out": _num(problem.g_max(x)),
        "stop_reason": "criterion_met" if report.complete else "iteration_cap",
        TIMING_COLUMN: f"{1000.0 * wall:.3f}",
    }
    rows = [total]
    for s in report.chain:
        row = summary_row(algorithm, problem, s.eps_p, s.inner, p=s.p)
        row["_run_eps"] = _num(eps)
        rows.append(row)
    return rows


def _sort_key(row):
    p = int(row["p"]) if row["p"] else -1
    return (row["problem"], row["algorithm"], float(row.get("_run_eps", row["eps"])), p)


def write_summary(rows, path, with_timing=False):
    """Write rows sorted by (problem, algorithm, eps); restart rows follow their total.

    ``wall_ms`` is only written when asked for, so default output is
    byte-identical across repeated runs.
    """
    cols = SUMMARY_COLUMNS + ([TIMING_COLUMN] if with_timing else [])
    rows = sorted(rows, key=_sort_key)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path


def write_trace(trace, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for rec in trace:
            fh.write(json.dumps(rec.to_dict()) + "\n")
    return path


def write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path
