"""``mdopt`` command line: single runs, table suites and the invariant battery.

Exit codes: 0 success, 1 a run did not converge, 2 bad configuration,
3 an audit or invariant failed, 4 a reference fixture is missing.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exceptions import InvalidArgument, IterationCapReached, MDOptError
from .io import restart_rows, summary_row, write_json, write_summary, write_trace
from .problems import PROBLEM_IDS, fixture_path, get_problem
from .restarts import solve_restarted
from .solvers import DEFAULT_CAP, solve_adaptive, solve_lipschitz, solve_multi_constraint, solve_partially_adaptive
from .verify import verify_problem

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_CONFIG, EXIT_AUDIT, EXIT_FIXTURE = 0, 1, 2, 3, 4

ALGORITHMS = ("alg1", "alg2", "alg5", "alg6", "restart_alg1", "restart_alg2")

# Iteration counts published for the three comparison tables.
PUBLISHED = {
    "table1": {
        "problem": "fts-quadratic",
        "algorithms": ("alg5", "alg1", "alg6"),
        "eps": (0.5, 0.25, 0.125),
        "band": 0.25,
        "counts": {
            0.5: {"alg5": 1659, "alg1": 283, "alg6": 231},
            0.25: {"alg5": 5951, "alg1": 899, "alg6": 774},
            0.125: {"alg5": 22356, "alg1": 3159, "alg6": 2850},
        },
        "seconds": {
            0.5: {"alg5": 97, "alg1": 15, "alg6": 6},
            0.25: {"alg5": 336, "alg1": 49, "alg6": 22},
            0.125: {"alg5": 1491, "alg1": 180, "alg6": 100},
        },
    },
    "table2": {
        "problem": "fts-nonsmooth",
        "algorithms": ("alg5", "alg1", "alg6"),
        "eps": (0.5, 0.25, 0.125),
        "band": 0.25,
        "counts": {
            0.5: {"alg5": 3709, "alg1": 671, "alg6": 437},
            0.25: {"alg5": 14212, "alg1": 2418, "alg6": 1970},
            0.125: {"alg5": 54655, "alg1": 8979, "alg6": 8329},
        },
        "seconds": {
            0.5: {"alg5": 279, "alg1": 29, "alg6": 21},
            0.25: {"alg5": 833, "alg1": 103, "alg6": 95},
            0.125: {"alg5": 2980, "alg1": 455, "alg6": 344},
        },
    },
    "table3": {
        "problems": tuple(f"sc-ex{k}" for k in range(1, 6)),
        "algorithms": ("alg1", "restart_alg1"),
        "eps": (0.05,),
        "band": 0.30,
        "counts": {
            "sc-ex1": {"alg1": 115973, "restart_alg1": 95447},
            "sc-ex2": {"alg1": 57798, "restart_alg1": 45455},
            "sc-ex3": {"alg1": 56874, "restart_alg1": 50747},
            "sc-ex4": {"alg1": 13720, "restart_alg1": 6764},
            "sc-ex5": {"alg1": 64324, "restart_alg1": 55073},
        },
        "seconds": {
            "sc-ex1": {"alg1": 556, "restart_alg1": 457},
            "sc-ex2": {"alg1": 421, "restart_alg1": 314},
            "sc-ex3": {"alg1": 302, "restart_alg1": 258},
            "sc-ex4": {"alg1": 75, "restart_alg1": 38},
            "sc-ex5": {"alg1": 364, "restart_alg1": 292},
        },
    },
}


@dataclass
class BenchConfig:
    problem: str
    algorithms: list
    eps_list: list
    audit: bool = False
    seed: int = 0
    output_dir: str = "mdopt-out"
    traces: bool = True
    with_timing: bool = False
    selection: str = "first"
    cap: int = DEFAULT_CAP
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.problem not in PROBLEM_IDS:
            raise InvalidArgument(f"unknown problem {self.problem!r}; known: {', '.join(PROBLEM_IDS)}")
        if not self.algorithms:
            raise InvalidArgument("no algorithm given")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise InvalidArgument(f"unknown algorithm(s) {bad}; known: {', '.join(ALGORITHMS)}")
        if not self.eps_list:
            raise InvalidArgument("eps list is empty")
        if any(not e > 0 for e in self.eps_list):
            raise InvalidArgument("every eps must be positive")
        if self.cap < 1:
            raise InvalidArgument("cap must be at least 1")
        return self

    @classmethod
    def from_json(cls, path):
        data = json.loads(Path(path).read_text())
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        known["eps_list"] = [parse_eps(e) for e in known.get("eps_list", [])]
        return cls(**known)


def parse_eps(text):
    """Accept ``0.5``, ``"1/2"`` or ``"0.5"``."""
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidArgument(f"cannot parse eps {text!r}") from exc


def run_algorithm(problem, alg, eps, audit=False, keep_trace=True, selection="first",
                  cap=DEFAULT_CAP):
    """Run one algorithm id; returns a RunResult or a RestartReport."""
    setup = problem.prox_setup()
    if alg == "alg1":
        return solve_adaptive(problem, setup, eps, cap=cap, audit=audit, keep_trace=keep_trace)
    if alg == "alg2":
        return solve_partially_adaptive(problem, setup, eps, audit=audit, keep_trace=keep_trace)
    if alg == "alg5":
        return solve_lipschitz(problem, setup, eps, cap=cap, audit=audit, keep_trace=keep_trace)
    if alg == "alg6":
        return solve_multi_constraint(problem, setup, eps, cap=cap, selection=selection, audit=audit,
                                      keep_trace=keep_trace)
    inner = "adaptive" if alg == "restart_alg1" else "partially_adaptive"
    return solve_restarted(problem, inner, eps, cap=cap, audit=audit, keep_trace=keep_trace)


def _eps_tag(eps):
    return repr(float(eps)).replace(".", "p")


def _execute(problem, algorithms, eps_list, out, audit, traces, selection, log, cap=DEFAULT_CAP):
    """Run the grid; returns (rows, results, first audit violation, all converged)."""
    rows, results = [], {}
    first_violation = None
    converged = True
    for alg in algorithms:
        for eps in eps_list:
            try:
                res = run_algorithm(problem, alg, eps, audit=audit, keep_trace=traces,
                                    selection=selection, cap=cap)
            except IterationCapReached as exc:
                res = exc.report
            results[(alg, eps)] = res
            tag = f"{problem.name}-{alg}-{_eps_tag(eps)}"
            if alg.startswith("restart"):
                rows.extend(restart_rows(alg, problem, eps, res))
                inner_runs = [(f"{tag}-p{s.p}", s.inner) for s in res.chain]
                iterations = res.total_inner_iterations
                ok = res.complete
            else:
                rows.append(summary_row(alg, problem, eps, res))
                inner_runs = [(tag, res)]
                iterations = res.iterations
                ok = res.converged
            converged &= ok
            for name, run in inner_runs:
                if traces:
                    write_trace(run.trace, out / f"trace-{name}.jsonl")
                if run.audit_violations and first_violation is None:
                    first_violation = (name, run.audit_violations[0])
            log(f"{problem.name} {alg} eps={eps:g}: {iterations} iterations")
    return rows, results, first_violation, converged


def cmd_run(config, log=print):
    try:
        config.validate()
    except InvalidArgument as exc:
        log(f"error: {exc}")
        return EXIT_CONFIG
    out = Path(config.output_dir)
    problem = get_problem(config.problem)
    rows, _, violation, converged = _execute(
        problem, config.algorithms, config.eps_list, out, config.audit, config.traces,
        config.selection, log, cap=config.cap)
    write_summary(rows, out / "summary.csv", with_timing=config.with_timing)
    if violation is not None:
        name, v = violation
        log(f"audit failure in {name}: {v}")
        return EXIT_AUDIT
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _iterations(res):
    return res.total_inner_iterations if hasattr(res, "total_inner_iterations") else res.iterations


def suite_report(name, results):
    """Observed vs published counts plus the table's ordering claims.

    ``results`` maps ``(problem, algorithm, eps)`` to run results.
    """
    grid = PUBLISHED[name]
    band = grid["band"]
    rows, orderings = [], []
    for (prob, alg, eps), res in sorted(results.items()):
        key = eps if name != "table3" else prob
        published = grid["counts"][key][alg]
        observed = _iterations(res)
        ratio = observed / published
        rows.append({
            "problem": prob,
            "algorithm": alg,
            "eps": eps,
            "observed": observed,
            "published": published,
            "ratio": round(ratio, 6),
            "within_band": abs(ratio - 1.0) <= band,
            "published_seconds": grid["seconds"][key][alg],
        })
    count = {(r["problem"], r["algorithm"], r["eps"]): r["observed"] for r in rows}
    if name in ("table1", "table2"):
        prob = grid["problem"]
        for eps in grid["eps"]:
            a6, a1, a5 = (count[(prob, a, eps)] for a in ("alg6", "alg1", "alg5"))
            orderings.append({"claim": "alg6 <= alg1 < alg5", "eps": eps,
                              "holds": a6 <= a1 < a5, "values": [a6, a1, a5]})
    else:
        for prob in grid["problems"]:
            plain, rest = count[(prob, "alg1", 0.05)], count[(prob, "restart_alg1", 0.05)]
            orderings.append({"claim": "restart_alg1 < alg1", "problem": prob,
                              "holds": rest < plain, "values": [rest, plain]})
    return {
        "suite": name,
        "band": band,
        "rows": rows,
        "orderings": orderings,
        "all_within_band": all(r["within_band"] for r in rows),
        "all_orderings_hold": all(o["holds"] for o in orderings),
    }


def cmd_suite(name, output_dir="mdopt-out", audit=False, traces=False, with_timing=False,
              log=print):
    if name not in PUBLISHED:
        log(f"error: unknown suite {name!r}; known: {', '.join(PUBLISHED)}")
        return EXIT_CONFIG
    grid = PUBLISHED[name]
    problems = grid.get("problems", (grid.get("problem"),))
    missing = [p for p in problems if not fixture_path(p).exists()]
    if missing:
        log(f"error: missing reference fixture(s) for {', '.join(missing)}")
        return EXIT_FIXTURE
    out = Path(output_dir)
    all_rows, results = [], {}
    violation, converged = None, True
    for pname in problems:
        problem = get_problem(pname)
        rows, res, v, ok = _execute(problem, grid["algorithms"], grid["eps"], out, audit, traces,
                                    "first", log)
        all_rows.extend(rows)
        results.update({(pname, alg, eps): r for (alg, eps), r in res.items()})
        violation = violation or v
        converged &= ok
    write_summary(all_rows, out / "summary.csv", with_timing=with_timing)
    report = suite_report(name, results)
    write_json(report, out / f"report-{name}.json")
    for r in report["rows"]:
        log(f"{r['problem']:>14} {r['algorithm']:>13} eps={r['eps']:<6g} observed={r['observed']:>7} "
            f"published={r['published']:>7} ratio={r['ratio']:.3f}")
    for o in report["orderings"]:
        log(f"ordering {o['claim']} {o.get('problem', o.get('eps'))}: {'holds' if o['holds'] else 'FAILS'}")
    if violation is not None:
        log(f"audit failure in {violation[0]}: {violation[1]}")
        return EXIT_AUDIT
    if not converged:
        return EXIT_NOT_CONVERGED
    if not (report["all_within_band"] and report["all_orderings_hold"]):
        return EXIT_AUDIT
    return EXIT_OK


def cmd_verify(problem_id, seed=0, log=print):
    if problem_id not in PROBLEM_IDS:
        log(f"error: unknown problem {problem_id!r}")
        return EXIT_CONFIG
    problem = get_problem(problem_id)
    if problem.reference is None:
        log(f"error: no reference fixture for {problem_id}")
        return EXIT_FIXTURE
    return report_checks(verify_problem(problem, seed=seed), log)


def report_checks(checks, log=print):
    for c in checks:
        log(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_AUDIT


def build_parser():
    parser = argparse.ArgumentParser(prog="mdopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run algorithms on one problem")
    run.add_argument("--problem")
    run.add_argument("--alg", action="append", default=[],
                     help=f"algorithm id, repeatable or comma separated ({', '.join(ALGORITHMS)})")
    run.add_argument("--eps", action="append", default=[], help="accuracy, e.g. 0.5 or 1/2; repeatable")
    run.add_argument("--audit", action="store_true", help="check the one-step inequality on every step")
    run.add_argument("--out", default="mdopt-out")
    run.add_argument("--config", help="JSON file with BenchConfig fields")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--selection", choices=("first", "max"), default="first",
                     help="constraint selection rule for alg6")
    run.add_argument("--cap", type=int, default=DEFAULT_CAP,
                     help="iteration cap for the adaptive stopping rules")
    run.add_argument("--no-trace", action="store_true")
    run.add_argument("--with-timing", action="store_true", help="add the wall_ms column")

    suite = sub.add_parser("suite", help="reproduce a comparison table")
    suite.add_argument("name", choices=tuple(PUBLISHED))
    suite.add_argument("--out", default="mdopt-out")
    suite.add_argument("--audit", action="store_true")
    suite.add_argument("--traces", action="store_true", help="also write JSONL traces")
    suite.add_argument("--with-timing", action="store_true")

    ver = sub.add_parser("verify", help="run the invariant battery on a problem")
    ver.add_argument("--problem", required=True)
    ver.add_argument("--seed", type=int, default=0)
    return parser


def _split(values):
    return [v.strip() for item in values for v in item.split(",") if v.strip()]


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            if args.config:
                config = BenchConfig.from_json(args.config)
            else:
                config = BenchConfig(
                    problem=args.problem or "",
                    algorithms=_split(args.alg),
                    eps_list=[parse_eps(e) for e in _split(args.eps)],
                    audit=args.audit,
                    seed=args.seed,
                    output_dir=args.out,
                    traces=not args.no_trace,
                    with_timing=args.with_timing,
                    selection=args.selection,
                    cap=args.cap,
                )
            return cmd_run(config)
        if args.command == "suite":
            return cmd_suite(args.name, args.out, audit=args.audit, traces=args.traces,
                             with_timing=args.with_timing)
        return cmd_verify(args.problem, seed=args.seed)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MDOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AUDIT


if __name__ == "__main__":
    sys.exit(main())
