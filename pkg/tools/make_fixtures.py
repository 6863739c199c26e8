"""Regenerate the committed reference fixtures.

    python tools/make_fixtures.py [--budget 1000000] [--only sc-ex1 ...] [--overwrite]

Each problem is solved by ``compute_reference`` in its own process.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor

from mdopt.problems import FIXTURE_DIR, PROBLEM_IDS, compute_reference, get_problem, save_fixture


def build(name, budget, overwrite):
    prob = get_problem(name, with_reference=False)
    ref = compute_reference(prob, budget=budget)
    path = save_fixture(prob.with_reference(ref["x_star"], ref["f_star"], note="compute_reference"), FIXTURE_DIR / f"{name}.json", budget=budget,
                        residual=ref["residual"], overwrite=overwrite)
    return f"{name}: f* = {ref['f_star']!r}, residual {ref['residual']:.2e} -> {path}"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=int, default=1_000_000)
    ap.add_argument("--only", nargs="*", default=list(PROBLEM_IDS))
    ap.add_argument("--overwrite", action="store_true")
    args = ap.parse_args()
    with ProcessPoolExecutor() as pool:
        futures = [pool.submit(build, n, args.budget, args.overwrite) for n in args.only]
        for fut in futures:
            print(fut.result())


if __name__ == "__main__":
    main()
