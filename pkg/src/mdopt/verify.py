"""Invariant battery run against a problem and its reference optimum.

Each check returns a :class:`Check`; :func:`verify_problem` runs the ones
that apply to the problem at hand.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prox import bregman
from .restarts import contraction_audit, solve_restarted
from .solvers import solve_adaptive, solve_partially_adaptive, v_f

__all__ = [
    "Check",
    "subgradient_certificate",
    "lipschitz_sampling",
    "theta0_validity",
    "reference_feasibility",
    "vf_certificate_adaptive",
    "vf_certificate_partial",
    "objective_gap_adaptive",
    "objective_gap_partial",
    "restart_contraction",
    "verify_problem",
    "VERIFY_EPS",
]

# Accuracies for the solver-based checks, per problem family.
VERIFY_EPS = {"toy": 0.1, "fts-quadratic": 0.5, "fts-nonsmooth": 0.5, "sc": 0.5}
RESTART_EPS = 0.05
FIXTURE_TOL = 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _pairs(problem, rng, count):
    pts = problem.feasible_set.sample(rng, 2 * count)
    return pts[:count], pts[count:]


def subgradient_certificate(problem, n_pairs=1000, seed=0, tol=1e-8):
    """``f(y) >= f(x) + <s(x), y - x> - tol`` for the objective and every constraint."""
    rng = np.random.default_rng(seed)
    xs, ys = _pairs(problem, rng, n_pairs)
    worst = 0.0
    for oracle in (problem.objective, *problem.constraints.members):
        for x, y in zip(xs, ys):
            gap = oracle.value(x) + float(oracle.subgrad(x) @ (y - x)) - oracle.value(y)
            worst = max(worst, gap / max(1.0, abs(oracle.value(y))))
    return Check("subgradient certificate", worst <= tol, f"worst relative violation {worst:.3e}")


def lipschitz_sampling(problem, n_pairs=1000, seed=1):
    """``|g_i(x) - g_i(y)| <= M_g |x - y|`` on sampled pairs."""
    rng = np.random.default_rng(seed)
    xs, ys = _pairs(problem, rng, n_pairs)
    # Pairs concentrated near the boundary stress constants derived from the radius.
    near = problem.feasible_set.sample(rng, n_pairs)
    xs = np.vstack([xs, near])
    ys = np.vstack([ys, near + 1e-3 * rng.standard_normal(near.shape)])
    ys = np.array([problem.feasible_set.project(y) for y in ys])
    worst = 0.0
    for x, y in zip(xs, ys):
        dist = float(np.linalg.norm(x - y))
        if dist == 0.0:
            continue
        dv = np.abs(problem.constraints.values(x) - problem.constraints.values(y)).max()
        worst = max(worst, dv / dist)
    ok = worst <= problem.M_g * (1 + 1e-9)
    return Check("constraint Lipschitz sampling", ok, f"max ratio {worst:.4f} vs M_g {problem.M_g:.4f}")


def theta0_validity(problem):
    setup = problem.prox_setup()
    val = setup.d(problem.reference["x_star"])
    start = bregman(setup, problem.x0, problem.reference["x_star"])
    ok = val <= problem.theta0_sq and start <= problem.theta0_sq
    return Check("Theta0 validity", ok,
                 f"d(x*) = {val:.4f}, V(x0, x*) = {start:.4f}, Theta0^2 = {problem.theta0_sq:.4f}")


def reference_feasibility(problem, tol=FIXTURE_TOL):
    ref = problem.reference
    res = problem.g_max(ref["x_star"])
    inside = problem.feasible_set.contains(ref["x_star"])
    return Check("reference feasibility", res <= tol and inside, f"max g(x*) = {res:.3e}")


def _family(problem):
    return problem.data.get("family", problem.name)


def _min_vf(problem, setup, result, x_star):
    return min(v_f(problem, setup, xk, x_star) for xk in result.productive_points)


def vf_certificate_adaptive(problem, eps=None):
    eps = eps or VERIFY_EPS[_family(problem)]
    setup = problem.prox_setup()
    res = solve_adaptive(problem, setup, eps, keep_trace=False)
    m = _min_vf(problem, setup, res, problem.reference["x_star"])
    return Check("v_f certificate (adaptive)", m < eps + FIXTURE_TOL,
                 f"min v_f = {m:.4e} < eps = {eps}")


def vf_certificate_partial(problem, eps=None):
    eps = eps or VERIFY_EPS[_family(problem)]
    setup = problem.prox_setup()
    res = solve_partially_adaptive(problem, setup, eps, keep_trace=False)
    m = _min_vf(problem, setup, res, problem.reference["x_star"])
    bound = eps / problem.M_g
    return Check("v_f certificate (partially adaptive)", m < bound + FIXTURE_TOL,
                 f"min v_f = {m:.4e} < eps/M_g = {bound:.4e}")


def objective_gap_adaptive(problem, eps=None):
    """``f(out) - f* <= M_f eps`` for Lipschitz objectives."""
    M_f = problem.objective.lipschitz
    eps = eps or VERIFY_EPS[_family(problem)]
    res = solve_adaptive(problem, problem.prox_setup(), eps, keep_trace=False)
    gap = problem.objective.value(res.output) - problem.reference["f_star"]
    return Check("objective gap (adaptive, Lipschitz f)", gap <= M_f * eps + FIXTURE_TOL,
                 f"gap {gap:.4e} <= M_f eps = {M_f * eps:.4e}")


def objective_gap_partial(problem, eps=None):
    """``f(out) - f* <= |grad f(x*)| eps/M_g + L eps^2 / (2 M_g^2)`` for smooth objectives."""
    L = problem.objective.lipschitz_grad
    eps = eps or VERIFY_EPS[_family(problem)]
    res = solve_partially_adaptive(problem, problem.prox_setup(), eps, keep_trace=False)
    x_star = problem.reference["x_star"]
    grad_norm = float(np.linalg.norm(problem.objective.subgrad(x_star)))
    bound = grad_norm * eps / problem.M_g + L * eps**2 / (2 * problem.M_g**2)
    gap = problem.objective.value(res.output) - problem.reference["f_star"]
    return Check("objective gap (partially adaptive, smooth f)", gap <= bound + FIXTURE_TOL,
                 f"gap {gap:.4e} <= {bound:.4e}")


def restart_contraction(problem, eps=RESTART_EPS, inner="adaptive"):
    rep = solve_restarted(problem, inner, eps)
    x_star = problem.reference["x_star"]
    verdicts = contraction_audit(rep, x_star)
    final = float(np.sum((rep.output - x_star) ** 2))
    ok = all(v for _, v in verdicts) and final <= 2 * eps / problem.mu + FIXTURE_TOL
    failed = [p for p, v in verdicts if not v]
    return Check("restart contraction", ok,
                 f"{len(verdicts)} points, failed p = {failed}, final |x - x*|^2 = {final:.3e}")


def verify_problem(problem, seed=0):
    """Run every applicable check; the problem must carry a reference."""
    checks = [
        Check("start point in X", problem.feasible_set.contains(problem.x0)),
        subgradient_certificate(problem, seed=seed),
        lipschitz_sampling(problem, seed=seed + 1),
        reference_feasibility(problem),
        theta0_validity(problem),
        vf_certificate_adaptive(problem),
        vf_certificate_partial(problem),
    ]
    if problem.objective.lipschitz is not None:
        checks.append(objective_gap_adaptive(problem))
    if problem.objective.lipschitz_grad is not None:
        checks.append(objective_gap_partial(problem))
    if problem.mu > 0 and problem.R0 is not None:
        checks.append(restart_contraction(problem))
    return checks
