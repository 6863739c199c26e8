"""Adaptive mirror descent with productive / non-productive switching.

Four single-run methods share one loop:

* :func:`solve_adaptive`: adaptive steps and adaptive stopping;
* :func:`solve_partially_adaptive`: adaptive productive steps, fixed
  non-productive steps ``eps / M_g^2`` and a fixed iteration count;
* :func:`solve_lipschitz`: steps ``eps / M_N^2`` on both branches and a
  weighted-average output, suited to Lipschitz objectives;
* :func:`solve_multi_constraint`: steps on one selected violated
  constraint at a time.

A step is *productive* when the iterate is eps-feasible; it then moves
along the objective subgradient, otherwise along a constraint subgradient.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InfeasibilityCertificate, InvalidArgument, TheoryContradiction
from .oracles import first_violated, max_violated
from .prox import _mirror_step_unchecked, as_vector, bregman

__all__ = [
    "StepRecord",
    "RunResult",
    "AuditViolation",
    "solve_adaptive",
    "solve_partially_adaptive",
    "solve_lipschitz",
    "solve_multi_constraint",
    "v_f",
    "partial_iteration_count",
    "adaptive_iteration_bound",
    "lipschitz_iteration_bound",
    "probe_points",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 10_000_000
AUDIT_TOL = 1e-8
N_PROBES = 8

PRODUCTIVE = "productive"
NONPRODUCTIVE = "nonproductive"


@dataclass(frozen=True, slots=True)
class StepRecord:
    index: int
    kind: str
    step_size: float
    g_value: float
    grad_dual_norm: float
    f_value: float | None = None
    constraint_index: int | None = None

    def to_dict(self):
        return {
            "index": self.index,
            "kind": self.kind,
            "step_size": self.step_size,
            "constraint_index": self.constraint_index,
            "f_value": self.f_value,
            "g_value": self.g_value,
            "grad_dual_norm": self.grad_dual_norm,
        }


@dataclass(frozen=True)
class AuditViolation:
    """A step where the one-step mirror descent inequality failed."""

    index: int
    probe: int
    lhs: float
    rhs: float

    def __str__(self):
        return (f"step {self.index}, probe {self.probe}: "
                f"h<p, x - u> = {self.lhs!r} > h^2/2 |p|_*^2 + V(x,u) - V(z,u) = {self.rhs!r}")


@dataclass
class RunResult:
    output: np.ndarray
    output_rule: str
    iterations: int
    productive_count: int
    trace: list
    stop_reason: str
    wall_time: float
    algorithm: str = ""
    eps: float = 0.0
    productive_points: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    audit_violations: list = field(default_factory=list)

    @property
    def nonproductive_count(self):
        return self.iterations - self.productive_count

    @property
    def converged(self):
        return self.stop_reason in ("criterion_met", "zero_objective_gradient")


def v_f(problem, setup, x, y):
    """Normalized pairing ``<grad f(x) / |grad f(x)|_*, x - y>``; 0 at a zero gradient."""
    x = as_vector(x, setup.dim, "x")
    y = as_vector(y, setup.dim, "y")
    p = problem.objective.subgrad(x)
    nrm = setup.dual_norm(p)
    if nrm == 0.0:
        return 0.0
    return float(p @ (x - y)) / nrm


def partial_iteration_count(M_g, theta0_sq, eps):
    """``ceil(2 M_g^2 Theta0^2 / eps^2)``."""
    return math.ceil(2.0 * M_g**2 * theta0_sq / eps**2)


def adaptive_iteration_bound(M_g, theta0_sq, eps):
    """Worst-case iteration count of the adaptive method."""
    return math.ceil(2.0 * max(1.0, M_g**2) * theta0_sq / eps**2)


def lipschitz_iteration_bound(M_f, M_g, theta0_sq, eps):
    return math.ceil(2.0 * max(M_f**2, M_g**2) * theta0_sq / eps**2)


def probe_points(fset, count=N_PROBES, seed=0):
    """Fixed probe points in ``fset`` for the per-step audit."""
    return fset.sample(np.random.default_rng(seed), count)


_SELECTORS = {"first": first_violated, "max": max_violated}


def _run(problem, setup, eps, start, *, method, cap, step_norm, M_g=None,
         selection="first", audit=False, keep_trace=True):
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    x = as_vector(start, setup.dim, "start").copy()
    if not setup.feasible_set.contains(x):
        raise InvalidArgument("start point lies outside the feasible set")
    step_norm = step_norm or setup.dual_norm
    f = problem.objective
    cons = problem.constraints
    g = cons.aggregate() if method != "multi" else None
    select = _SELECTORS[selection] if method == "multi" else None
    theta0_sq = problem.theta0_sq
    target = 2.0 * theta0_sq / eps**2
    if method == "partial":
        if M_g is None:
            M_g = problem.M_g
        n_fixed = partial_iteration_count(M_g, theta0_sq, eps)

    probes = probe_points(setup.feasible_set) if audit else None
    violations = []
    trace = []
    prod_points, prod_h = [], []
    best_f, best_x = math.inf, None
    n_prod = 0
    # Adaptive criterion accumulates |I| + sum 1/|grad g|^2; the Lipschitz
    # variant accumulates sum 1/M_j^2. Both are compared against `target`.
    acc = 0.0
    stop = None
    t0 = time.perf_counter()
    N = 0
    while True:
        if method == "partial":
            if N >= n_fixed:
                stop = "criterion_met"
                break
        elif N >= cap:
            stop = "iteration_cap"
            break

        cidx = None
        if method == "multi":
            hit = select(cons, x, eps)
            productive = hit is None
            if hit is not None:
                cidx, gval = hit
            else:
                gval = float(np.max(cons.values(x)))
        else:
            gval = g.value(x)
            productive = gval <= eps

        if productive:
            p = f.subgrad(x)
            nrm = step_norm(p)
            if nrm == 0.0:
                stop = "zero_objective_gradient"
                best_x = x.copy()
                break
            fval = f.value(x)
            if method == "lipschitz":
                h = eps / nrm**2
                acc += 1.0 / nrm**2
            elif method == "partial":
                h = eps / (M_g * nrm)
            else:
                h = eps / nrm
                acc += 1.0
            if fval < best_f:
                best_f, best_x = fval, x.copy()
            prod_points.append(x.copy())
            prod_h.append(h)
            n_prod += 1
        else:
            fval = None
            p = cons.members[cidx].subgrad(x) if cidx is not None else g.subgrad(x)
            nrm = step_norm(p)
            if nrm == 0.0:
                raise InfeasibilityCertificate(
                    f"constraint violated by {gval} with a zero subgradient at step {N}",
                    index=cidx, x=x.copy())
            if method == "partial":
                h = eps / M_g**2
            else:
                h = eps / nrm**2
                acc += 1.0 / nrm**2

        z = _mirror_step_unchecked(setup, x, p, h)
        if audit:
            dual = setup.dual_norm(p)
            for j, u in enumerate(probes):
                lhs = h * float(p @ (x - u))
                rhs = 0.5 * h * h * dual * dual + bregman(setup, x, u) - bregman(setup, z, u)
                if lhs > rhs + AUDIT_TOL:
                    violations.append(AuditViolation(N, j, lhs, rhs))
        if keep_trace:
            trace.append(StepRecord(
                N, PRODUCTIVE if productive else NONPRODUCTIVE, h, gval, nrm, fval, cidx))
        x = z
        N += 1
        if method != "partial" and acc >= target:
            stop = "criterion_met"
            break
    wall = time.perf_counter() - t0

    points = np.array(prod_points) if prod_points else np.empty((0, setup.dim))
    if method == "lipschitz" and prod_points and stop != "zero_objective_gradient":
        w = np.asarray(prod_h)
        output, rule = (w @ points) / w.sum(), "weighted_average"
    elif best_x is not None:
        output, rule = best_x, "best_productive"
    else:
        output, rule = x.copy(), "last_iterate"

    if method == "partial" and n_prod == 0 and stop == "criterion_met":
        raise TheoryContradiction(
            f"no productive step in {N} iterations; check M_g and Theta0", trace=trace)

    return RunResult(
        output=output,
        output_rule=rule,
        iterations=N,
        productive_count=n_prod,
        trace=trace,
        stop_reason=stop,
        wall_time=wall,
        algorithm=method,
        eps=eps,
        productive_points=points,
        audit_violations=violations,
    )


def solve_adaptive(problem, setup, eps, start=None, cap=DEFAULT_CAP, *, step_norm=None,
                   audit=False, keep_trace=True):
    """Adaptive mirror descent on the aggregated constraint ``max_i g_i``.

    Productive step ``h = eps / |grad f|_*``, non-productive step
    ``h = eps / |grad g|_*^2``. Stops once
    ``Theta0^2 <= eps^2/2 * (|I| + sum_{k not in I} 1/|grad g(x^k)|_*^2)``
    and returns the productive iterate with the smallest objective.

    ``step_norm`` overrides the dual norm used in step sizes and in the
    stopping rule (the audit always uses ``setup.dual_norm``).
    """
    start = problem.x0 if start is None else start
    return _run(problem, setup, eps, start, method="adaptive", cap=cap, step_norm=step_norm,
                audit=audit, keep_trace=keep_trace)


def solve_partially_adaptive(problem, setup, eps, start=None, *, M_g=None, step_norm=None,
                             audit=False, keep_trace=True):
    """Partially adaptive variant with ``ceil(2 M_g^2 Theta0^2 / eps^2)`` steps.

    Productive step ``eps / (M_g |grad f|_*)``, non-productive step
    ``eps / M_g^2``. Raises :class:`TheoryContradiction` if no step was
    productive.
    """
    start = problem.x0 if start is None else start
    return _run(problem, setup, eps, start, method="partial", cap=None, step_norm=step_norm,
                M_g=M_g, audit=audit, keep_trace=keep_trace)


def solve_lipschitz(problem, setup, eps, start=None, cap=DEFAULT_CAP, *, step_norm=None,
                    audit=False, keep_trace=True):
    """Mirror descent for Lipschitz objectives.

    Both branches use ``h = eps / M_N^2`` with ``M_N`` the dual norm of the
    chosen subgradient; stops when ``sum_j 1/M_j^2 >= 2 Theta0^2 / eps^2``
    and outputs the ``h``-weighted average of the productive iterates.
    """
    start = problem.x0 if start is None else start
    return _run(problem, setup, eps, start, method="lipschitz", cap=cap, step_norm=step_norm,
                audit=audit, keep_trace=keep_trace)


def solve_multi_constraint(problem, setup, eps, start=None, cap=DEFAULT_CAP, *,
                           selection="first", step_norm=None, audit=False, keep_trace=True):
    """Adaptive mirror descent stepping on one violated constraint at a time.

    ``selection`` picks the constraint ``m(N)`` among those with
    ``g_i > eps``: ``"first"`` (lowest index, the default) or ``"max"``
    (most violated, ties to the lowest index).
    """
    if selection not in _SELECTORS:
        raise InvalidArgument(f"unknown selection rule {selection!r}")
    start = problem.x0 if start is None else start
    return _run(problem, setup, eps, start, method="multi", cap=cap, step_norm=step_norm,
                selection=selection, audit=audit, keep_trace=keep_trace)
