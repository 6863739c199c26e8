"""Restart schemes for strongly convex problems.

Each restart ``p`` re-runs an inner solver from the previous output
``x^{p-1}`` with the prox-function recentered there and rescaled by
``R_{p-1}``, at accuracy ``eps_p = mu R_p^2 / 2`` where
``R_p^2 = R_0^2 2^{-p}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgument, IterationCapReached
from .prox import shifted_scaled
from .solvers import DEFAULT_CAP, solve_adaptive, solve_partially_adaptive

__all__ = ["RestartStep", "RestartReport", "solve_restarted", "contraction_audit", "restart_count"]

INNER = ("adaptive", "partially_adaptive")


@dataclass
class RestartStep:
    p: int
    R_p: float
    eps_p: float
    inner: object
    x_p: np.ndarray


@dataclass
class RestartReport:
    chain: list
    p_hat: int
    total_inner_iterations: int
    output: np.ndarray
    x0: np.ndarray
    R0: float
    mu: float
    eps: float
    inner: str = "adaptive"
    zero_restarts: bool = False
    complete: bool = True
    extra: dict = field(default_factory=dict)

    def points(self):
        """``[(p, x^p)]`` including ``p = 0``."""
        return [(0, self.x0)] + [(s.p, s.x_p) for s in self.chain]

    def to_dict(self):
        return {
            "inner": self.inner,
            "eps": self.eps,
            "mu": self.mu,
            "R0": self.R0,
            "p_hat": self.p_hat,
            "restarts": len(self.chain),
            "zero_restarts": self.zero_restarts,
            "complete": self.complete,
            "total_inner_iterations": self.total_inner_iterations,
            "output": [float(v) for v in self.output],
            "chain": [
                {
                    "p": s.p,
                    "R_p": s.R_p,
                    "R_p_sq": s.R_p**2,
                    "eps_p": s.eps_p,
                    "iterations": s.inner.iterations,
                    "productive": s.inner.productive_count,
                    "stop_reason": s.inner.stop_reason,
                    "x_p": [float(v) for v in s.x_p],
                }
                for s in self.chain
            ],
        }


def restart_count(mu, R0, eps):
    """``ceil(log2(mu R0^2 / (2 eps)))``."""
    return math.ceil(math.log2(mu * R0**2 / (2.0 * eps)))


def solve_restarted(problem, inner="adaptive", eps=0.05, *, setup=None, full_schedule=False,
                    scaled_step_norm=False, cap=DEFAULT_CAP, audit=False, keep_trace=False):
    """Restarted mirror descent for ``mu``-strongly convex problems.

    The loop runs while ``p <= log2(mu R0^2 / (2 eps))``, so it performs
    ``floor`` of that many restarts, and none at all when
    ``eps >= mu R0^2 / 2``. With ``full_schedule=True`` it runs through
    ``p_hat = ceil(...)`` instead, which makes the last radius satisfy
    ``R_p^2 <= 2 eps / mu``.

    Inner mirror steps use the recentered, rescaled prox-function. By
    default step sizes and stopping sums use the Euclidean dual norm of the
    base setup; ``scaled_step_norm=True`` switches to the dual norm of the
    rescaled geometry (``R_{p-1} |.|``), and for the partially adaptive
    inner method rescales ``M_g`` to match.
    """
    if inner not in INNER:
        raise InvalidArgument(f"inner must be one of {INNER}, got {inner!r}")
    if not problem.mu > 0:
        raise InvalidArgument("restarts need a strongly convex problem (mu > 0)")
    if problem.R0 is None or not problem.R0 > 0:
        raise InvalidArgument("restarts need R0 with |x0 - x*| <= R0")
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    if problem.theta0_sq < 0.5:
        # The Euclidean d equals 1/2 on the unit sphere of its own norm.
        raise InvalidArgument("Theta0^2 must be at least 1/2 to bound d on the unit ball")
    base = setup or problem.prox_setup()
    mu, R0 = problem.mu, problem.R0
    level = math.log2(mu * R0**2 / (2.0 * eps))
    p_hat = math.ceil(level)
    last = p_hat if full_schedule else math.floor(level)

    x = problem.x0.copy()
    current = shifted_scaled(base, x, R0)
    R_prev = R0
    chain = []
    total = 0
    report = RestartReport(chain, p_hat, 0, x, problem.x0.copy(), R0, mu, eps, inner,
                           zero_restarts=last < 1)
    for p in range(1, last + 1):
        R_p = R0 * 2.0 ** (-p / 2.0)
        R_p_sq = R0**2 * 2.0**-p
        eps_p = mu * R_p_sq / 2.0
        step_norm = None if scaled_step_norm else base.dual_norm
        if inner == "adaptive":
            res = solve_adaptive(problem, current, eps_p, x, cap, step_norm=step_norm,
                                 audit=audit, keep_trace=keep_trace)
        else:
            M_g = problem.M_g * (current.scale / base.scale if scaled_step_norm else 1.0)
            res = solve_partially_adaptive(problem, current, eps_p, x, M_g=M_g, step_norm=step_norm,
                                           audit=audit, keep_trace=keep_trace)
        total += res.iterations
        x = res.output.copy()
        chain.append(RestartStep(p, R_p, eps_p, res, x))
        report.total_inner_iterations = total
        report.output = x
        if res.stop_reason == "iteration_cap":
            report.complete = False
            raise IterationCapReached(f"inner run {p} hit the iteration cap", report=report)
        current = shifted_scaled(base, x, R_p)
        R_prev = R_p
    report.extra["last_radius"] = R_prev
    return report


def contraction_audit(report, x_star, tol=1e-6):
    """``[(p, |x^p - x*|^2 <= R_p^2 + tol)]`` for ``p = 0, 1, ...``."""
    x_star = np.asarray(x_star, dtype=float)
    out = []
    for p, xp in report.points():
        bound = report.R0**2 * 2.0**-p
        dist_sq = float(np.sum((np.asarray(xp) - x_star) ** 2))
        out.append((p, dist_sq <= bound + tol))
    return out
