"""Benchmark instances: constrained Fermat-Torricelli-Steiner problems, the
strongly convex suite, and a one-dimensional toy used for hand checks.

Every problem bundles its oracles with the constants the solvers consume
(``theta0``, ``M_g``, ``mu``, ``R0``) and, when loaded from a fixture, a
reference optimum computed by :func:`compute_reference`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exceptions import InfeasibleReference, InvalidArgument
from .oracles import (
    ConstraintOracle,
    FunctionOracle,
    linear_oracle,
    max_oracle,
    quadratic_oracle,
)
from .prox import FeasibleSet, ball, box, euclidean_setup, project

__all__ = [
    "Problem",
    "FTS_ANCHORS",
    "SC_CONSTRAINT_ROWS",
    "toy_problem",
    "fts_quadratic",
    "fts_nonsmooth",
    "strongly_convex_suite",
    "strongly_convex_example",
    "compute_reference",
    "get_problem",
    "PROBLEM_IDS",
    "FIXTURE_DIR",
    "load_fixture",
    "save_fixture",
    "fixture_path",
]

FIXTURE_DIR = Path(__file__).parent / "fixtures"

# Anchor points A_k of the Fermat-Torricelli-Steiner objective, one per row.
FTS_ANCHORS = np.array(
    [
        [1, 2, 1, 4, 1, 0, 4, 4, 4, 3],
        [2, 4, 3, 1, 0, 2, 4, 0, 4, 0],
        [3, 2, 3, 4, 3, 0, 3, 4, 2, 3],
        [0, 0, 2, 0, 2, 4, 4, 1, 0, 0],
        [3, 3, 4, 4, 3, 0, 1, 0, 4, 4],
        [2, 2, 4, 0, 4, 0, 2, 2, 1, 1],
        [0, 4, 3, 4, 2, 3, 3, 4, 0, 2],
        [2, 2, 1, 4, 2, 1, 4, 3, 0, 3],
        [4, 1, 2, 2, 3, 3, 2, 1, 3, 1],
        [3, 3, 2, 2, 0, 0, 4, 0, 3, 4],
    ],
    dtype=float,
)

# Rows alpha_i of the shared constraint max_i <alpha_i, x> + |x|^2 / 2.
SC_CONSTRAINT_ROWS = np.array(
    [
        [1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
        [7, 8, 6, 2, 9, 2, 3, 3, 2, 6],
        [6, 3, 4, 3, 5, 1, 6, 3, 2, 8],
        [3, 5, 2, 7, 8, 3, 2, 1, 5, 2],
        [2, 3, 1, 8, 1, 2, 1, 1, 5, 8],
        [1, 8, 9, 1, 3, 5, 1, 3, 5, 2],
        [1, 7, 8, 5, 5, 9, 3, 1, 6, 4],
        [7, 3, 5, 8, 9, 1, 8, 7, 8, 8],
        [6, 4, 6, 2, 9, 2, 3, 1, 6, 3],
        [2, 3, 4, 4, 2, 1, 9, 1, 1, 8],
    ],
    dtype=float,
)


@dataclass(frozen=True)
class Problem:
    """``min f(x)`` subject to ``g_i(x) <= 0`` and ``x in X``."""

    name: str
    dim: int
    objective: FunctionOracle
    constraints: ConstraintOracle
    feasible_set: FeasibleSet
    theta0: float
    x0: np.ndarray
    mu: float = 0.0
    R0: float | None = None
    reference: dict | None = None
    data: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def M_g(self):
        return self.constraints.M_g

    @property
    def theta0_sq(self):
        return self.theta0**2

    @property
    def constraint(self):
        """The aggregated single constraint ``max_i g_i``."""
        return self.constraints.aggregate()

    def g_max(self, x):
        return float(np.max(self.constraints.values(x)))

    def prox_setup(self):
        return euclidean_setup(self.feasible_set)

    def with_reference(self, x_star, f_star, note=""):
        ref = {"x_star": np.asarray(x_star, dtype=float), "f_star": float(f_star), "note": note}
        return replace(self, reference=ref)


def _problem(name, objective, constraints, fset, theta0, x0, **kw):
    x0 = np.asarray(x0, dtype=float)
    if not fset.contains(x0):
        raise InvalidArgument(f"{name}: starting point outside the feasible set")
    return Problem(name, fset.dim, objective, constraints, fset, float(theta0), x0, **kw)


# --- toy ---------------------------------------------------------------------


def toy_problem():
    """``min x`` s.t. ``x - 0.5 <= 0`` on ``[-1, 1]``; optimum at ``-1``.

    Theta0^2 = 0.5 so the adaptive stopping rule fires after exactly
    ``2 * 0.5 / eps^2`` all-productive steps.
    """
    f = linear_oracle([1.0], name="x")
    f = replace(f, lipschitz=1.0)
    g = linear_oracle([1.0], -0.5, name="x-0.5")
    return _problem(
        "toy",
        f,
        ConstraintOracle((g,), 1.0),
        box([-1.0], [1.0]),
        math.sqrt(0.5),
        [0.0],
        data={"family": "toy"},
        notes="M_g = 1: the constraint is linear with unit slope.",
    )


# --- Fermat-Torricelli-Steiner -------------------------------------------------


def _fts_objective(anchors):
    anchors = np.asarray(anchors, dtype=float)

    def value(x):
        return float(np.linalg.norm(x - anchors, axis=1).sum())

    def subgrad(x):
        diff = x - anchors
        dist = np.linalg.norm(diff, axis=1)
        # At an anchor its term contributes the zero subgradient.
        safe = np.where(dist > 0, dist, 1.0)
        return (diff / safe[:, None] * (dist > 0)[:, None]).sum(axis=0)

    return FunctionOracle(
        value,
        subgrad,
        anchors.shape[1],
        lipschitz=float(anchors.shape[0]),
        name="sum_k |x - A_k|",
    )


def _fts_geometry(unit_ball):
    n = FTS_ANCHORS.shape[1]
    if unit_ball:
        return ball(n, 1.0), np.ones(n) / math.sqrt(n), 1.0
    return ball(n, math.sqrt(n)), np.ones(n), math.sqrt(n)


def fts_quadratic(unit_ball=False):
    """Sum of distances to the ten anchors under ``|x|^2 + x_i^2 - 1 <= 0``.

    The default geometry is the ball of radius sqrt(10) so that the
    starting point (1, ..., 1) is admissible. On a ball of radius r the
    gradient ``2x + 2 x_i e_i`` has norm at most ``4r``, hence
    ``M_g = 4 sqrt(10)``. ``unit_ball=True`` gives the variant on the unit
    ball started from (1, ..., 1)/sqrt(10), with ``M_g = 4``.
    """
    fset, x0, radius = _fts_geometry(unit_ball)
    n = fset.dim
    members = []
    for i in range(n):
        Ai = 2.0 * np.eye(n)
        Ai[i, i] += 2.0
        members.append(quadratic_oracle(Ai, np.zeros(n), -1.0, name=f"g{i + 1}"))

    def values(x):
        return float(x @ x) + x * x - 1.0

    cons = ConstraintOracle(tuple(members), 4.0 * radius, values_fn=values)
    name = "fts-quadratic-unit" if unit_ball else "fts-quadratic"
    return _problem(
        name,
        _fts_objective(FTS_ANCHORS),
        cons,
        fset,
        3.0,
        x0,
        data={"family": "fts-quadratic", "unit_ball": unit_ball, "anchors": FTS_ANCHORS},
        notes=f"M_g = 4 * radius = {4.0 * radius!r}; M_f = 10 (ten unit-norm terms).",
    )


def _abs_weighted(w, name):
    w = np.asarray(w, dtype=float)

    def value(x):
        return float(w @ np.abs(x)) - 1.0

    def subgrad(x):
        # sign(0) = 0 is a valid choice inside [-w_j, w_j].
        return w * np.sign(x)

    return FunctionOracle(value, subgrad, len(w), lipschitz=float(np.linalg.norm(w)), name=name)


def fts_nonsmooth(unit_ball=False):
    """Same objective and geometry with ``sum_j W_ij |x_j| - 1 <= 0``.

    Row i of ``W`` is all ones except ``i + 2`` on the diagonal (weights
    2, 3, ..., 11). Since ``|g_i(x) - g_i(y)| <= |W_i| |x - y|``, the
    constant is the largest row norm: ``M_g = sqrt(11^2 + 9) = sqrt(130)``.
    The subgradient of ``|.|`` at 0 is taken as 0.
    """
    fset, x0, _ = _fts_geometry(unit_ball)
    n = fset.dim
    W = np.ones((n, n)) + np.diag(np.arange(1.0, n + 1))
    members = tuple(_abs_weighted(W[i], f"g{i + 1}") for i in range(n))

    def values(x):
        return W @ np.abs(x) - 1.0

    M_g = float(np.linalg.norm(W, axis=1).max())
    name = "fts-nonsmooth-unit" if unit_ball else "fts-nonsmooth"
    return _problem(
        name,
        _fts_objective(FTS_ANCHORS),
        ConstraintOracle(members, M_g, values_fn=values),
        fset,
        3.0,
        x0,
        data={"family": "fts-nonsmooth", "unit_ball": unit_ball, "anchors": FTS_ANCHORS, "weights": W},
        notes="M_g = max row norm of W = sqrt(130); subgradient of |x_j| at 0 is 0.",
    )


# --- strongly convex suite -------------------------------------------------------

SC_MU = 1.0
SC_THETA0 = 3.0
SC_R0 = 2.0
SC_EX1_L = 10_000.0
SC_EX2_DIAGS = np.array(
    [
        [1, 1, 2, 4, 1, 5, 3, 2, 4, 8],
        [2, 1, 3, 4, 2, 5, 1, 6, 7, 2],
        [1, 1, 2, 3, 5, 1, 4, 2, 3, 6],
    ],
    dtype=float,
)
SC_EX3_A = np.array(
    [
        [5, 3, 3, 5, 4, 4, 3, 3, 5, 1],
        [2, 4, 3, 5, 3, 4, 2, 2, 5, 4],
        [5, 2, 1, 4, 1, 1, 2, 3, 5, 5],
    ],
    dtype=float,
)
SC_EX3_B = np.array([1.0, 2.0, 3.0])
SC_EX5_A = np.array(
    [
        [9, 2, 4, 2, 2, 3, 6, 3, 5, 5],
        [6, 7, 2, 4, 8, 6, 8, 8, 5, 1],
    ],
    dtype=float,
)
SC_EX5_B = np.array([1.0, 2.0])
SC_EX5_LAMBDA = 0.05
SC_EX5_TAU = 1e-4


def _sc_constraint(rows):
    rows = np.asarray(rows, dtype=float)

    def value(x):
        return float(np.max(rows @ x)) + 0.5 * float(x @ x)

    def subgrad(x):
        return rows[int(np.argmax(rows @ x))] + x

    # On the unit ball |alpha_i + x| <= |alpha_i| + 1.
    M_g = float(np.linalg.norm(rows, axis=1).max()) + 1.0
    g = FunctionOracle(value, subgrad, rows.shape[1], lipschitz=M_g, lipschitz_grad=1.0, mu=1.0,
                       name="max_i <a_i, x> + |x|^2/2")
    return ConstraintOracle((g,), M_g)


def _chain_quadratic(n, L, mu):
    # x_1^2 + sum (x_i - x_{i+1})^2 as x^T Q x.
    Q = np.zeros((n, n))
    Q[0, 0] = 1.0
    for i in range(n - 1):
        Q[i, i] += 1.0
        Q[i + 1, i + 1] += 1.0
        Q[i, i + 1] -= 1.0
        Q[i + 1, i] -= 1.0
    c = (L - mu) / 4.0
    e1 = np.zeros(n)
    e1[0] = 1.0
    return quadratic_oracle(c * Q + mu * np.eye(n), c * e1, 0.0, name="worst-case chain")


def _regression(A, b, mu, name="regression"):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)

    def value(x):
        r = A @ x - b
        return 0.5 * float(r @ r) + 0.5 * mu * float(x @ x)

    def subgrad(x):
        return A.T @ (A @ x - b) + mu * x

    L = float(np.linalg.eigvalsh(A.T @ A)[-1]) + mu
    return FunctionOracle(value, subgrad, A.shape[1], lipschitz_grad=L, mu=mu, name=name)


def _quartic(n):
    w = np.arange(1.0, n + 1)

    def value(x):
        return float(w @ x**4) + 0.5 * float(x @ x)

    def subgrad(x):
        return 4.0 * w * x**3 + x

    # Hessian diag 12 w x^2 + 1 is at most 12 n + 1 on the unit ball.
    return FunctionOracle(value, subgrad, n, lipschitz_grad=12.0 * n + 1.0, mu=1.0,
                          name="sum i x_i^4 + |x|^2/2")


def huber_l1(x, tau):
    """Smoothed l1 norm: ``|x| - tau/2`` if ``|x| >= tau`` else ``x^2/(2 tau)``."""
    a = np.abs(x)
    return float(np.where(a >= tau, a - 0.5 * tau, x * x / (2.0 * tau)).sum())


def _huber_l1_grad(x, tau):
    return np.where(np.abs(x) >= tau, np.sign(x), x / tau)


def _denoising(A, b, lam, tau, mu):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)

    def value(x):
        r = A @ x - b
        return 0.5 * float(r @ r) + lam * huber_l1(x, tau) + 0.5 * mu * float(x @ x)

    def subgrad(x):
        return A.T @ (A @ x - b) + lam * _huber_l1_grad(x, tau) + mu * x

    L = float(np.linalg.eigvalsh(A.T @ A)[-1]) + lam / tau + mu
    return FunctionOracle(value, subgrad, A.shape[1], lipschitz_grad=L, mu=mu,
                          name="smoothed denoising")


def _sc_objective(k):
    n = 10
    if k == 1:
        return _chain_quadratic(n, SC_EX1_L, SC_MU)
    if k == 2:
        parts = [
            quadratic_oracle(np.diag(SC_EX2_DIAGS[j]), np.arange(10.0 * j + 1, 10.0 * j + 11), 5.0 + j,
                             name=f"f{j + 1}")
            for j in range(3)
        ]
        return max_oracle(parts)
    if k == 3:
        return _regression(SC_EX3_A, SC_EX3_B, SC_MU)
    if k == 4:
        return _quartic(n)
    if k == 5:
        return _denoising(SC_EX5_A, SC_EX5_B, SC_EX5_LAMBDA, SC_EX5_TAU, SC_MU)
    raise InvalidArgument(f"no strongly convex example {k}")


def strongly_convex_example(k):
    """Example ``k`` (1..5) of the strongly convex suite on the unit ball."""
    n = 10
    return _problem(
        f"sc-ex{k}",
        _sc_objective(k),
        _sc_constraint(SC_CONSTRAINT_ROWS),
        ball(n, 1.0),
        SC_THETA0,
        np.ones(n) / math.sqrt(n),
        mu=SC_MU,
        R0=SC_R0,
        data={"family": "sc", "example": k, "constraint_rows": SC_CONSTRAINT_ROWS},
        notes="M_g = max_i |alpha_i| + 1 (gradient alpha_i + x on the unit ball).",
    )


def strongly_convex_suite():
    return [strongly_convex_example(k) for k in range(1, 6)]


# --- registry and fixtures ------------------------------------------------------

_BUILDERS = {
    "toy": toy_problem,
    "fts-quadratic": fts_quadratic,
    "fts-quadratic-unit": lambda: fts_quadratic(unit_ball=True),
    "fts-nonsmooth": fts_nonsmooth,
    "fts-nonsmooth-unit": lambda: fts_nonsmooth(unit_ball=True),
    **{f"sc-ex{k}": (lambda k=k: strongly_convex_example(k)) for k in range(1, 6)},
}

PROBLEM_IDS = tuple(_BUILDERS)


def fixture_path(name, directory=None):
    return Path(directory or FIXTURE_DIR) / f"{name}.json"


def get_problem(name, with_reference=True, fixture_dir=None):
    """Build a problem by id, attaching its committed reference if present."""
    if name not in _BUILDERS:
        raise InvalidArgument(f"unknown problem {name!r}; known: {', '.join(PROBLEM_IDS)}")
    prob = _BUILDERS[name]()
    if with_reference:
        path = fixture_path(name, fixture_dir)
        if path.exists():
            prob = load_fixture(path)
    return prob


def _enc(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return repr(float(a))
    return [_enc(row) for row in a]


def _dec(v):
    if isinstance(v, str):
        return float(v)
    return np.array([_dec(u) for u in v], dtype=float)


def save_fixture(problem, path, budget=None, residual=None, overwrite=False):
    """Write ``problem`` and its reference optimum as JSON.

    Reals are stored as ``repr`` strings so that a reload is bit-exact.
    Refuses to overwrite an existing file unless asked.
    """
    path = Path(path)
    if path.exists() and not overwrite:
        raise FileExistsError(f"fixture {path} exists; pass overwrite=True to replace it")
    matrices, vectors, flags = {}, {}, {}
    for key, val in problem.data.items():
        if isinstance(val, np.ndarray):
            (matrices if val.ndim == 2 else vectors)[key] = _enc(val)
        else:
            flags[key] = val
    constants = {
        "theta0": repr(problem.theta0),
        "M_g": repr(problem.M_g),
        "mu": repr(problem.mu),
        "R0": None if problem.R0 is None else repr(problem.R0),
        "x0": _enc(problem.x0),
        "feasible_set": problem.feasible_set.to_dict(),
    }
    ref = None
    if problem.reference is not None:
        ref = {
            "x_star": _enc(problem.reference["x_star"]),
            "f_star": repr(float(problem.reference["f_star"])),
            "note": problem.reference.get("note", ""),
            "budget": budget if budget is not None else problem.reference.get("budget"),
            "constraint_residual": None if residual is None else repr(float(residual)),
        }
    payload = {
        "name": problem.name,
        "dim": problem.dim,
        "family": flags,
        "matrices": matrices,
        "vectors": vectors,
        "constants": constants,
        "reference_opt": ref,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


def load_fixture(path):
    """Rebuild a problem from a fixture, checking the stored data matches."""
    payload = json.loads(Path(path).read_text())
    name = payload["name"]
    if name not in _BUILDERS:
        raise InvalidArgument(f"fixture {path} names unknown problem {name!r}")
    prob = _BUILDERS[name]()
    for key, enc in {**payload["matrices"], **payload["vectors"]}.items():
        if not np.array_equal(_dec(enc), prob.data.get(key)):
            raise InvalidArgument(f"fixture {path}: stored {key!r} differs from the built problem")
    consts = payload["constants"]
    if float(consts["theta0"]) != prob.theta0 or float(consts["M_g"]) != prob.M_g:
        raise InvalidArgument(f"fixture {path}: constants differ from the built problem")
    ref = payload.get("reference_opt")
    if ref:
        prob = replace(prob, reference={
            "x_star": _dec(ref["x_star"]),
            "f_star": float(ref["f_star"]),
            "note": ref.get("note", ""),
            "budget": ref.get("budget"),
        })
    return prob


# --- reference optimum -----------------------------------------------------------


def _bisect_feasible(problem, x, anchor, iters=200):
    # Largest step from the feasible anchor toward x that keeps max g <= 0.
    lo, hi = 0.0, 1.0
    if problem.g_max(x) <= 0:
        return x
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if problem.g_max(anchor + mid * (x - anchor)) <= 0:
            lo = mid
        else:
            hi = mid
    return anchor + lo * (x - anchor)


def compute_reference(problem, budget=200_000, rounds=8, slater=None):
    """High-accuracy optimum by a restarted projected subgradient method.

    Minimizes the exact-penalty function ``max(f(x) - f_best, g(x))``
    where ``f_best`` is the best objective value seen at a feasible point.
    Normalized steps ``D / sqrt(k + 1)`` are used, and the radius ``D``
    shrinks by 4 each round, restarting from the incumbent. The incumbent
    is then polished by bisection toward a Slater point so that every
    ``g_i`` is at most 0.

    Returns ``{"x_star", "f_star", "budget", "residual"}``.
    """
    if budget < 100_000:
        raise InvalidArgument("compute_reference needs a budget of at least 1e5")
    fset = problem.feasible_set
    f = problem.objective
    g = problem.constraint
    if fset.kind == "ball":
        D = 2.0 * fset.radius
    elif fset.kind == "box":
        D = float(np.linalg.norm(fset.upper - fset.lower))
    else:
        D = 2.0 * max(1.0, float(np.linalg.norm(problem.x0)))
    if slater is None:
        slater = project(fset, np.zeros(problem.dim))

    best_x, best_f = None, math.inf
    x = project(fset, problem.x0)
    per_round = budget // rounds
    for _ in range(rounds):
        for k in range(per_round):
            gv = g.value(x)
            if gv <= 0.0:
                fv = f.value(x)
                if fv < best_f:
                    best_f, best_x = fv, x.copy()
                use_f = best_x is None or fv - best_f >= gv
            else:
                use_f = best_x is not None and f.value(x) - best_f >= gv
            s = f.subgrad(x) if use_f else g.subgrad(x)
            ns = float(np.linalg.norm(s))
            if ns == 0.0:
                if not use_f:
                    break
                s, ns = g.subgrad(x), float(np.linalg.norm(g.subgrad(x))) or 1.0
            x = project(fset, x - (D / math.sqrt(k + 1.0)) * s / ns)
        if best_x is not None:
            x = best_x.copy()
        D /= 4.0

    if best_x is None:
        if problem.g_max(slater) > 0:
            raise InfeasibleReference(f"{problem.name}: no feasible point found")
        best_x = slater
    x_star = _bisect_feasible(problem, best_x, slater)
    residual = problem.g_max(x_star)
    if residual > 1e-6:
        raise InfeasibleReference(f"{problem.name}: polished point violates constraints by {residual}")
    return {"x_star": x_star, "f_star": f.value(x_star), "budget": budget, "residual": residual}
