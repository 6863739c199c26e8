"""First-order oracles: a value and one subgradient per query."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import InvalidArgument

__all__ = [
    "FunctionOracle",
    "ConstraintOracle",
    "max_oracle",
    "quadratic_oracle",
    "linear_oracle",
    "max_violated",
    "first_violated",
]


@dataclass(frozen=True)
class FunctionOracle:
    """A convex function with a subgradient selector.

    ``lipschitz`` is ``M_f`` (bound on subgradient norms over the feasible
    set), ``lipschitz_grad`` is ``L`` for smooth functions, ``mu`` is the
    strong convexity modulus in the Euclidean norm.
    """

    value: Callable[[np.ndarray], float]
    subgrad: Callable[[np.ndarray], np.ndarray]
    dim: int
    lipschitz: float | None = None
    lipschitz_grad: float | None = None
    mu: float = 0.0
    name: str = ""

    def __call__(self, x):
        return self.value(x)


@dataclass(frozen=True)
class ConstraintOracle:
    """Constraints ``g_i(x) <= 0`` with a shared Lipschitz constant ``M_g``.

    ``values`` optionally evaluates every member at once; when absent the
    members are looped over.
    """

    members: tuple
    M_g: float
    values_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not self.members:
            raise InvalidArgument("a constraint oracle needs at least one member")
        if not self.M_g > 0:
            raise InvalidArgument("M_g must be positive")

    def __len__(self):
        return len(self.members)

    @property
    def dim(self):
        return self.members[0].dim

    def values(self, x):
        if self.values_fn is not None:
            return self.values_fn(x)
        return np.array([m.value(x) for m in self.members])

    def aggregate(self):
        """The single constraint ``g = max_i g_i``."""
        if len(self.members) == 1:
            return self.members[0]
        return max_oracle(self.members, values_fn=self.values_fn)


def max_oracle(parts, values_fn=None):
    """Pointwise maximum of ``parts``.

    The subgradient is taken from the lowest-indexed member attaining the
    maximum, compared exactly on the computed values.
    """
    parts = tuple(parts)
    if not parts:
        raise InvalidArgument("max_oracle needs at least one part")
    dim = parts[0].dim
    if any(p.dim != dim for p in parts):
        raise InvalidArgument("max_oracle parts differ in dimension")

    if values_fn is None:
        def values_fn(x):
            return np.array([p.value(x) for p in parts])

    def value(x):
        return float(np.max(values_fn(x)))

    def subgrad(x):
        return parts[int(np.argmax(values_fn(x)))].subgrad(x)

    def opt_max(attr):
        vals = [getattr(p, attr) for p in parts]
        return None if any(v is None for v in vals) else max(vals)

    return FunctionOracle(
        value,
        subgrad,
        dim,
        lipschitz=opt_max("lipschitz"),
        lipschitz_grad=opt_max("lipschitz_grad"),
        mu=min(p.mu for p in parts),
        name="max(" + ", ".join(p.name or "?" for p in parts) + ")",
    )


def quadratic_oracle(A, b, c=0.0, name="quadratic"):
    """``0.5 x^T A x - b^T x + c`` with gradient ``A x - b``.

    ``L`` and ``mu`` are the extreme eigenvalues of ``A``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    n = A.shape[0]
    if A.shape != (n, n) or b.shape != (n,):
        raise InvalidArgument(f"inconsistent shapes A{A.shape}, b{b.shape}")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise InvalidArgument("quadratic_oracle requires a symmetric matrix")
    eig = np.linalg.eigvalsh(A)
    c = float(c)

    def value(x):
        return 0.5 * float(x @ (A @ x)) - float(b @ x) + c

    def subgrad(x):
        return A @ x - b

    return FunctionOracle(
        value, subgrad, n,
        lipschitz_grad=float(max(eig[-1], 0.0)),
        mu=float(max(eig[0], 0.0)),
        name=name,
    )


def linear_oracle(a, c=0.0, name="linear"):
    a = np.asarray(a, dtype=float).reshape(-1)
    c = float(c)
    return FunctionOracle(
        lambda x: float(a @ x) + c,
        lambda x: a.copy(),
        len(a),
        lipschitz=float(np.linalg.norm(a)),
        lipschitz_grad=0.0,
        name=name,
    )


def max_violated(constraints, x, eps):
    """Index and value of the most violated constraint, or ``None``.

    Returns ``None`` when every ``g_i(x) <= eps``. Ties go to the lowest
    index. Indices are 0-based.
    """
    vals = constraints.values(x)
    i = int(np.argmax(vals))
    if vals[i] > eps:
        return i, float(vals[i])
    return None


def first_violated(constraints, x, eps):
    """Lowest-index constraint with ``g_i(x) > eps``, or ``None``."""
    vals = constraints.values(x)
    hits = np.flatnonzero(vals > eps)
    if hits.size == 0:
        return None
    i = int(hits[0])
    return i, float(vals[i])
