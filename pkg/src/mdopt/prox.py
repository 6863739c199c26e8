"""Euclidean prox geometry: feasible sets, Bregman divergence, mirror steps.

Only the Euclidean prox-function ships::

    d(x) = 0.5 * ||x - center||^2 / R^2

which is 1-strongly convex with respect to the scaled norm ``||.|| / R``.
The dual of that norm is ``R * ||.||``. Restart schemes rescale and
recenter ``d`` through :func:`shifted_scaled`.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InvalidArgument, UnsupportedGeometry

__all__ = [
    "FeasibleSet",
    "ProxSetup",
    "as_vector",
    "ball",
    "box",
    "whole_space",
    "project",
    "euclidean_setup",
    "bregman",
    "mirror_step",
    "shifted_scaled",
]

FEAS_TOL = 1e-9


def as_vector(x, dim=None, name="x"):
    """Convert ``x`` to a finite 1-d float array, optionally checking its size."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise InvalidArgument(f"{name} must be a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise InvalidArgument(f"{name} has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise InvalidArgument(f"{name} has non-finite entries")
    return v


@dataclass(frozen=True)
class FeasibleSet:
    """A closed convex set with a closed-form Euclidean projection.

    ``kind`` is one of ``"ball"``, ``"box"`` or ``"whole_space"``. Use the
    :func:`ball`, :func:`box` and :func:`whole_space` constructors.
    """

    kind: str
    dim: int
    center: np.ndarray | None = None
    radius: float | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def project(self, x):
        return project(self, x)

    def contains(self, x, tol=FEAS_TOL):
        x = np.asarray(x, dtype=float)
        if self.kind == "ball":
            return bool(np.linalg.norm(x - self.center) <= self.radius + tol)
        if self.kind == "box":
            return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))
        return True

    def sample(self, rng, size):
        """Draw ``size`` points from the set (uniform for ball and box).

        The whole space has no uniform law; points come from a unit cube
        around the origin instead.
        """
        if self.kind == "ball":
            z = rng.standard_normal((size, self.dim))
            z /= np.linalg.norm(z, axis=1, keepdims=True)
            r = self.radius * rng.random(size) ** (1.0 / self.dim)
            return self.center + z * r[:, None]
        if self.kind == "box":
            return self.lower + (self.upper - self.lower) * rng.random((size, self.dim))
        return rng.uniform(-1.0, 1.0, (size, self.dim))

    def to_dict(self):
        out = {"kind": self.kind, "dim": self.dim}
        if self.kind == "ball":
            out["center"] = [repr(float(v)) for v in self.center]
            out["radius"] = repr(float(self.radius))
        elif self.kind == "box":
            out["lower"] = [repr(float(v)) for v in self.lower]
            out["upper"] = [repr(float(v)) for v in self.upper]
        return out

    @classmethod
    def from_dict(cls, data):
        kind, dim = data["kind"], int(data["dim"])
        if kind == "ball":
            return ball(dim, float(data["radius"]), [float(v) for v in data["center"]])
        if kind == "box":
            return box([float(v) for v in data["lower"]], [float(v) for v in data["upper"]])
        return whole_space(dim)


def ball(dim, radius=1.0, center=None):
    if radius <= 0:
        raise InvalidArgument("ball radius must be positive")
    c = np.zeros(dim) if center is None else as_vector(center, dim, "center")
    return FeasibleSet("ball", dim, center=c, radius=float(radius))


def box(lower, upper):
    lo = as_vector(lower, name="lower")
    hi = as_vector(upper, len(lo), "upper")
    if np.any(lo > hi):
        raise InvalidArgument("box lower bound exceeds upper bound")
    return FeasibleSet("box", len(lo), lower=lo, upper=hi)


def whole_space(dim):
    return FeasibleSet("whole_space", dim)


def project(fset, x):
    """Euclidean projection of ``x`` onto ``fset``.

    >>> project(ball(2), [3.0, 4.0])
    array([0.6, 0.8])
    """
    x = as_vector(x, fset.dim)
    if fset.kind == "ball":
        shift = x - fset.center
        nrm = np.linalg.norm(shift)
        if nrm <= fset.radius:
            return x
        return fset.center + shift * (fset.radius / nrm)
    if fset.kind == "box":
        return np.clip(x, fset.lower, fset.upper)
    if fset.kind == "whole_space":
        return x
    raise UnsupportedGeometry(f"no projection for set kind {fset.kind!r}")


@dataclass(frozen=True)
class ProxSetup:
    """Euclidean prox structure ``d(x) = ||x - center||^2 / (2 scale^2)``.

    The primal norm is ``||.||_2 / scale`` and the dual norm is
    ``scale * ||.||_2``; ``d`` is 1-strongly convex in the primal norm.
    """

    dim: int
    center: np.ndarray
    scale: float
    feasible_set: FeasibleSet
    kind: str = field(default="euclidean")

    def norm(self, x):
        return float(np.linalg.norm(x)) / self.scale

    def dual_norm(self, p):
        return self.scale * float(np.linalg.norm(p))

    def d(self, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.scale
        return 0.5 * float(z @ z)

    def grad_d(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.scale**2


def euclidean_setup(fset, center=None, scale=1.0):
    """Prox setup on ``fset`` anchored at ``center`` (default: origin)."""
    if scale <= 0:
        raise InvalidArgument("prox scale must be positive")
    c = np.zeros(fset.dim) if center is None else as_vector(center, fset.dim, "center")
    return ProxSetup(fset.dim, c, float(scale), fset)


def bregman(setup, x, y):
    """Bregman divergence ``V(x, y) = d(y) - d(x) - <grad d(x), y - x>``.

    For the Euclidean prox this is ``||y - x||^2 / (2 R^2)`` and it is
    evaluated in that closed form to avoid cancellation.
    """
    x = as_vector(x, setup.dim, "x")
    y = as_vector(y, setup.dim, "y")
    diff = (y - x) / setup.scale
    return 0.5 * float(diff @ diff)


def mirror_step(setup, x, p, h):
    """``argmin_{u in X} <h p, u> + V(x, u)``.

    With the Euclidean prox this is the projected step
    ``project(x - h R^2 p)``.
    """
    x = as_vector(x, setup.dim, "x")
    p = as_vector(p, setup.dim, "p")
    if not h > 0:
        raise InvalidArgument(f"step size must be positive, got {h}")
    if not setup.feasible_set.contains(x):
        raise InvalidArgument("mirror step base point lies outside the feasible set")
    if setup.kind != "euclidean":
        raise UnsupportedGeometry(f"no closed-form mirror step for {setup.kind!r}")
    return project(setup.feasible_set, x - (h * setup.scale**2) * p)


def shifted_scaled(setup, new_center, new_scale):
    """Recenter the prox-function at ``new_center`` and multiply its scale.

    Scales compose multiplicatively, so rescaling by 2 then by 3 gives a
    setup with scale 6 relative to the original. The feasible set is kept.
    """
    if not new_scale > 0:
        raise InvalidArgument("new_scale must be positive")
    c = as_vector(new_center, setup.dim, "new_center")
    return replace(setup, center=c, scale=setup.scale * float(new_scale))


def _mirror_step_unchecked(setup, x, p, h):
    # Hot-loop variant of mirror_step; callers guarantee the preconditions.
    fset = setup.feasible_set
    y = x - (h * setup.scale**2) * p
    if fset.kind == "ball":
        shift = y - fset.center
        nrm = np.linalg.norm(shift)
        if nrm > fset.radius:
            return fset.center + shift * (fset.radius / nrm)
        return y
    if fset.kind == "box":
        return np.clip(y, fset.lower, fset.upper)
    return y
