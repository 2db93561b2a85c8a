"""
Problem instances: finite decision lists and smooth box-constrained problems.

A ``FiniteProblem`` keeps its utilities as one read-only (m, n) matrix so every
optimality test can work row-wise. A ``SmoothProblem`` carries a vectorized
evaluator ``F(X)`` mapping an array of shape (..., k) to (..., n) and an optional
analytic Jacobian ``grad(x)`` of shape (n, k) for a single point.
"""

from __future__ import annotations

import builtins
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._numdiff import central_jacobian, relative_jacobian_error
from .errors import (
    DimensionError,
    DomainError,
    DuplicateIdError,
    GradientMismatchError,
    UnknownDecisionError,
    UnknownGeneratorError,
)

GRADIENT_CHECK_TOL = 1e-5
GRADIENT_CHECK_POINTS = 10


def natural_key(label):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", label)]


class FiniteProblem:
    """An explicit list of decisions with precomputed utility vectors.

    Parameters
    ----------
    ids : sequence of str
        Unique decision labels.
    utilities : array_like, shape (m, n)
    points : sequence of sequences of float, optional
        Decision coordinates, any arity. Defaults to empty tuples.
    provenance : str
    """

    def __init__(self, ids, utilities, points=None, provenance="inline"):
        ids = [str(i) for i in ids]
        U = np.array(utilities, dtype=float)
        if U.ndim != 2:
            raise DimensionError(f"utilities must be a 2-d array, got shape {U.shape}")
        if len(ids) == 0:
            raise DomainError("a problem needs at least one decision")
        if U.shape[0] != len(ids):
            raise DimensionError(f"{len(ids)} ids but {U.shape[0]} utility rows")
        if U.shape[1] < 2:
            raise DimensionError("at least two objectives are required")
        if not np.all(np.isfinite(U)):
            raise DomainError("utilities must be finite")
        index = {}
        for pos, i in enumerate(ids):
            if i in index:
                raise DuplicateIdError(i)
            index[i] = pos
        if points is None:
            points = [()] * len(ids)
        elif len(points) != len(ids):
            raise DimensionError(f"{len(ids)} ids but {len(points)} decision points")
        U.setflags(write=False)
        self.ids = ids
        self.utilities = U
        self.points = [tuple(float(v) for v in p) for p in points]
        self.provenance = provenance
        self._index = index

    @property
    def n(self):
        return self.utilities.shape[1]

    def __len__(self):
        return len(self.ids)

    def __repr__(self):
        return f"FiniteProblem(n={self.n}, size={len(self)}, provenance={self.provenance!r})"

    def index(self, decision_id):
        try:
            return self._index[decision_id]
        except KeyError:
            raise UnknownDecisionError(decision_id) from None

    def __contains__(self, decision_id):
        return decision_id in self._index

    def utility(self, decision_id):
        return self.utilities[self.index(decision_id)]

    def point(self, decision_id):
        return self.points[self.index(decision_id)]

    def sorted_ids(self, ids):
        return sorted(ids, key=natural_key)

    def permuted(self, order):
        order = list(order)
        return FiniteProblem(
            [self.ids[i] for i in order],
            self.utilities[order],
            [self.points[i] for i in order],
            self.provenance,
        )


def generate_random(n, count, seed=0, range=(-1.0, 1.0)):
    """I.i.d. uniform utilities in ``range``; ids p0..p(count-1)."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    lo, hi = float(range[0]), float(range[1])
    if not lo < hi:
        raise DomainError(f"empty range [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    U = rng.uniform(lo, hi, size=(count, n))
    return FiniteProblem(
        [f"p{i}" for i in builtins.range(count)],
        U,
        provenance=f"random(n={n},count={count},seed={seed},range=[{lo!r},{hi!r}])",
    )


@dataclass(frozen=True, eq=False)
class SmoothProblem:
    """Box domain in R^k with n differentiable utilities.

    ``grid`` is the default per-axis resolution used by ``discretize``.
    A provided ``grad`` is checked against central differences on construction.
    """

    name: str
    n: int
    lower: np.ndarray
    upper: np.ndarray
    F: Callable = field(repr=False)
    grad: Callable | None = field(default=None, repr=False)
    grid: tuple[int, ...] | None = None
    check_gradient: bool = field(default=True, repr=False)

    def __post_init__(self):
        lo = np.array(self.lower, dtype=float).ravel()
        hi = np.array(self.upper, dtype=float).ravel()
        if lo.shape != hi.shape or lo.size == 0:
            raise DimensionError("box bounds must be non-empty and of equal length")
        if not np.all(lo < hi):
            raise DomainError("box lower bounds must be strictly below upper bounds")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if self.n < 2:
            raise DimensionError("at least two objectives are required")
        if self.grid is not None:
            object.__setattr__(self, "grid", _check_resolution(self.grid, lo.size))
        if self.grad is not None and self.check_gradient:
            err = gradient_check_error(self)
            if err > GRADIENT_CHECK_TOL:
                raise GradientMismatchError(
                    f"{self.name}: analytic Jacobian deviates from finite differences "
                    f"(relative error {err:.3e})"
                )

    @property
    def k(self):
        return self.lower.size

    def evaluate(self, x):
        return np.asarray(self.F(np.asarray(x, dtype=float)), dtype=float)

    def interior_margin(self):
        return 1e-9 * (self.upper - self.lower)

    def is_interior(self, x):
        x = np.asarray(x, dtype=float)
        m = self.interior_margin()
        return bool(np.all(x > self.lower + m) and np.all(x < self.upper - m))

    def in_box(self, X):
        X = np.asarray(X, dtype=float)
        return np.all((X >= self.lower) & (X <= self.upper), axis=-1)

    def random_interior(self, count, seed=0):
        rng = np.random.default_rng(seed)
        width = self.upper - self.lower
        return self.lower + width * rng.uniform(0.05, 0.95, size=(count, self.k))

    def grid_axes(self, resolution=None):
        res = _check_resolution(resolution if resolution is not None else self.grid, self.k)
        # lo + width * i / (m - 1) keeps symmetric nodes such as 0 exact
        return [
            self.lower[j] + (self.upper[j] - self.lower[j]) * np.arange(m) / (m - 1)
            for j, m in enumerate(res)
        ]

    def grid_points(self, resolution=None):
        axes = self.grid_axes(resolution)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)

    def discretize(self, resolution=None):
        """Finite problem on the tensor grid, ids g0..g(M-1) in row-major order."""
        res = _check_resolution(resolution if resolution is not None else self.grid, self.k)
        X = self.grid_points(res)
        U = self.evaluate(X)
        shape = "x".join(str(m) for m in res)
        return FiniteProblem(
            [f"g{i}" for i in range(X.shape[0])],
            U,
            X,
            provenance=f"grid:{self.name}[{shape}]",
        )

    def with_options(self, lower=None, upper=None, grid=None):
        return SmoothProblem(
            self.name,
            self.n,
            self.lower if lower is None else lower,
            self.upper if upper is None else upper,
            self.F,
            self.grad,
            self.grid if grid is None else grid,
            self.check_gradient,
        )


def _check_resolution(resolution, k):
    if resolution is None:
        raise DomainError("no grid resolution given")
    if isinstance(resolution, (int, np.integer)):
        resolution = (int(resolution),) * k
    res = tuple(int(m) for m in resolution)
    if len(res) != k:
        raise DimensionError(f"grid needs {k} resolutions, got {len(res)}")
    if any(m < 2 for m in res):
        raise DomainError("grid resolution must be >= 2 per axis")
    return res


def gradient_check_error(problem, points=GRADIENT_CHECK_POINTS, seed=0):
    """Worst relative deviation between analytic and central-difference Jacobians."""
    worst = 0.0
    for x in problem.random_interior(points, seed):
        J_a = np.asarray(problem.grad(x), dtype=float)
        if J_a.shape != (problem.n, problem.k):
            raise DimensionError(
                f"{problem.name}: Jacobian has shape {J_a.shape}, expected {(problem.n, problem.k)}"
            )
        worst = max(worst, relative_jacobian_error(J_a, central_jacobian(problem.F, x)))
    return worst


# ---------------------------------------------------------------------------
# registry of built-in smooth problems


def _concave2(X):
    x1, x2 = X[..., 0], X[..., 1]
    return np.stack([-((x1 - 1) ** 2) - x2**2, -(x1**2) - (x2 - 1) ** 2], axis=-1)


def _concave2_grad(x):
    x1, x2 = x
    return np.array([[-2 * (x1 - 1), -2 * x2], [-2 * x1, -2 * (x2 - 1)]])


# F2 peaks on the whole line x2 = 0, so points there are weakly but not
# strongly optimal; the image {F1 <= F2^2} is not convex.
def _nonconvex2(X):
    x1, x2 = X[..., 0], X[..., 1]
    return np.stack([-((x1 - 1) ** 2) + x2**4, -(x2**2)], axis=-1)


def _nonconvex2_grad(x):
    x1, x2 = x
    return np.array([[-2 * (x1 - 1), 4 * x2**3], [0.0, -2 * x2]])


_TRI_ANCHORS = np.array(
    [[1.0, 0.0], [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2]]
)


def _concave3(X):
    D = X[..., None, :] - _TRI_ANCHORS
    return -np.sum(D**2, axis=-1)


def _concave3_grad(x):
    return -2.0 * (np.asarray(x)[None, :] - _TRI_ANCHORS)


_REGISTRY: dict[str, Callable[[], SmoothProblem]] = {
    "concave-2": lambda: SmoothProblem(
        "concave-2", 2, [-2.0, -2.0], [2.0, 2.0], _concave2, _concave2_grad, (101, 101)
    ),
    "nonconvex-2": lambda: SmoothProblem(
        "nonconvex-2", 2, [-2.0, -2.0], [2.0, 2.0], _nonconvex2, _nonconvex2_grad, (101, 101)
    ),
    "concave-3": lambda: SmoothProblem(
        "concave-3", 3, [-2.0, -2.0], [2.0, 2.0], _concave3, _concave3_grad, (101, 101)
    ),
}


def registry_names():
    return sorted(_REGISTRY)


def builtin_smooth(name):
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownGeneratorError(
            f"unknown generator {name!r}; registered: {', '.join(registry_names())}",
            "$.generator",
        ) from None
    return factory()
