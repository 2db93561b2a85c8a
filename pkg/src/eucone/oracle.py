"""
Ground truth by exhaustive comparison.

Optimal sets are computed straight from the cone definitions: x* is strong
K-optimal when no distinct utility vector lies in K + F(x*), weak K-optimal
when none lies in Int K + F(x*). Pareto sets come from componentwise dominance.
These routines never touch the scalarization code they are used to check.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .cones import (
    MEMBERSHIP_TOL,
    ZERO_TOL,
    check_threshold,
    cosines,
    dual,
    family_bounds,
    ideal_direction,
)
from .errors import DomainError
from .problems import natural_key


@dataclass
class OptimalSetReport:
    s: float
    mode: str
    optimal_ids: list[str]
    pareto_ids: list[str]
    elapsed: float = 0.0

    def to_dict(self, timing=True):
        d = asdict(self)
        if not timing:
            d.pop("elapsed")
        return d


def _check_mode(mode):
    if mode not in ("weak", "strong"):
        raise ValueError(f"mode must be 'weak' or 'strong', got {mode!r}")


def _undominated(matrix_fn, U, block=256):
    m = U.shape[0]
    keep = np.empty(m, dtype=bool)
    for start in range(0, m, block):
        rows = slice(start, start + block)
        keep[rows] = ~matrix_fn(U, rows).any(axis=1)
    return keep


def optimal_mask(U, s, mode, tol=MEMBERSHIP_TOL, block=256):
    _check_mode(mode)
    U = np.asarray(U, dtype=float)
    axis = ideal_direction(U.shape[1])

    def rows_fn(U, rows):
        D = U[None, :, :] - U[rows][:, None, :]
        c, _ = cosines(D, axis)
        distinct = np.max(np.abs(D), axis=-1) > ZERO_TOL
        with np.errstate(invalid="ignore"):
            hit = c > s + tol if mode == "weak" else c >= s - tol
        return distinct & hit

    return _undominated(rows_fn, U, block)


def pareto_mask(U, mode, tol=ZERO_TOL, block=256):
    _check_mode(mode)
    U = np.asarray(U, dtype=float)

    def rows_fn(U, rows):
        D = U[None, :, :] - U[rows][:, None, :]
        if mode == "weak":
            return np.all(D > tol, axis=-1)
        return np.all(D >= -tol, axis=-1) & (np.max(np.abs(D), axis=-1) > tol)

    return _undominated(rows_fn, U, block)


def _ids(problem, mask):
    return sorted((problem.ids[i] for i in np.flatnonzero(mask)), key=natural_key)


def brute_force_optimal_set(problem, s, mode="strong", tol=MEMBERSHIP_TOL):
    s = check_threshold(s, problem.n)
    _check_mode(mode)
    t0 = time.perf_counter()
    opt = optimal_mask(problem.utilities, s, mode, tol)
    par = pareto_mask(problem.utilities, mode)
    return OptimalSetReport(
        s=s,
        mode=mode,
        optimal_ids=_ids(problem, opt),
        pareto_ids=_ids(problem, par),
        elapsed=time.perf_counter() - t0,
    )


@dataclass
class NestingReport:
    mode: str
    s_grid: list[float]
    sizes: list[int]
    pareto_size: int
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        d = asdict(self)
        d["ok"] = self.ok
        return d


def nesting_check(problem, s_grid, mode="strong", tol=MEMBERSHIP_TOL):
    """Check that optimal sets grow with s and sandwich the Pareto set.

    For s1 > s2 the K(s2)-optimal set must lie inside the K(s1)-optimal set,
    and upper-optimal <= Pareto-optimal <= lower-optimal.
    """
    grid = [float(s) for s in s_grid]
    if not grid:
        raise DomainError("empty s grid")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("s grid must be sorted ascending")
    _check_mode(mode)
    n = problem.n
    for s in grid:
        check_threshold(s, n)
    sets = [set(np.flatnonzero(optimal_mask(problem.utilities, s, mode, tol))) for s in grid]
    pareto = set(np.flatnonzero(pareto_mask(problem.utilities, mode)))
    bounds = family_bounds(n)
    upper = set(np.flatnonzero(optimal_mask(problem.utilities, bounds.s_min, mode, tol)))
    lower = set(np.flatnonzero(optimal_mask(problem.utilities, bounds.s_max, mode, tol)))

    violations = []

    def report(kind, missing, **extra):
        violations.append(
            {
                "kind": kind,
                **extra,
                "offending_ids": sorted((problem.ids[i] for i in missing), key=natural_key),
            }
        )

    for a in range(len(grid)):
        for b in range(a + 1, len(grid)):
            if grid[b] > grid[a] and not sets[a] <= sets[b]:
                report("s_nesting", sets[a] - sets[b], s_low=grid[a], s_high=grid[b])
    if not upper <= pareto:
        report("upper_in_pareto", upper - pareto)
    if not pareto <= lower:
        report("pareto_in_lower", pareto - lower)
    return NestingReport(
        mode=mode,
        s_grid=grid,
        sizes=[len(x) for x in sets],
        pareto_size=len(pareto),
        violations=violations,
    )


# ---------------------------------------------------------------------------
# sampled duality check


def _orthogonal_unit(rng, q, count):
    v = rng.standard_normal((count, q.size))
    v -= np.outer(v @ q, q)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_members(cone, count, rng, boundary_fraction=0.25):
    """Unit vectors of ``cone``; a fraction sit exactly on its boundary."""
    q = cone.axis
    c = rng.uniform(cone.s, 1.0, size=count)
    c[: int(boundary_fraction * count)] = cone.s
    u = _orthogonal_unit(rng, q, count)
    return c[:, None] * q + np.sqrt(1.0 - c**2)[:, None] * u


def worst_partner(cone, x):
    """Unit member of ``cone`` minimizing <x, y>, found in the plane of x and the axis."""
    q = cone.axis
    x = np.atleast_2d(x)
    perp = x - np.outer(x @ q, q)
    pn = np.linalg.norm(perp, axis=1, keepdims=True)
    # x parallel to the axis: any orthogonal direction is equally bad
    fallback = np.zeros_like(perp)
    fallback[:, np.argmin(np.abs(q))] = 1.0
    fallback -= np.outer(fallback @ q, q)
    fallback /= np.linalg.norm(fallback, axis=1, keepdims=True)
    u = np.where(pn > ZERO_TOL, perp / np.where(pn > ZERO_TOL, pn, 1.0), fallback)
    sin_a = math.sqrt(1.0 - cone.s**2)
    return cone.s * q - sin_a * u


@dataclass
class DualCheckReport:
    n: int
    s: float
    dual_s: float
    samples: int
    seed: int
    min_member_product: float
    violations: int
    outside_checked: int
    counterexamples_found: int
    worst_counterexample_product: float | None
    margin: float

    @property
    def ok(self):
        return self.violations == 0 and self.counterexamples_found == self.outside_checked

    def to_dict(self):
        d = asdict(self)
        d["ok"] = self.ok
        return d


def sampled_dual_check(cone, samples=10_000, seed=0, margin=0.05, tol=MEMBERSHIP_TOL):
    """Sample the duality relation between ``cone`` and its claimed dual.

    Members of the dual are paired with random members of the cone and with
    the worst member in their own plane; every product must be >= -tol.
    Vectors whose axial cosine is ``margin`` below the dual threshold must
    each admit a cone member with negative product.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    dcone = dual(cone)
    X = sample_members(dcone, samples, rng)
    Y = sample_members(cone, samples, rng)
    prod_random = np.einsum("ij,ij->i", X, Y)
    prod_worst = np.einsum("ij,ij->i", X, worst_partner(cone, X))
    products = np.concatenate([prod_random, prod_worst])
    violations = int(np.sum(products < -tol))

    c_out = dcone.s - margin
    outside = 0
    found = 0
    worst_cex = None
    if c_out > -1.0:
        outside = samples
        u = _orthogonal_unit(rng, cone.axis, samples)
        Z = c_out * cone.axis + math.sqrt(1.0 - c_out**2) * u
        p = np.einsum("ij,ij->i", Z, worst_partner(cone, Z))
        found = int(np.sum(p < 0.0))
        worst_cex = float(p.max())
    return DualCheckReport(
        n=cone.n,
        s=cone.s,
        dual_s=dcone.s,
        samples=samples,
        seed=seed,
        min_member_product=float(products.min()),
        violations=violations,
        outside_checked=outside,
        counterexamples_found=found,
        worst_counterexample_product=worst_cex,
        margin=margin,
    )
