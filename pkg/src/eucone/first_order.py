"""
First-order necessary conditions on smooth box-constrained problems.

Two checks are provided. ``pair_residuals`` measures how far a candidate pair
(x*, y*) is from the stationarity equations satisfied by an interior maximizer
y* of the scalarized gain of x*. ``multiplier_exists`` decides whether some
non-zero weight from the dual cone annihilates the Jacobian at x*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numdiff import central_jacobian
from .certificate import Certificate, Verdict
from .cones import (
    MEMBERSHIP_TOL,
    ZERO_TOL,
    EuclideanCone,
    check_threshold,
    cosines,
    family_bounds,
    ideal_direction,
)
from .errors import DomainError
from .scalarization import block_gains, gains, weak_optimal_mask

RANK_RTOL = 1e-10
RESIDUAL_TOL = 1e-6


def _require_interior(problem, x, what="point"):
    x = np.asarray(x, dtype=float).ravel()
    if x.size != problem.k:
        raise DomainError(f"{what} has {x.size} coordinates, problem has k={problem.k}")
    if not problem.is_interior(x):
        raise DomainError(f"{what} {x.tolist()} is not strictly inside the box")
    return x


def gradient(problem, x):
    """n x k Jacobian at an interior point: analytic if registered, else central differences."""
    x = _require_interior(problem, x)
    if problem.grad is not None:
        return np.asarray(problem.grad(x), dtype=float)
    return central_jacobian(problem.F, x)


@dataclass
class PairResidual:
    stationarity: float
    boundary: float
    stationarity_upper: float | None
    degenerate: bool
    # stationarity of the inner maximization before eliminating the norm
    stationarity_raw: float | None = None
    gain: float = 0.0

    def to_dict(self):
        return {
            "stationarity": self.stationarity,
            "boundary": self.boundary,
            "stationarity_upper": self.stationarity_upper,
            "stationarity_raw": self.stationarity_raw,
            "gain": self.gain,
            "degenerate": self.degenerate,
        }


def _pair_terms(problem, xstar, ystar, s):
    n = problem.n
    d = problem.evaluate(ystar) - problem.evaluate(xstar)
    J = gradient(problem, ystar)
    total = float(d.sum())
    dist = float(np.linalg.norm(d))
    v_stat = J.T @ (total - s * s * n * d)
    return d, J, total, dist, v_stat


def pair_residuals(problem, xstar, ystar, s, tol=MEMBERSHIP_TOL):
    """Residuals of the necessary conditions for a weak optimal pair.

    ``stationarity`` is the norm of sum_i F_i'(y*) [sum_j d_j - s^2 n d_i] and ``boundary``
    is |sum_i d_i - s sqrt(n) ||d|||, with d = F(y*) - F(x*). At s = 1/sqrt(n)
    the simplified form sum_i F_i'(y*) sum_{j != i} d_j is reported as ``stationarity_upper``.
    """
    s = check_threshold(s, problem.n)
    xstar = np.asarray(xstar, dtype=float).ravel()
    ystar = _require_interior(problem, ystar, "y*")
    n = problem.n
    d, J, total, dist, v_stat = _pair_terms(problem, xstar, ystar, s)
    degenerate = dist <= tol
    if degenerate:
        # every increment vanishes, the conditions hold trivially
        return PairResidual(0.0, 0.0, 0.0 if _is_upper(s, n) else None, True, 0.0, 0.0)
    boundary = abs(total - s * math.sqrt(n) * dist)
    stationarity_upper = None
    if _is_upper(s, n):
        stationarity_upper = float(np.linalg.norm(J.T @ (total - d)))
    v_raw = J.sum(axis=0) - s * math.sqrt(n) * (J.T @ d) / dist
    return PairResidual(
        stationarity=float(np.linalg.norm(v_stat)),
        boundary=float(boundary),
        stationarity_upper=stationarity_upper,
        degenerate=False,
        stationarity_raw=float(np.linalg.norm(v_raw)),
        gain=float(total - s * math.sqrt(n) * dist),
    )


def _is_upper(s, n):
    return abs(s - family_bounds(n).s_min) <= 1e-12


# ---------------------------------------------------------------------------
# multiplier existence


@dataclass
class MultiplierCertificate:
    exists: bool
    weight: np.ndarray | None
    axial_projection_norm: float
    threshold: float
    gradient_matrix_rank: int
    rank_ambiguous: bool = False
    null_dim: int = 0
    annihilation_residual: float | None = None

    def to_dict(self):
        return {
            "exists": self.exists,
            "weight": None if self.weight is None else self.weight.tolist(),
            "axial_projection_norm": self.axial_projection_norm,
            "threshold": self.threshold,
            "gradient_matrix_rank": self.gradient_matrix_rank,
            "rank_ambiguous": self.rank_ambiguous,
            "null_dim": self.null_dim,
            "annihilation_residual": self.annihilation_residual,
        }


def null_space_basis(A, rtol=RANK_RTOL):
    """Orthonormal basis (columns) of {v : A v = 0}, plus rank and ambiguity flag.

    Singular values below ``rtol * sigma_max`` count as zero; any singular
    value within a factor of 10 of that cut makes the rank ambiguous.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    cols = A.shape[1]
    _, sv, Vt = np.linalg.svd(A, full_matrices=True)
    smax = sv.max() if sv.size else 0.0
    if smax == 0.0:
        return np.eye(cols), 0, False
    cut = rtol * smax
    rank = int(np.sum(sv > cut))
    ambiguous = bool(np.any((sv > cut / 10) & (sv < cut * 10)))
    return Vt[rank:].T, rank, ambiguous


def multiplier_exists(problem, xstar, s, tol=MEMBERSHIP_TOL):
    """Is there a non-zero weight in K(r, sqrt(1 - s^2)) with weight^T F'(x*) = 0?

    The best cosine between r and a unit vector of the null space N is the norm
    of the projection of r onto N, so existence is one comparison.
    """
    s = check_threshold(s, problem.n)
    J = gradient(problem, xstar)
    n = problem.n
    r = ideal_direction(n)
    basis, rank, ambiguous = null_space_basis(J.T)
    proj = basis @ (basis.T @ r)
    pn = float(np.linalg.norm(proj))
    threshold = math.sqrt(1.0 - s * s)
    exists = pn >= threshold - tol
    weight = None
    residual = None
    if exists:
        weight = proj / pn
        residual = float(np.linalg.norm(J.T @ weight))
    return MultiplierCertificate(
        exists=bool(exists),
        weight=weight,
        axial_projection_norm=pn,
        threshold=threshold,
        gradient_matrix_rank=rank,
        rank_ambiguous=ambiguous,
        null_dim=basis.shape[1],
        annihilation_residual=residual,
    )


def dual_weight_cone(s, n):
    return EuclideanCone(ideal_direction(n), math.sqrt(1.0 - s * s))


# ---------------------------------------------------------------------------
# local weak optimality by sampling


def sample_directions(k, count, seed=0):
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        t = 2.0 * math.pi * np.arange(count) / count
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, k))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def certify_local_weak(
    problem, x, s, radius=1e-2, directions=1000, levels=5, seed=0, tol=MEMBERSHIP_TOL
):
    """Sample the neighbourhood of ``x`` for improvements through Int K(s).

    Points x + t d are evaluated for ``directions`` unit directions d and
    ``levels`` radii t from ``radius`` down to ``radius * 1e-(levels-1)``.
    Samples leaving the box are dropped.
    """
    s = check_threshold(s, problem.n)
    x = _require_interior(problem, x)
    dirs = sample_directions(problem.k, directions, seed)
    radii = radius * np.logspace(0, -(levels - 1), levels)
    pts = (x[None, None, :] + radii[:, None, None] * dirs[None, :, :]).reshape(-1, problem.k)
    pts = pts[problem.in_box(pts)]
    D = problem.evaluate(pts) - problem.evaluate(x)
    c, norms = cosines(D, ideal_direction(problem.n))
    with np.errstate(invalid="ignore"):
        hit = (norms > ZERO_TOL) & (c > s + tol)
    cert = Certificate(
        "local_weak",
        Verdict.OPTIMAL,
        residuals={"max_cosine_excess": float(np.nanmax(c - s)) if np.any(norms > ZERO_TOL) else -1.0},
        details={"s": s, "radius": radius, "samples": int(pts.shape[0])},
    )
    if hit.any():
        j = int(np.flatnonzero(hit)[0])
        cert.verdict = Verdict.NOT_OPTIMAL
        cert.reason = "sampled neighbour improves through the cone interior"
        cert.details["improving_point"] = pts[j].tolist()
    return cert


# ---------------------------------------------------------------------------
# locating weak optimal pairs


@dataclass
class LocatedPair:
    xstar_id: str
    xstar: np.ndarray
    ystar: np.ndarray
    grid_ystar_id: str
    residual: PairResidual | None
    status: str = "ok"

    def to_dict(self):
        return {
            "xstar_id": self.xstar_id,
            "xstar": self.xstar.tolist(),
            "ystar": self.ystar.tolist(),
            "grid_ystar_id": self.grid_ystar_id,
            "status": self.status,
            "residual": None if self.residual is None else self.residual.to_dict(),
        }


def refine_maximizer(
    problem, ustar, y0, s, step, min_step=1e-12, min_increase=1e-13, stop_above=math.inf
):
    """Coordinate search maximizing the gain of y relative to utility ``ustar``.

    Moves must raise the gain by more than ``min_increase`` (rounding noise on
    a flat ridge must not drag y* back onto x*) and must stay inside the box.
    The search returns early once the gain exceeds ``stop_above``.
    """
    y = np.array(y0, dtype=float)
    best = float(gains(problem.evaluate(y), ustar, s))
    h = float(step)
    while h >= min_step and best <= stop_above:
        moved = False
        for j in range(problem.k):
            for sign in (1.0, -1.0):
                cand = y.copy()
                cand[j] += sign * h
                if not problem.in_box(cand):
                    continue
                g = float(gains(problem.evaluate(cand), ustar, s))
                if g > best + min_increase:
                    y, best, moved = cand, g, True
        if not moved:
            h /= 2.0
    return y, best


def _grid_maximizers(U, s, candidates, tol, block=128):
    """For each candidate row, the non-degenerate rows within ``tol`` of its max gain.

    Only rows whose utility sum is at least the candidate's minus ``tol`` can
    reach a gain above -tol, so each block is compared with a sorted prefix.
    """
    sums = U.sum(axis=1)
    order = np.argsort(-sums, kind="stable")
    sorted_sums = sums[order]
    cands = np.asarray(candidates)[np.argsort(-sums[candidates], kind="stable")]
    for start in range(0, cands.size, block):
        rows = cands[start : start + block]
        cut = np.searchsorted(-sorted_sums, -(sums[rows].min() - tol), side="right")
        pool = order[:cut]
        g = block_gains(U[pool], U[rows], s)
        for a, i in enumerate(rows):
            gi = g[a]
            top = max(gi.max(), 0.0)
            arg = pool[gi >= top - tol]
            dist = np.linalg.norm(U[arg] - U[i], axis=1)
            keep = dist > tol
            yield int(i), float(top), arg[keep], dist[keep]


def _grid_step(problem, resolution):
    res = np.broadcast_to(np.asarray(resolution), (problem.k,))
    return float(np.max((problem.upper - problem.lower) / (res - 1)))


def _pair_from_maximizers(problem, xid, xstar, ustar, arg, dist, grid_ids, X, s, step, tol):
    """Refine the farthest interior grid maximizer.

    Returns None for a degenerate outcome, a ``not_weak`` pair when refinement
    finds a positive gain.
    """
    interior = np.array([problem.is_interior(X[j]) for j in arg], dtype=bool)
    if not interior.any():
        j = int(arg[np.argmax(dist)])
        return LocatedPair(xid, xstar.copy(), X[j].copy(), grid_ids[j], None, "inapplicable")
    j = int(arg[interior][np.argmax(dist[interior])])
    y, best = refine_maximizer(problem, ustar, X[j], s, step, stop_above=tol)
    if best > tol:
        return LocatedPair(xid, xstar.copy(), y, grid_ids[j], None, "not_weak")
    if not problem.is_interior(y):
        return LocatedPair(xid, xstar.copy(), y, grid_ids[j], None, "inapplicable")
    res = pair_residuals(problem, xstar, y, s, tol)
    if res.degenerate:
        return None
    return LocatedPair(xid, xstar.copy(), y, grid_ids[j], res)


def locate_pairs(problem, s, resolution=201, tol=MEMBERSHIP_TOL, max_pairs=None):
    """Find non-degenerate weak optimal pairs by grid search plus refinement.

    Weakly optimal grid nodes x* are found first. For each, the interior grid
    maximizer y* of the gain farthest from F(x*) is refined by coordinate
    search. Pairs whose refined gain exceeds ``tol`` are dropped (x* was only
    optimal on the grid); pairs whose maximizer lies on the box boundary are
    reported ``inapplicable``.
    """
    s = check_threshold(s, problem.n)
    fp = problem.discretize(resolution)
    U = fp.utilities
    X = np.asarray(fp.points)
    candidates = np.flatnonzero(weak_optimal_mask(U, s, tol))
    step = _grid_step(problem, resolution)
    pairs = []
    for i, top, arg, dist in _grid_maximizers(U, s, candidates, tol):
        if top > tol or arg.size == 0:
            continue
        pair = _pair_from_maximizers(problem, fp.ids[i], X[i], U[i], arg, dist, fp.ids, X, s, step, tol)
        if pair is None or pair.status == "not_weak":
            continue
        pairs.append(pair)
        if max_pairs is not None and len(pairs) >= max_pairs:
            break
    return pairs


def pair_at(problem, xstar, s, resolution=None, tol=MEMBERSHIP_TOL):
    """Weak optimal pair for a given decision point x*.

    Returns a LocatedPair whose status is ``ok``, ``degenerate`` (only
    maximizers with F(y*) = F(x*)), ``not_weak`` (a grid node beats x*) or
    ``inapplicable`` (maximizer on the box boundary).
    """
    s = check_threshold(s, problem.n)
    xstar = np.asarray(xstar, dtype=float).ravel()
    resolution = resolution if resolution is not None else problem.grid
    fp = problem.discretize(resolution)
    U = fp.utilities
    X = np.asarray(fp.points)
    ustar = problem.evaluate(xstar)
    g = gains(U, ustar, s)
    top = max(float(g.max()), 0.0)
    if top > tol:
        j = int(np.argmax(g))
        return LocatedPair("x*", xstar.copy(), X[j].copy(), fp.ids[j], None, "not_weak")
    arg = np.flatnonzero(g >= top - tol)
    dist = np.linalg.norm(U[arg] - ustar, axis=1)
    arg, dist = arg[dist > tol], dist[dist > tol]
    zero = PairResidual(0.0, 0.0, 0.0 if _is_upper(s, problem.n) else None, True)
    degenerate = LocatedPair("x*", xstar.copy(), xstar.copy(), "x*", zero, "degenerate")
    if arg.size == 0:
        return degenerate
    pair = _pair_from_maximizers(
        problem, "x*", xstar, ustar, arg, dist, fp.ids, X, s, _grid_step(problem, resolution), tol
    )
    if pair is None:
        return degenerate
    return pair
