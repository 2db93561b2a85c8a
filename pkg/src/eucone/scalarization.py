"""
Angle-distance scalarization.

For a candidate x* the gap

    gap(x*) = max_y  sum_i (F_i(y) - F_i(x*)) - s * sqrt(n) * ||F(y) - F(x*)||

is non-negative (y = x* contributes 0) and vanishes exactly when no competitor
lies in the interior of K(s) + F(x*). Each term equals
sqrt(n) * ||dF|| * (cos(dF, r) - s), so its sign is the cone-membership test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificate import Certificate, Verdict
from .cones import check_threshold

TIE_TOL = 1e-9
UNIQUE_TOL = 1e-9
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ScalarizationResult:
    value: float
    argmax_ids: list[str]
    unique_in_utility: bool


def gains(U, u_star, s):
    """Scalarized gain of every row of ``U`` relative to ``u_star``."""
    D = np.asarray(U) - u_star
    n = D.shape[-1]
    return D.sum(axis=-1) - s * math.sqrt(n) * np.linalg.norm(D, axis=-1)


def angle_distance_gap(problem, xstar_id, s):
    s = check_threshold(s, problem.n)
    i = problem.index(xstar_id)
    U = problem.utilities
    g = gains(U, U[i], s)
    # the candidate itself contributes exactly zero
    g[i] = 0.0
    value = float(g.max())
    arg = np.flatnonzero(g >= value - TIE_TOL)
    dist = np.linalg.norm(U[arg] - U[i], axis=1)
    return ScalarizationResult(
        value=value,
        argmax_ids=[problem.ids[j] for j in arg],
        unique_in_utility=bool(np.all(dist <= UNIQUE_TOL)),
    )


def weak_optimal(problem, xstar_id, s, tol=DEFAULT_TOL):
    res = angle_distance_gap(problem, xstar_id, s)
    cert = Certificate(
        test="weak_optimal",
        verdict=Verdict.OPTIMAL,
        point=xstar_id,
        residuals={"gap": res.value},
        details={"s": float(s), "argmax_ids": res.argmax_ids},
    )
    if res.value > tol:
        cert.verdict = Verdict.NOT_OPTIMAL
        cert.witness = _best_witness(problem, xstar_id, res)
        cert.reason = "a competitor improves through the cone interior"
    return cert


def strong_optimal(problem, xstar_id, s, tol=DEFAULT_TOL):
    res = angle_distance_gap(problem, xstar_id, s)
    cert = Certificate(
        test="strong_optimal",
        verdict=Verdict.OPTIMAL,
        point=xstar_id,
        residuals={"gap": res.value},
        details={
            "s": float(s),
            "argmax_ids": res.argmax_ids,
            "unique_in_utility": res.unique_in_utility,
        },
    )
    if res.value > tol:
        cert.verdict = Verdict.NOT_OPTIMAL
        cert.witness = _best_witness(problem, xstar_id, res)
        cert.reason = "not_weak"
    elif not res.unique_in_utility:
        cert.verdict = Verdict.NOT_OPTIMAL
        cert.witness = _best_witness(problem, xstar_id, res)
        cert.reason = "non_unique_maximizer"
    return cert


def _best_witness(problem, xstar_id, res):
    """Maximizer farthest from x* in utility space (lowest index on ties)."""
    u = problem.utility(xstar_id)
    best, best_d = None, -1.0
    for j in res.argmax_ids:
        d = float(np.linalg.norm(problem.utility(j) - u))
        if d > best_d:
            best, best_d = j, d
    return best


def maximin_gap(problem, xstar_id):
    """max_y min_i (F_i(y) - F_i(x*)); zero iff x* is weakly Pareto optimal."""
    U = problem.utilities
    D = U - U[problem.index(xstar_id)]
    return max(0.0, float(D.min(axis=1).max()))


# ---------------------------------------------------------------------------
# all-points paths on a bare utility matrix


def block_gains(U, rows, s):
    """Gains of every row of ``U`` (columns) relative to each of ``rows``."""
    n = U.shape[1]
    total = np.zeros((rows.shape[0], U.shape[0]))
    sq = np.zeros_like(total)
    for j in range(n):
        d = U[None, :, j] - rows[:, None, j]
        total += d
        sq += d * d
    return total - s * math.sqrt(n) * np.sqrt(sq)


def all_gaps(U, s, block=256):
    """Gap of every row of ``U``; O(m^2) in blocks of ``block`` candidates."""
    U = np.asarray(U, dtype=float)
    m = U.shape[0]
    out = np.empty(m)
    for start in range(0, m, block):
        rows = U[start : start + block]
        g = block_gains(U, rows, s)
        out[start : start + block] = np.maximum(g.max(axis=1), 0.0)
    return out


def weak_optimal_mask(U, s, tol=DEFAULT_TOL, block=256):
    """Boolean mask of rows whose gap is <= tol.

    A row can only be beaten by rows with a larger utility sum, and beating is
    transitive (the gain is superadditive), so sweeping rows by decreasing sum
    and comparing each block against the maximal rows found so far plus the
    block itself is exact.
    """
    U = np.asarray(U, dtype=float)
    m = U.shape[0]
    order = np.argsort(-U.sum(axis=1), kind="stable")
    mask = np.zeros(m, dtype=bool)
    maximal = np.empty(0, dtype=int)
    for start in range(0, m, block):
        rows = order[start : start + block]
        beaten = np.zeros(rows.size, dtype=bool)
        if maximal.size:
            beaten = block_gains(U[maximal], U[rows], s).max(axis=1) > tol
        cand = rows[~beaten]
        if cand.size:
            inner = block_gains(U[cand], U[cand], s).max(axis=1) > tol
            cand = cand[~inner]
        mask[cand] = True
        maximal = np.concatenate([maximal, cand])
    return mask
