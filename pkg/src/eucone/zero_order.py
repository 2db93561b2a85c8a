"""
Closed-form zero-order tests.

With d = F(x) - F(x*), the upper cone K_U = K(1/sqrt(n)) test reduces to the
sign of the off-diagonal product sum_{i != j} d_i d_j for competitors whose
total gain sum_i d_i is positive. Linear scalarization with a weight from the
interior of the dual cone gives a sufficient condition for any K(s).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .certificate import Certificate, Verdict
from .cones import (
    MembershipClass,
    as_vector,
    check_threshold,
    classify,
    EuclideanCone,
    ideal_direction,
)
from .errors import DimensionError, DomainError

DEFAULT_TOL = 1e-9
TIE_TOL = 1e-9


class UnsupportedWeightWarning(UserWarning):
    """The weight is not in the interior of the dual cone."""


@dataclass(frozen=True, eq=False)
class DeltaVector:
    values: np.ndarray
    sum: float
    cross: float


def delta(problem, xstar_id, x_id):
    d = problem.utility(x_id) - problem.utility(xstar_id)
    outer = np.outer(d, d)
    cross = float(outer.sum() - np.trace(outer))
    return DeltaVector(d, float(d.sum()), cross)


def _sums_and_cross(problem, xstar_id):
    D = problem.utilities - problem.utility(xstar_id)
    sums = D.sum(axis=1)
    cross = sums**2 - (D**2).sum(axis=1)
    return D, sums, cross


def weak_upper_optimal(problem, xstar_id, tol=DEFAULT_TOL):
    """Weak K_U-optimality: every competitor with positive total gain has
    non-positive off-diagonal product."""
    _, sums, cross = _sums_and_cross(problem, xstar_id)
    bad = np.flatnonzero((sums > tol) & (cross > tol))
    cert = Certificate("weak_upper_optimal", Verdict.OPTIMAL, point=xstar_id)
    cert.residuals["max_cross"] = float(cross[sums > tol].max()) if np.any(sums > tol) else 0.0
    if bad.size:
        j = int(bad[0])
        cert.verdict = Verdict.NOT_OPTIMAL
        cert.witness = problem.ids[j]
        cert.reason = "competitor with positive gain and positive cross term"
        cert.details = {"sum": float(sums[j]), "cross": float(cross[j])}
    return cert


def strong_upper_optimal(problem, xstar_id, tol=DEFAULT_TOL):
    """K_U-optimality: every distinct competitor with non-negative total gain
    has strictly negative off-diagonal product.

    Competitors whose cross term falls within ``tol`` of zero make the verdict
    MARGINAL, since the strict inequality cannot be decided in floating point.
    """
    D, sums, cross = _sums_and_cross(problem, xstar_id)
    distinct = np.max(np.abs(D), axis=1) > tol
    active = distinct & (sums >= -tol)
    cert = Certificate("strong_upper_optimal", Verdict.OPTIMAL, point=xstar_id)
    if active.any():
        cert.residuals["max_cross"] = float(cross[active].max())
    bad = np.flatnonzero(active & (cross > tol))
    band = np.flatnonzero(active & (np.abs(cross) <= tol))
    if bad.size:
        j = int(bad[0])
        cert.verdict = Verdict.NOT_OPTIMAL
        cert.reason = "competitor with non-negative gain and positive cross term"
    elif band.size:
        j = int(band[0])
        cert.verdict = Verdict.MARGINAL
        cert.reason = "cross term within tolerance of zero"
    else:
        return cert
    cert.witness = problem.ids[j]
    cert.details = {"sum": float(sums[j]), "cross": float(cross[j])}
    return cert


def weight_cone(s, n):
    """K(r, sqrt(1 - s^2)), the dual of the preference cone K(s)."""
    return EuclideanCone(ideal_direction(n), math.sqrt(1.0 - s * s))


def validate_weight(weight, s, n):
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    w = as_vector(weight)
    if w.size != n:
        raise DimensionError(f"weight has dimension {w.size}, expected {n}")
    return classify(weight_cone(s, n), w)


def weighted_scalarize(problem, weight, s):
    """Maximize <weight, F(x)> over the decisions.

    With the weight inside the dual cone every maximizer is K(s)-optimal; any
    other weight yields the maximizers with an UNSUPPORTED verdict.
    """
    s = check_threshold(s, problem.n)
    w = as_vector(weight, problem.n)
    membership = validate_weight(w, s, problem.n)
    scores = problem.utilities @ w
    best = float(scores.max())
    winners = [problem.ids[j] for j in np.flatnonzero(scores >= best - TIE_TOL)]
    cert = Certificate(
        "weighted_scalarize",
        Verdict.OPTIMAL,
        residuals={"max_score": best},
        details={
            "s": float(s),
            "weight": w.tolist(),
            "weight_membership": membership.kind.value,
            "weight_cosine": membership.cosine,
            "maximizer_ids": winners,
        },
    )
    if membership.kind is not MembershipClass.INTERIOR:
        warnings.warn(
            "weight is not in the interior of the dual cone; optimality is not implied",
            UnsupportedWeightWarning,
            stacklevel=2,
        )
        cert.verdict = Verdict.UNSUPPORTED
        cert.reason = "weight outside the interior of the dual cone"
    return cert
