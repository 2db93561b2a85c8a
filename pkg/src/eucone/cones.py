"""
Geometry of Euclidean (ice-cream) cones

    K(q, s) = {x : cos(x, q) >= s} U {0},   ||q|| = 1,  0 < s < 1.

Utility vectors are plain 1-d numpy arrays; ``as_vector`` validates them.
The family used for preferences shares the ideal axis r = (1, ..., 1)/sqrt(n)
and thresholds in [1/sqrt(n), sqrt(n-1)/sqrt(n)].
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

ZERO_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9
AXIS_TOL = 1e-12


class OutsideFamilyWarning(UserWarning):
    """Threshold s lies outside the admissible family interval."""


def as_vector(x, n=None):
    """Return ``x`` as a finite float vector of length >= 2 (and == n if given)."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {v.shape}")
    if v.size < 2:
        raise DimensionError(f"utility vectors need at least 2 components, got {v.size}")
    if n is not None and v.size != n:
        raise DimensionError(f"expected dimension {n}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector components must be finite")
    return v


def ideal_direction(n):
    """The normalized all-ones vector r."""
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    return np.full(n, 1.0 / math.sqrt(n))


def cos_angle(x, y):
    x = as_vector(x)
    y = as_vector(y)
    if x.size != y.size:
        raise DimensionError(f"dimension mismatch: {x.size} vs {y.size}")
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx <= ZERO_TOL or ny <= ZERO_TOL:
        raise DomainError("cosine is undefined for the zero vector")
    c = float(np.dot(x, y) / (nx * ny))
    return min(1.0, max(-1.0, c))


def cosines(D, axis):
    """Row-wise cosine of ``D`` (m x n) with a unit ``axis``.

    Rows with norm <= ZERO_TOL get NaN. Returns ``(cos, norms)``.
    """
    D = np.asarray(D, dtype=float)
    norms = np.linalg.norm(D, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = (D @ axis) / norms
    c = np.clip(c, -1.0, 1.0)
    c = np.where(norms <= ZERO_TOL, np.nan, c)
    return c, norms


def discrepancy_tan(x, axis):
    """Tangent of the angle between ``x`` and ``axis``: ||p2|| / ||p1||.

    p1 is the projection of x on the axis half-line and p2 the orthogonal
    remainder. Returns ``math.inf`` when the axial component is not positive.
    """
    c = cos_angle(x, axis)
    if c <= 0.0:
        return math.inf
    return math.sqrt(max(0.0, 1.0 - c * c)) / c


def threshold_from_tan(a):
    """Cosine threshold s corresponding to a discrepancy limit a >= 0."""
    return 1.0 / math.sqrt(a * a + 1.0)


class MembershipClass(enum.Enum):
    ZERO = "zero"
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class Membership:
    kind: MembershipClass
    cosine: float | None

    @property
    def is_member(self):
        return self.kind is not MembershipClass.EXTERIOR

    @property
    def is_interior(self):
        return self.kind is MembershipClass.INTERIOR


@dataclass(frozen=True, eq=False)
class EuclideanCone:
    """K(axis, s). The axis is stored normalized; ``n`` is its length."""

    axis: np.ndarray
    s: float

    def __post_init__(self):
        a = as_vector(self.axis)
        norm = np.linalg.norm(a)
        if norm <= ZERO_TOL:
            raise DomainError("cone axis must be non-zero")
        if abs(norm - 1.0) > AXIS_TOL:
            a = a / norm
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "axis", a)
        s = float(self.s)
        if not 0.0 < s < 1.0:
            raise DomainError(f"cone threshold must lie in (0, 1), got {s}")
        object.__setattr__(self, "s", s)

    @property
    def n(self):
        return self.axis.size

    def classify(self, x, tol=MEMBERSHIP_TOL):
        return classify(self, x, tol)

    def dual(self):
        return dual(self)

    def __repr__(self):
        return f"EuclideanCone(n={self.n}, s={self.s:.12g})"


def classify(cone, x, tol=MEMBERSHIP_TOL):
    x = as_vector(x)
    if x.size != cone.n:
        raise DimensionError(f"cone has dimension {cone.n}, vector has {x.size}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    norm = np.linalg.norm(x)
    if norm <= ZERO_TOL:
        return Membership(MembershipClass.ZERO, None)
    c = min(1.0, max(-1.0, float(np.dot(x, cone.axis) / norm)))
    if c > cone.s + tol:
        kind = MembershipClass.INTERIOR
    elif c < cone.s - tol:
        kind = MembershipClass.EXTERIOR
    else:
        kind = MembershipClass.BOUNDARY
    return Membership(kind, c)


def dual(cone):
    """Dual cone: same axis, threshold sqrt(1 - s^2)."""
    return EuclideanCone(cone.axis, math.sqrt(1.0 - cone.s * cone.s))


@dataclass(frozen=True)
class ConeFamilyBounds:
    n: int
    s_min: float
    s_max: float

    def upper_cone(self):
        return EuclideanCone(ideal_direction(self.n), self.s_min)

    def lower_cone(self):
        return EuclideanCone(ideal_direction(self.n), self.s_max)

    def contains(self, s, tol=ZERO_TOL):
        return self.s_min - tol <= s <= self.s_max + tol

    def grid(self, points):
        return np.linspace(self.s_min, self.s_max, points)


def family_bounds(n):
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    return ConeFamilyBounds(n, 1.0 / math.sqrt(n), math.sqrt(n - 1) / math.sqrt(n))


def preference_cone(n, s):
    """K(s) with the ideal axis; warns when s falls outside the family bounds."""
    check_threshold(s, n)
    return EuclideanCone(ideal_direction(n), s)


def upper_cone(n):
    """K_U, the widest cone of the family."""
    return family_bounds(n).upper_cone()


def lower_cone(n):
    """K_L, the narrowest cone of the family."""
    return family_bounds(n).lower_cone()


def check_threshold(s, n):
    s = float(s)
    if not 0.0 < s < 1.0:
        raise DomainError(f"threshold s must lie in (0, 1), got {s}")
    bounds = family_bounds(n)
    if not bounds.contains(s):
        warnings.warn(
            f"s={s:.12g} is outside [{bounds.s_min:.12g}, {bounds.s_max:.12g}] for n={n}",
            OutsideFamilyWarning,
            stacklevel=3,
        )
    return s


def utilities_equal(a, b, tol=ZERO_TOL):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) <= tol


def is_improvement(cone, from_, to, mode="strong", tol=MEMBERSHIP_TOL):
    """Does moving from utility ``from_`` to ``to`` improve w.r.t. ``cone``?

    strong: to != from and to - from in K.  weak: to - from in Int K.
    """
    a = as_vector(from_, cone.n)
    b = as_vector(to, cone.n)
    m = classify(cone, b - a, tol)
    if mode == "weak":
        return m.kind is MembershipClass.INTERIOR
    if mode == "strong":
        if utilities_equal(a, b):
            return False
        return m.kind in (MembershipClass.INTERIOR, MembershipClass.BOUNDARY)
    raise ValueError(f"mode must be 'weak' or 'strong', got {mode!r}")
