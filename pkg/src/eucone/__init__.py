"""Optimality certificates for multi-objective problems ordered by Euclidean preference cones."""

from .certificate import Certificate, Verdict
from .cones import (
    ConeFamilyBounds,
    EuclideanCone,
    Membership,
    MembershipClass,
    classify,
    cos_angle,
    dual,
    family_bounds,
    ideal_direction,
    is_improvement,
    lower_cone,
    preference_cone,
    upper_cone,
)
from .errors import (
    DimensionError,
    DomainError,
    DuplicateIdError,
    EuconeError,
    GradientMismatchError,
    MalformedJSONError,
    ProblemFileError,
    SchemaViolationError,
    UnknownDecisionError,
    UnknownGeneratorError,
)
from .first_order import (
    certify_local_weak,
    locate_pairs,
    multiplier_exists,
    pair_at,
    pair_residuals,
)
from .io import load_problem, parse_problem, serialize_problem
from .oracle import brute_force_optimal_set, nesting_check, sampled_dual_check
from .problems import FiniteProblem, SmoothProblem, builtin_smooth, generate_random
from .scalarization import angle_distance_gap, maximin_gap, strong_optimal, weak_optimal
from .zero_order import strong_upper_optimal, weak_upper_optimal, weighted_scalarize

__version__ = "0.1.0"
