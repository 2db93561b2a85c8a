import math
import time
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eucone.cones import (
    EuclideanCone,
    MembershipClass,
    OutsideFamilyWarning,
    classify,
    cos_angle,
    discrepancy_tan,
    dual,
    family_bounds,
    ideal_direction,
    is_improvement,
    lower_cone,
    preference_cone,
    threshold_from_tan,
    upper_cone,
)
from eucone.errors import DimensionError, DomainError

INTERIOR = MembershipClass.INTERIOR
BOUNDARY = MembershipClass.BOUNDARY
EXTERIOR = MembershipClass.EXTERIOR


def test_cos_angle_examples():
    r = ideal_direction(4)
    assert cos_angle(r, r) == pytest.approx(1.0, abs=1e-15)
    assert cos_angle([1, 1, 2, 2], r) == pytest.approx(6 / math.sqrt(40), abs=1e-12)
    assert cos_angle([-1, 1, 1, 1], r) == pytest.approx(0.5, abs=1e-12)


def test_cos_angle_rejects_zero_vector():
    with pytest.raises(DomainError):
        cos_angle([0, 0, 0], [1, 1, 1])


def test_discrepancy_tan_examples():
    r = ideal_direction(4)
    assert discrepancy_tan(r, r) == pytest.approx(0.0, abs=1e-15)
    assert discrepancy_tan([-1, 1, 1, 1], r) == pytest.approx(math.sqrt(3), abs=1e-12)
    assert discrepancy_tan([1, -1, 0, 0], r) == math.inf


def test_discrepancy_tan_matches_projection_lengths():
    r = ideal_direction(4)
    x = np.array([-1.0, 1, 1, 1])
    along = np.dot(x, r) * r
    across = x - along
    expected = np.linalg.norm(across) / np.linalg.norm(along)
    assert discrepancy_tan(x, r) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.0, 50.0))
def test_threshold_from_tan_inverts_tangent(a):
    s = threshold_from_tan(a)
    assert s == pytest.approx(math.cos(math.atan(a)), rel=1e-12, abs=1e-15)


def test_classify_examples():
    assert classify(lower_cone(4), [1, 1, 2, 2]).kind is INTERIOR
    assert classify(upper_cone(4), [-1, 1, 1, 1]).kind is BOUNDARY
    m = classify(upper_cone(3), [0, 0, 0])
    assert m.kind is MembershipClass.ZERO and m.is_member
    assert classify(lower_cone(4), [0, 0, 1, 1]).kind is EXTERIOR


def test_classify_treats_tiny_vectors_as_zero():
    assert classify(lower_cone(3), [1e-13, -1e-13, 0]).kind is MembershipClass.ZERO
    assert classify(lower_cone(3), [1e-11, -1e-11, 0]).kind is EXTERIOR


def test_classify_checks_dimension_and_tol():
    with pytest.raises(DimensionError):
        classify(upper_cone(3), [1, 1])
    with pytest.raises(DomainError):
        classify(upper_cone(3), [1, 1, 1], tol=0)


def test_dual_examples():
    for n in range(2, 9):
        b = family_bounds(n)
        assert dual(upper_cone(n)).s == pytest.approx(b.s_max, abs=1e-15)
    self_dual = preference_cone(4, 1 / math.sqrt(2))
    assert dual(self_dual).s == pytest.approx(self_dual.s, abs=1e-15)


def test_dual_involution_over_random_cones():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        cone = EuclideanCone(rng.standard_normal(n), rng.uniform(0.01, 0.99))
        back = dual(dual(cone))
        assert abs(back.s - cone.s) <= 1e-12
        assert np.allclose(back.axis, cone.axis, atol=1e-15)


def test_family_bounds_examples():
    b2 = family_bounds(2)
    assert b2.s_min == pytest.approx(1 / math.sqrt(2)) and b2.s_max == pytest.approx(1 / math.sqrt(2))
    b4 = family_bounds(4)
    assert (b4.s_min, b4.s_max) == pytest.approx((0.5, math.sqrt(3) / 2))
    b3 = family_bounds(3)
    assert (b3.s_min, b3.s_max) == pytest.approx((1 / math.sqrt(3), math.sqrt(2 / 3)))
    with pytest.raises(DomainError):
        family_bounds(1)


def test_threshold_outside_family_warns():
    with pytest.warns(OutsideFamilyWarning):
        preference_cone(4, 0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        preference_cone(4, 0.5)
        preference_cone(4, math.sqrt(3) / 2)
    with pytest.raises(DomainError):
        preference_cone(4, 1.0)


def test_is_improvement_examples():
    ku = upper_cone(3)
    assert is_improvement(ku, [1, 0, 0], [1, 1, 1], "strong")
    assert is_improvement(ku, [1, 0, 0], [1, 1, 1], "weak")
    v = [0.2, 0.4, 0.1]
    assert not is_improvement(ku, v, v, "strong")
    assert not is_improvement(ku, v, v, "weak")
    ku4 = upper_cone(4)
    assert not is_improvement(ku4, [0, 0, 0, 0], [-1, 1, 1, 1], "weak")
    assert is_improvement(ku4, [0, 0, 0, 0], [-1, 1, 1, 1], "strong")


def test_upper_cone_band_around_the_edge():
    ku = upper_cone(4)
    for eps in (0.05, 0.1, 0.25):
        assert classify(ku, [-eps, -eps, 1, 1]).kind is INTERIOR
    edge = 2 - math.sqrt(3)
    for eps in (edge - 1e-12, edge, edge + 1e-12):
        assert classify(ku, [-eps, -eps, 1, 1]).kind is BOUNDARY
    assert classify(ku, [-(edge + 0.01), -(edge + 0.01), 1, 1]).kind is EXTERIOR


def test_small_classifications_are_fast():
    ku, kl = upper_cone(4), lower_cone(4)
    t0 = time.perf_counter()
    classify(kl, [1, 1, 2, 2])
    classify(ku, [-0.1, -0.1, 1, 1])
    assert time.perf_counter() - t0 < 1e-3


@pytest.mark.parametrize("n", range(3, 9))
def test_upper_cone_boundary_family(n):
    x = np.ones(n)
    x[0] = -(n - 2) / 2
    m = classify(upper_cone(n), x)
    assert m.kind is BOUNDARY
    assert m.cosine == pytest.approx(1 / math.sqrt(n), abs=1e-12)


def _unit_members(cone, count, rng):
    v = rng.standard_normal((count, cone.n))
    v -= np.outer(v @ cone.axis, cone.axis)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    c = rng.uniform(cone.s, 1.0, count)
    return c[:, None] * cone.axis + np.sqrt(1 - c**2)[:, None] * v


@pytest.mark.parametrize("n", range(2, 7))
def test_lower_cone_members_are_positive(n):
    kl = lower_cone(n)
    X = _unit_members(kl, 2000, np.random.default_rng(n))
    for x in X:
        assert classify(kl, x).is_member
        assert np.all(x >= -1e-12)
        assert np.sum(x > 1e-12) >= n - 1


def test_narrower_cones_are_nested_in_wider_ones():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        b = family_bounds(n)
        s_lo, s_hi = sorted(rng.uniform(b.s_min, b.s_max, 2))
        narrow = EuclideanCone(ideal_direction(n), s_hi)
        wide = EuclideanCone(ideal_direction(n), s_lo)
        for x in _unit_members(narrow, 20, rng):
            assert classify(wide, x).is_member


def test_two_objective_cone_is_the_orthant():
    cone = upper_cone(2)
    for t in np.linspace(0, 2 * math.pi, 360, endpoint=False):
        x = np.array([math.cos(t), math.sin(t)])
        kind = classify(cone, x).kind
        lo = min(x)
        if lo > 1e-9:
            assert kind is INTERIOR
        elif abs(lo) <= 1e-9 and max(x) > 0:
            assert kind is BOUNDARY
        else:
            assert kind is EXTERIOR


@settings(max_examples=200)
@given(
    st.integers(2, 6).flatmap(
        lambda n: st.tuples(
            st.lists(st.floats(-10, 10), min_size=n, max_size=n),
            st.lists(st.floats(-10, 10), min_size=n, max_size=n),
        )
    ),
    st.floats(0.05, 0.95),
)
def test_dual_members_have_nonnegative_products(vectors, s):
    y, x = map(np.array, vectors)
    n = y.size
    cone = EuclideanCone(ideal_direction(n), s)
    if classify(cone, y).is_member and classify(dual(cone), x).is_member:
        ny, nx = np.linalg.norm(y), np.linalg.norm(x)
        if ny > 1e-12 and nx > 1e-12:
            assert np.dot(y / ny, x / nx) >= -1e-9


def test_weak_improvement_implies_strong():
    rng = np.random.default_rng(3)
    cone = upper_cone(3)
    for _ in range(500):
        a, b = rng.standard_normal((2, 3))
        if is_improvement(cone, a, b, "weak"):
            assert is_improvement(cone, a, b, "strong")
