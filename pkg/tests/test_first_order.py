import math

import numpy as np
import pytest

from eucone.certificate import Verdict
from eucone.cones import classify, family_bounds, ideal_direction, lower_cone, upper_cone
from eucone.errors import DomainError, GradientMismatchError
from eucone.first_order import (
    certify_local_weak,
    dual_weight_cone,
    gradient,
    locate_pairs,
    multiplier_exists,
    null_space_basis,
    pair_at,
    pair_residuals,
)
from eucone.problems import SmoothProblem, builtin_smooth, gradient_check_error, registry_names

SELF_DUAL = 1 / math.sqrt(2)


def _box(k, half=2.0):
    return [-half] * k, [half] * k


def test_identity_jacobian_by_differences():
    p = SmoothProblem("identity", 3, *_box(3), lambda X: X)
    assert np.allclose(gradient(p, [0.1, -0.4, 0.3]), np.eye(3), atol=1e-8)


def test_squares_jacobian():
    p = SmoothProblem(
        "squares", 2, *_box(2, 3.0), lambda X: X**2, lambda x: np.diag(2 * np.asarray(x))
    )
    assert gradient(p, [1.0, 2.0]).tolist() == [[2.0, 0.0], [0.0, 4.0]]


@pytest.mark.parametrize("name", registry_names())
def test_registered_gradients_match_differences(name):
    assert gradient_check_error(builtin_smooth(name), points=50, seed=3) <= 1e-5


def test_wrong_gradient_is_rejected():
    with pytest.raises(GradientMismatchError):
        SmoothProblem("bad", 2, *_box(2), lambda X: X**2, lambda x: np.eye(2))


def test_gradient_needs_interior_point():
    p = builtin_smooth("concave-2")
    with pytest.raises(DomainError):
        gradient(p, [2.0, 0.0])


@pytest.mark.parametrize("name", registry_names())
def test_degenerate_pair_is_exactly_zero(name):
    p = builtin_smooth(name)
    b = family_bounds(p.n)
    for x in p.random_interior(10, seed=1):
        for s in (b.s_min, b.s_max):
            r = pair_residuals(p, x, x, s)
            assert r.degenerate and r.stationarity == 0.0 and r.boundary == 0.0


def test_located_pairs_satisfy_conditions():
    p = builtin_smooth("nonconvex-2")
    pairs = [q for q in locate_pairs(p, SELF_DUAL, resolution=81) if q.status == "ok"]
    assert pairs
    for q in pairs:
        r = q.residual
        assert r.stationarity <= 1e-6 and r.boundary <= 1e-6
        assert abs(r.stationarity_upper - r.stationarity) <= 1e-12
        # eliminating the norm scales the raw stationarity by the utility sum
        total = float((p.evaluate(q.ystar) - p.evaluate(q.xstar)).sum())
        assert r.stationarity == pytest.approx(abs(total) * r.stationarity_raw, abs=1e-9)


def test_random_pairs_usually_violate_boundary_condition():
    p = builtin_smooth("concave-2")
    X = p.random_interior(200, seed=5)
    vals = [pair_residuals(p, X[i], X[i + 100], SELF_DUAL).boundary for i in range(100)]
    assert np.median(vals) > 1e-3


def test_pair_at_statuses():
    nc = builtin_smooth("nonconvex-2").with_options(grid=(41, 41))
    assert pair_at(nc, [0.5, 0.0], SELF_DUAL).status == "ok"
    assert pair_at(nc, [0.5, 0.5], SELF_DUAL).status == "not_weak"
    c2 = builtin_smooth("concave-2").with_options(grid=(41, 41))
    deg = pair_at(c2, [0.5, 0.5], SELF_DUAL)
    assert deg.status == "degenerate" and deg.residual.stationarity == 0.0
    # the only improving direction is cut off by the box
    cut = nc.with_options(upper=[0.8, 2.0])
    x = cut.grid_points()[np.argmin(np.abs(cut.grid_points() - [0.73, 0.0]).sum(axis=1))]
    assert pair_at(cut, x, SELF_DUAL).status == "inapplicable"


def test_multiplier_when_all_gradients_vanish():
    p = SmoothProblem(
        "bowl", 3, *_box(2), lambda X: -np.repeat(np.sum(X**2, axis=-1)[..., None], 3, axis=-1)
    )
    cert = multiplier_exists(p, [0.0, 0.0], 0.6)
    assert cert.exists and cert.null_dim == 3
    assert np.allclose(cert.weight, ideal_direction(3), atol=1e-12)


def test_no_multiplier_with_full_rank_square_jacobian():
    p = builtin_smooth("concave-2")
    cert = multiplier_exists(p, [0.3, -0.7], SELF_DUAL)
    assert not cert.exists and cert.null_dim == 0 and cert.weight is None


def test_null_space_projection_is_maximal():
    p = SmoothProblem(
        "line", 4, [-1.0], [1.0],
        lambda X: np.concatenate([X, -X, X**2, np.sin(X)], axis=-1),
    )
    cert = multiplier_exists(p, [0.3], 0.5)
    r = ideal_direction(4)
    assert float(cert.weight @ r) == pytest.approx(cert.axial_projection_norm, abs=1e-12)
    basis, _, _ = null_space_basis(gradient(p, [0.3]).T)
    rng = np.random.default_rng(0)
    v = rng.standard_normal((1000, basis.shape[1])) @ basis.T
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    assert np.max(v @ r) <= cert.axial_projection_norm + 1e-12


def test_rank_ambiguity_flag():
    _, rank, ambiguous = null_space_basis(np.diag([1.0, 5e-11]))
    assert ambiguous
    _, rank, ambiguous = null_space_basis(np.diag([1.0, 0.0]))
    assert rank == 1 and not ambiguous


def test_local_certificate_examples():
    nc = builtin_smooth("nonconvex-2")
    assert certify_local_weak(nc, [0.5, 0.0], SELF_DUAL).verdict is Verdict.OPTIMAL
    cert = certify_local_weak(nc, [0.5, 0.5], SELF_DUAL)
    assert cert.verdict is Verdict.NOT_OPTIMAL


def _interior_grid(p, m=41):
    return [x for x in p.grid_points(m) if p.is_interior(x)]


@pytest.mark.parametrize("name", registry_names())
def test_multiplier_exists_at_certified_points(name):
    p = builtin_smooth(name)
    b = family_bounds(p.n)
    checked = 0
    for s in (b.s_min, b.s_max):
        weight_cone = dual_weight_cone(s, p.n)
        narrowed = lower_cone(p.n) if s == b.s_min else upper_cone(p.n)
        for x in _interior_grid(p, 21):
            if certify_local_weak(p, x, s).verdict is not Verdict.OPTIMAL:
                continue
            checked += 1
            cert = multiplier_exists(p, x, s)
            assert cert.exists
            assert cert.annihilation_residual <= 1e-8
            assert classify(weight_cone, cert.weight).is_member
            assert classify(narrowed, cert.weight).is_member
    assert checked > 0
