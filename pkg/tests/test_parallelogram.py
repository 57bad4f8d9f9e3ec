import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexcov import fixtures
from convexcov.covariogram import fd_gradient
from convexcov.errors import PreconditionError
from convexcov.geometry import R, det2
from convexcov.identities import hessian_analytic
from convexcov.oracle import AnalyticOracle, sample_domain
from convexcov.parallelogram import (
    admissible_h,
    fan_order_ok,
    gradient_analytic,
    inscribed_parallelogram,
    oblique_project,
    projector,
    quadrilateral_Q,
)

import oracles

SUPPORT = ["disk", "ellipse", "trefoil", "trefoil_mixed"]


def test_disk_example():
    P = inscribed_parallelogram(fixtures.unit_disk(), (1, 0))
    s3 = math.sqrt(3) / 2
    assert np.allclose(P.p1, [0.5, s3], atol=1e-12)
    assert np.allclose(P.p4, [0.5, -s3], atol=1e-12)
    assert np.allclose(P.D, [0, math.sqrt(3)], atol=1e-12)
    # circle-circle intersection, solved independently
    assert np.allclose(np.linalg.norm(P.vertices, axis=1), 1.0, atol=1e-14)


def test_trefoil_example():
    K = fixtures.trefoil()
    P = inscribed_parallelogram(K, (0.8, 0.1))
    assert max(P.residuals()) <= 1e-9
    # vertices lie on the boundary as parametrised independently
    for p, t in zip(P.vertices, P.angles):
        assert np.allclose(p, oracles.trig_point(np.array(t), 1.0, K.cos), atol=1e-13)


@pytest.mark.parametrize("name", SUPPORT)
def test_parallelogram_invariants(name):
    K = fixtures.get(name)
    for x in sample_domain(AnalyticOracle(K), 40, seed=4):
        P = inscribed_parallelogram(K, x)
        assert max(P.residuals()) <= 1e-9
        assert det2(x, P.D) > 0
        assert np.all(P.positivity() > 0)
        assert np.abs(K.signed_distance(P.vertices)).max() <= 1e-12
        assert np.allclose(P.normals, np.stack([np.cos(P.angles), np.sin(P.angles)], 1))


def test_translation_moves_vertices():
    K = fixtures.trefoil_mixed()
    t = np.array([0.4, -1.3])
    L = K.translate(t)
    for x in sample_domain(AnalyticOracle(K), 10, seed=8):
        P, Q = inscribed_parallelogram(K, x), inscribed_parallelogram(L, x)
        assert np.abs(Q.vertices - P.vertices - t).max() <= 1e-9


def test_vertices_move_continuously():
    K = fixtures.trefoil()
    rng = np.random.default_rng(5)
    for x in sample_domain(AnalyticOracle(K), 10, seed=9):
        d = rng.normal(size=2)
        d *= 1e-6 / np.linalg.norm(d)
        move = np.abs(inscribed_parallelogram(K, x + d).vertices - inscribed_parallelogram(K, x).vertices).max()
        assert move <= 50 * 1e-6


def test_small_x_approaches_affine_diameter():
    K = fixtures.trefoil()
    u = np.array([0.6, 0.8])
    Ds = [inscribed_parallelogram(K, r * u).D for r in (1e-2, 1e-3, 1e-4)]
    # D(ru) tends to the affine diameter perpendicular to u, whose length is the width
    theta = math.atan2(u[1], u[0]) + math.pi / 2
    width = K.support(theta) + K.support(theta + math.pi)
    assert abs(np.linalg.norm(Ds[-1]) - width) < 1e-3
    assert abs(np.linalg.norm(Ds[-1]) - width) < abs(np.linalg.norm(Ds[0]) - width)


def test_domain_errors():
    K = fixtures.unit_disk()
    with pytest.raises(PreconditionError):
        inscribed_parallelogram(K, (0, 0))
    with pytest.raises(PreconditionError):
        inscribed_parallelogram(K, (2.5, 0))
    with pytest.raises(PreconditionError):
        inscribed_parallelogram(fixtures.unit_square(), (0.2, 0))


def test_gradient_disk():
    g = gradient_analytic(fixtures.unit_disk(), (1, 0))
    assert np.allclose(g, [-math.sqrt(3), 0], atol=1e-12)
    x = np.array([0.4, 1.1])
    assert np.allclose(gradient_analytic(fixtures.unit_disk(), x), oracles.disk_cov_grad(x), atol=1e-12)


@pytest.mark.parametrize("name", SUPPORT)
def test_gradient_matches_fd(name):
    K = fixtures.get(name)
    o = AnalyticOracle(K)
    for x in sample_domain(o, 20, seed=6):
        ga = gradient_analytic(K, x)
        assert np.allclose(gradient_analytic(K, -x), -ga, atol=1e-8)
        assert np.linalg.norm(ga - fd_gradient(o, x)) <= 1e-4 * np.linalg.norm(ga)


def test_oblique_projection():
    e1, e2 = np.array([1.0, 0]), np.array([0, 1.0])
    assert np.allclose(oblique_project(e1, e2, (3, 4)), [3, 0])
    v1, v2 = np.array([1.0, 0.3]), np.array([-0.2, 1.0])
    assert np.allclose(oblique_project(v1, v2, v2), 0, atol=1e-15)
    y = np.array([0.7, -2.0])
    once = oblique_project(v1, v2, y)
    assert np.allclose(oblique_project(v1, v2, once), once)
    assert np.allclose(projector(v1, v2) @ y, once)
    assert np.allclose(once + oblique_project(v2, v1, y), y)
    with pytest.raises(PreconditionError):
        oblique_project(v1, 2 * v1, y)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(0.1, 3))
def test_projector_idempotent(a, s):
    v1 = np.array([math.cos(a), math.sin(a)])
    v2 = np.array([math.cos(a + 1), math.sin(a + 1)]) * s
    M = projector(v1, v2)
    assert np.allclose(M @ M, M, atol=1e-12)


def _admissible_hs(P, rng, k):
    """Random h with the required cyclic order."""
    out = []
    while len(out) < k:
        a = rng.uniform(0, 2 * np.pi)
        h = rng.uniform(0.1, 2.0) * np.array([math.cos(a), math.sin(a)])
        if fan_order_ok(P, h):
            out.append(h)
    return out


@pytest.mark.parametrize("name", SUPPORT)
def test_quadrilateral(name):
    K = fixtures.get(name)
    rng = np.random.default_rng(1)
    for x in sample_domain(AnalyticOracle(K), 10, seed=12):
        P = inscribed_parallelogram(K, x)
        G = hessian_analytic(K, x)
        for h in _admissible_hs(P, rng, 3):
            Q = quadrilateral_Q(K, x, h, P)
            assert np.allclose(Q.q1, h) and np.allclose(Q.q3, 0)
            assert Q.side_normal_residual(P.normals) <= 1e-12 * np.linalg.norm(h)
            assert np.linalg.norm(Q.q4 - Q.q2 + R @ G @ h) <= 1e-8 * np.linalg.norm(h)
            Q2 = quadrilateral_Q(K, x, 2 * h, P)
            assert np.allclose(Q2.q4 - Q2.q2, 2 * (Q.q4 - Q.q2))


def test_quadrilateral_disk_two_ways():
    K = fixtures.unit_disk()
    x = np.array([1.0, 0.0])
    P = inscribed_parallelogram(K, x)
    h = admissible_h(P)
    assert np.allclose(h, [1, 0])
    Q = quadrilateral_Q(K, x, h, P)
    assert np.allclose(Q.q4 - Q.q2, -R @ hessian_analytic(K, x) @ h, atol=1e-12)


def test_quadrilateral_rejects_bad_order():
    K = fixtures.trefoil()
    x = np.array([0.8, 0.1])
    P = inscribed_parallelogram(K, x)
    with pytest.raises(PreconditionError):
        quadrilateral_Q(K, x, -admissible_h(P), P)
    with pytest.raises(PreconditionError):
        quadrilateral_Q(K, x, (0, 0), P)
