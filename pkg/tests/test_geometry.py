"""Surface construction: quadrature weights, curvature data, cone certificates."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from wsx.errors import ConeViolation, NotConvex
from wsx.geometry import (build_surface, curvature_quotient, lambda_functional,
                          surface_from_json)

RNG = np.random.default_rng(20260823)


def test_circle_cap_basics():
    S = build_surface("circle-arc", {"aperture_deg": 60.0}, 256)
    assert S.ambient_dim == 2
    # arclength of a 60 degree unit-circle cap
    np.testing.assert_allclose(np.sum(S.weights), math.pi / 3.0, rtol=1e-8)
    np.testing.assert_allclose(S.curvatures, 1.0, atol=1e-12)
    # normals of the unit circle point along the position vector
    np.testing.assert_allclose(S.normals, S.points, atol=1e-12)
    assert curvature_quotient(S) == pytest.approx(1.0, abs=1e-14)


def test_full_circle_is_closed():
    S = build_surface("circle-arc", {"aperture_deg": 360.0}, 200)
    assert S.meta["closed"]
    np.testing.assert_allclose(np.sum(S.weights), 2.0 * math.pi, rtol=1e-12)
    # periodic grid: no duplicated seam node
    assert S.node_count == 200
    gaps = np.diff(S.param)
    np.testing.assert_allclose(gaps, gaps[0], rtol=1e-12)


def test_parabola_curvature_quotient():
    # odd node count so the grid contains t = 0, where K attains its maximum
    S = build_surface("graph-curve", {"fn": "t2", "interval": [-1.0, 1.0]}, 257)
    # K(t) = 2 / (1 + 4 t^2)^{3/2}; extremes at t = 0 and |t| = 1
    np.testing.assert_allclose(curvature_quotient(S), 5.0 ** 1.5, rtol=1e-10)
    k_expected = 2.0 / (1.0 + 4.0 * S.param ** 2) ** 1.5
    np.testing.assert_allclose(S.curvatures, k_expected, rtol=1e-12)


def test_curve_frames_match_finite_differences():
    S = build_surface("ellipse-arc", {"a": 2.0, "b": 1.0, "aperture_deg": 30.0}, 64)
    h = 1e-6
    for t in (-0.2, 0.0, 0.17):
        p_plus, p_minus = S.point_at(t + h), S.point_at(t - h)
        tan_fd = (p_plus - p_minus) / (2.0 * h)
        speed_fd = np.linalg.norm(tan_fd)
        np.testing.assert_allclose(S.speed_at(t), speed_fd, rtol=1e-8)
        np.testing.assert_allclose(S.tangent_at(t), tan_fd / speed_fd, atol=1e-8)
        assert abs(np.dot(S.tangent_at(t), S.normal_at(t))) < 1e-12


def test_quartic_rejected_on_full_interval():
    # t = 0 carries zero curvature; put a node there
    with pytest.raises(NotConvex):
        build_surface("graph-curve", {"fn": "t4", "interval": [-1.0, 1.0]}, 65)


def test_quartic_punctured_interval_builds():
    S = build_surface("graph-curve", {"fn": "t4", "interval": [0.25, 0.65]}, 96)
    assert np.all(S.curvatures > 1e-9)
    k_expected = 12.0 * S.param ** 2 / (1.0 + 16.0 * S.param ** 6) ** 1.5
    np.testing.assert_allclose(S.curvatures, k_expected, rtol=1e-12)


def test_cone_violation_on_wide_quartic_patch():
    # normals swing through ~74 degrees on [0.2, 1.0]
    with pytest.raises(ConeViolation):
        build_surface("graph-curve", {"fn": "t4", "interval": [0.2, 1.0]}, 96)


def test_ellipse_cone_restricted_arc():
    # max symmetric parameter aperture for a=2, b=1 under the normal cone:
    # tan(t0) = (b/a) tan(30 deg), so 2*t0 ~ 32.2 degrees
    t0 = math.atan(0.5 * math.tan(math.pi / 6.0))
    ap = 2.0 * math.degrees(t0) - 0.1
    S = build_surface("ellipse-arc", {"a": 2.0, "b": 1.0, "aperture_deg": ap}, 128)
    k = S.curvatures
    assert curvature_quotient(S) == pytest.approx(k.max() / k.min(), rel=1e-14)
    with pytest.raises(ConeViolation):
        build_surface("ellipse-arc", {"a": 2.0, "b": 1.0, "aperture_deg": 90.0}, 128)


def test_curvature_quotient_scale_invariant():
    q1 = curvature_quotient(
        build_surface("ellipse-arc", {"a": 2.0, "b": 1.0, "aperture_deg": 30.0}, 128))
    q2 = curvature_quotient(
        build_surface("ellipse-arc", {"a": 6.0, "b": 3.0, "aperture_deg": 30.0}, 128))
    np.testing.assert_allclose(q1, q2, rtol=1e-10)
    r1 = curvature_quotient(build_surface("circle-arc",
                                          {"aperture_deg": 60.0, "radius": 3.0}, 64))
    np.testing.assert_allclose(r1, 1.0, rtol=1e-10)


def test_sphere_cap_area_and_frames():
    S = build_surface("sphere2-cap", {"aperture_deg": 60.0}, 32)
    theta_c = math.pi / 6.0
    np.testing.assert_allclose(np.sum(S.weights), 2.0 * math.pi * (1.0 - math.cos(theta_c)),
                               rtol=1e-8)
    np.testing.assert_allclose(S.curvatures, 1.0, atol=1e-12)
    # orthonormal tangent frames, orthogonal to the outward normal
    E1, E2 = S.tangents[:, 0, :], S.tangents[:, 1, :]
    np.testing.assert_allclose(np.sum(E1 * E1, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.sum(E2 * E2, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.sum(E1 * E2, axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.sum(E1 * S.normals, axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.sum(E2 * S.normals, axis=1), 0.0, atol=1e-12)


def test_paraboloid_patch_data():
    S = build_surface("paraboloid-patch", {"halfwidth": 0.5}, 48)
    r2 = np.sum(S.param ** 2, axis=1)
    np.testing.assert_allclose(S.curvatures[:, 0], 2.0 / (1.0 + 4.0 * r2) ** 1.5,
                               rtol=1e-12)
    np.testing.assert_allclose(S.curvatures[:, 1], 2.0 / (1.0 + 4.0 * r2) ** 0.5,
                               rtol=1e-12)
    # area oracle: integrate the graph area element on the square
    from scipy.integrate import dblquad
    area, _ = dblquad(lambda y, x: math.sqrt(1.0 + 4.0 * (x * x + y * y)),
                      -0.5, 0.5, -0.5, 0.5, epsabs=1e-10)
    np.testing.assert_allclose(np.sum(S.weights), area, rtol=5e-4)
    # unit normals against the closed form
    np.testing.assert_allclose(np.linalg.norm(S.normals, axis=1), 1.0, atol=1e-12)


def test_lambda_functional_circle_cap():
    # the sup sits at t_u = 0 with u' at a cap endpoint; odd grid hits both
    S = build_surface("circle-arc", {"aperture_deg": 60.0}, 257)
    np.testing.assert_allclose(lambda_functional(S), (2.0 / math.sqrt(3.0)) ** 0.5,
                               rtol=1e-6)


def test_lambda_functional_parabola_finite():
    S = build_surface("graph-curve", {"fn": "t2", "interval": [-1.0, 1.0]}, 128)
    lam = lambda_functional(S)
    assert np.isfinite(lam) and lam > 0.0


def test_lambda_functional_quartic_punctured():
    S = build_surface("graph-curve", {"fn": "t4", "interval": [0.25, 0.65]}, 96)
    lam = lambda_functional(S)
    assert np.isfinite(lam) and lam > 0.0


def test_min_node_count_enforced():
    with pytest.raises(ValueError):
        build_surface("circle-arc", {"aperture_deg": 60.0}, 8)


def test_json_descriptor_roundtrip():
    S = build_surface("ellipse-arc", {"a": 2.0, "b": 1.0, "aperture_deg": 20.0}, 64)
    S2 = surface_from_json(json.dumps(S.describe()))
    np.testing.assert_allclose(S.points, S2.points, atol=0.0)
    np.testing.assert_allclose(S.weights, S2.weights, atol=0.0)


def test_cone_certificate_recorded():
    S = build_surface("circle-arc", {"aperture_deg": 60.0}, 64)
    # extreme normals are 60 degrees apart: certificate = 1 - cos(60)
    np.testing.assert_allclose(S.cone_certificate, 0.5, atol=1e-10)
    F = build_surface("circle-arc", {"aperture_deg": 360.0}, 64)
    np.testing.assert_allclose(F.cone_certificate, 2.0, atol=1e-10)
