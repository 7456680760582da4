"""Convex-body quadratures, the modulated pairing, and the layer-cake check."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from wsx.errors import NotConcave, NotConvex, OutOfGrid
from wsx.flandrin import (ConvexBody, bilinear_hilbert_star,
                          concave_layercake_check, convex_wigner_integral,
                          flandrin_ratio, hermite_profile, pairing_majorant,
                          _indicator_sobolev_constant)
from wsx.gridio import GridFunction
from wsx.wigner import classical_wigner


def profile_grid(n_order, L=6.4, h=0.05):
    n = int(round(2 * L / h)) + 1
    return GridFunction.from_callable(hermite_profile(n_order), [-L], [h], [n])


def rotated_square(center, half, angle):
    c, s = math.cos(angle), math.sin(angle)
    corners = np.array([(half, half), (-half, half), (-half, -half),
                        (half, -half)])
    R = np.array([[c, -s], [s, c]])
    return ConvexBody.polygon(np.asarray(center) + corners @ R.T)


def test_gaussian_disk_closed_form():
    g0 = profile_grid(0)
    for r, tol in ((0.5, 1e-3), (1.0, 1e-4), (2.0, 1e-10)):
        got = convex_wigner_integral(g0, ConvexBody.disk((0.0, 0.0), r))
        assert got == pytest.approx(1.0 - math.exp(-2.0 * math.pi * r * r),
                                    abs=tol)


def test_full_grid_recovers_unit_mass():
    g0 = profile_grid(0)
    W = classical_wigner(g0)
    xs, vs = W.axis(0), W.axis(1)
    hx, hv = W.spacing
    rect = ConvexBody.polygon([
        (xs[0] - hx / 2, vs[0] - hv / 2), (xs[-1] + hx / 2, vs[0] - hv / 2),
        (xs[-1] + hx / 2, vs[-1] + hv / 2), (xs[0] - hx / 2, vs[-1] + hv / 2)])
    assert convex_wigner_integral(g0, rect) == pytest.approx(1.0, abs=1e-10)


def test_first_excited_profile_negative_near_origin():
    g1 = profile_grid(1)
    r = 0.05
    got = convex_wigner_integral(g1, ConvexBody.disk((0.0, 0.0), r))
    assert got < 0.0
    # the transform's central value is exactly -2
    assert got / (-2.0 * math.pi * r * r) == pytest.approx(1.0, abs=0.1)


def test_gaussian_disk_family_monotone():
    g0 = profile_grid(0)
    vals = [convex_wigner_integral(g0, ConvexBody.disk((0.0, 0.0), r))
            for r in np.linspace(0.1, 2.0, 12)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_hermite_profiles_unit_norm_and_orthogonal():
    grids = [profile_grid(k) for k in range(7)]
    for g in grids:
        assert np.trapezoid(g.values ** 2, dx=0.05) == pytest.approx(1.0,
                                                                     abs=1e-10)
    assert abs(np.trapezoid(grids[0].values * grids[2].values, dx=0.05)) < 1e-10


def test_polygon_validation():
    with pytest.raises(NotConvex):
        ConvexBody.polygon([(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)])
    with pytest.raises(NotConvex):  # clockwise traversal
        ConvexBody.polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    with pytest.raises(ValueError):
        ConvexBody.polygon([(0, 0), (1, 1)])
    # collinear chains are degenerate but representable
    assert ConvexBody.polygon([(0, 0), (1, 0), (2, 0)]).area == 0.0


def test_sections():
    D = ConvexBody.disk((1.0, -0.5), 2.0)
    a, b = D.section(-0.5)
    assert (a, b) == (-1.0, 3.0)
    assert D.section(2.0) is None
    sq = ConvexBody.polygon([(0, 0), (2, 0), (2, 1), (0, 1)])
    assert sq.section(0.0) == (0.0, 2.0)  # horizontal edge hit exactly
    assert sq.section(0.5) == (0.0, 2.0)
    assert sq.section(1.5) is None
    dia = ConvexBody.polygon([(1, 0), (2, 1), (1, 2), (0, 1)])
    a, b = dia.section(1.0)
    assert (a, b) == (0.0, 2.0)
    a, b = dia.section(0.5)
    assert (a, b) == pytest.approx((0.5, 1.5))


def test_body_leaving_grid_rejected():
    with pytest.raises(OutOfGrid):
        convex_wigner_integral(profile_grid(0), ConvexBody.disk((0, 0), 20.0))


def test_ratio_degenerate_body_is_zero():
    line = ConvexBody.polygon([(0, 0), (1, 0), (2, 0)])
    assert flandrin_ratio(profile_grid(0), line, 0.1) == 0.0


def test_ratio_gaussian_at_most_one_for_large_bodies():
    g0 = profile_grid(0)
    for r in (0.6, 1.0, 1.8):
        assert flandrin_ratio(g0, ConvexBody.disk((0.0, 0.0), r), 0.1) <= 1.0


def test_ratio_sweep_stays_under_budget():
    # a slice of the acceptance sweep: excited profiles against disks
    # and rotated squares, eps = 0.1, budget 10
    bodies = [ConvexBody.disk((0.0, 0.0), 0.4),
              ConvexBody.disk((0.3, -0.2), 1.3),
              rotated_square((0.0, 0.0), 0.5, 0.7),
              rotated_square((-0.5, 0.4), 1.4, 0.15)]
    for k in (1, 4, 6):
        g = profile_grid(k)
        for K in bodies:
            # signed: excited profiles go negative near the origin
            assert flandrin_ratio(g, K, 0.1) < 10.0


def test_pairing_majorant_has_slack():
    sq = rotated_square((0.0, 0.0), 1.0, 0.5)
    for k in (1, 3):
        g = profile_grid(k)
        for K in (ConvexBody.disk((0.2, -0.1), 1.2), sq):
            rec = pairing_majorant(g, K, 0.25)
            assert rec.passed
            assert rec.lhs <= rec.rhs


def test_indicator_constant_matches_quadrature():
    for s in (0.1, 0.25, 0.4):
        got = 2.0 * sum(
            quad(lambda x: x ** (2 * s)
                 * (math.sin(math.pi * x) / (math.pi * x)) ** 2,
                 k, k + 1, limit=200)[0] for k in range(400))
        # analytic tail of the oscillation-averaged integrand past 400
        got += (1.0 / math.pi ** 2) * 400.0 ** (2 * s - 1.0) / (1.0 - 2 * s)
        assert _indicator_sobolev_constant(s) == pytest.approx(got, rel=1e-3)


def gaussian_pair(h=0.01, L=6.4):
    n = int(round(2 * L / h)) + 1
    f1 = GridFunction.from_callable(
        lambda p: np.exp(-math.pi * (p[:, 0] - 0.3) ** 2), [-L], [h], [n])
    f2 = GridFunction.from_callable(
        lambda p: np.exp(-2.2 * (p[:, 0] + 0.4) ** 2), [-L], [h], [n])
    return f1, f2


def test_modulated_pairing_zero_factor():
    f1, _ = gaussian_pair()
    z = GridFunction(np.zeros(f1.shape[0]), f1.origin, f1.spacing)
    assert bilinear_hilbert_star(f1, z, 0.1, [0.0, 1.0, 2.0]) == 0.0


def test_modulated_pairing_unmodulated_oracle():
    f1, f2 = gaussian_pair()
    x = 0.25
    got = bilinear_hilbert_star(f1, f2, x, [0.0])

    def phi(y):
        return math.exp(-math.pi * (x + y / 2 - 0.3) ** 2) \
            * math.exp(-2.2 * (x - y / 2 + 0.4) ** 2)
    oracle = quad(lambda y: (phi(y) - phi(-y)) / y, 1e-12, 30.0, limit=400)[0]
    assert got == pytest.approx(abs(oracle), abs=1e-4)


def test_modulated_pairing_sup_structure():
    f1, f2 = gaussian_pair(h=0.02)
    x = 0.25
    lams = [0.0, 3.0, 11.0]
    singles = [bilinear_hilbert_star(f1, f2, x, [lam]) for lam in lams]
    assert bilinear_hilbert_star(f1, f2, x, lams) == pytest.approx(max(singles))


def wedge_weight():
    return GridFunction.from_callable(
        lambda p: np.clip(1.0 - np.abs(p[:, 0]), 0.0, None)
        * ((p[:, 1] >= 0.0) & (p[:, 1] <= 1.0)),
        [-2.0, 0.0], [0.025, 0.025], [161, 41])


def test_layercake_identity_on_wedge():
    rec = concave_layercake_check(wedge_weight())
    assert rec.passed
    assert rec.rel_error < 1e-3
    assert rec.detail["superlevel_convex"]


def test_layercake_zero_weight():
    z = GridFunction(np.zeros((31, 11)), [-1.0, 0.0], [0.1, 0.1])
    rec = concave_layercake_check(z)
    assert rec.passed
    assert rec.lhs == 0.0 and rec.rhs == 0.0


def test_layercake_rejects_nonconcave():
    bowl = GridFunction.from_callable(
        lambda p: p[:, 0] ** 2 * ((p[:, 1] >= 0.0) & (p[:, 1] <= 1.0)),
        [-1.0, 0.0], [0.05, 0.1], [41, 11])
    with pytest.raises(NotConcave):
        concave_layercake_check(bowl)


def test_layercake_needs_space_time_grid():
    with pytest.raises(ValueError):
        concave_layercake_check(GridFunction(np.ones(8), [0.0], [0.1]))
