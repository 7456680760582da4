"""Classical and surface-carried Wigner transform tests."""

import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from wsx.errors import Aliased
from wsx.extension import extend, extend_many
from wsx.geometry import build_surface
from wsx.gridio import GridFunction
from wsx.wigner import (classical_wigner, marginal_surface, marginal_velocity,
                        surface_wigner, surface_wigner_direct)


def _gauss_grid(N=257, L=12.0, shift=0.0):
    h = L / (N - 1)
    return GridFunction.from_callable(
        lambda p: 2 ** 0.25 * np.exp(-math.pi * (p[:, 0] - shift) ** 2),
        [-L / 2], [h], (N,))


def _bump(t, c=0.0, w=0.35):
    t = np.asarray(t, float)
    z = (t - c) / w
    return np.where(np.abs(z) < 1,
                    np.exp(1 - 1 / np.clip(1 - z ** 2, 1e-300, None)), 0.0)


def _cap(M=257):
    return build_surface("circle-arc", {"radius": 1.0, "aperture_deg": 60.0}, M)


# ---------------------------------------------------------------- classical

def test_classical_gaussian_closed_form():
    g = _gauss_grid()  # odd grid: x = 0 is a node
    W = classical_wigner(g)
    xs, vs = W.axis(0), W.axis(1)
    i0, j0 = np.argmin(np.abs(xs)), np.argmin(np.abs(vs))
    assert xs[i0] == 0.0
    np.testing.assert_allclose(W.values[i0, j0], 2.0, rtol=1e-10)
    ii = [i0, i0 + 3, i0 - 7, i0 + 11, i0 - 2]
    jj = [j0 + 5, j0, j0 - 9, j0 + 1, j0 - 13]
    for i, j in zip(ii, jj):
        exact = 2.0 * math.exp(-2 * math.pi * (xs[i] ** 2 + vs[j] ** 2))
        np.testing.assert_allclose(W.values[i, j], exact, atol=1e-6)


def test_classical_marginal_in_v():
    g = _gauss_grid()
    W = classical_wigner(g)
    marg = W.values.sum(axis=1) * W.spacing[1]
    np.testing.assert_allclose(marg, np.abs(g.values) ** 2, atol=1e-6)


def test_classical_fourier_invariance():
    """W(ghat,ghat)(x,v) = W(g,g)(-v,x) for the e^{-2 pi i} transform pair;
    a shifted Gaussian keeps the orientation honest.  Nested grid spacings
    make the rotated points exact grid points of both transforms."""
    N, L = 256, 16.0
    h = L / N  # 1/16; the v-grids then step in 1/64
    g = GridFunction.from_callable(
        lambda p: np.exp(-math.pi * (p[:, 0] - 0.4) ** 2), [-L / 2], [h], (N,))
    xs = g.axis(0)
    gh = np.exp(-2j * math.pi * np.outer(xs, xs)) @ g.values * h
    ghat = GridFunction(gh, g.origin, g.spacing)
    W1, W2 = classical_wigner(g), classical_wigner(ghat)
    x1, v1 = W1.axis(0), W1.axis(1)
    x2, v2 = W2.axis(0), W2.axis(1)
    for x, v in [(0.25, 0.1875), (-0.5, 0.75), (0.0, -0.4375), (1.0, 0.0)]:
        i1, j1 = np.argmin(np.abs(x1 - x)), np.argmin(np.abs(v1 - v))
        # rotated point (v, -x) on the hatted transform's grid
        i2, j2 = np.argmin(np.abs(x2 - v)), np.argmin(np.abs(v2 + x))
        assert abs(x1[i1] - x) < 1e-12 and abs(v2[j2] + x) < 1e-12
        np.testing.assert_allclose(W1.values[i1, j1], W2.values[i2, j2],
                                   atol=1e-6)


def test_classical_hermite1_negative_center():
    # first Hermite function: W dips to exactly -2 at the phase-space origin
    N, L = 257, 12.0
    h = L / (N - 1)
    g = GridFunction.from_callable(
        lambda p: 2 ** 0.25 * 2.0 * math.sqrt(math.pi) * p[:, 0]
        * np.exp(-math.pi * p[:, 0] ** 2), [-L / 2], [h], (N,))
    W = classical_wigner(g)
    i0 = np.argmin(np.abs(W.axis(0)))
    j0 = np.argmin(np.abs(W.axis(1)))
    np.testing.assert_allclose(W.values[i0, j0], -2.0, rtol=1e-8)


def test_classical_hudson_nonnegativity():
    W = classical_wigner(_gauss_grid())
    assert W.values.min() >= -1e-9


def test_classical_aliased_guard():
    N = 64
    h = 4.0 / N
    x = -2.0 + h * np.arange(N)
    g = GridFunction(np.cos(x), [-2.0], [h])
    with pytest.raises(Aliased):
        classical_wigner(g)


def test_classical_2d_separable_gaussian():
    N, L = 49, 7.2  # odd grid so the phase-space origin is a node
    h = L / (N - 1)
    g = GridFunction.from_callable(
        lambda p: 2 ** 0.5 * np.exp(-math.pi * np.sum(p ** 2, axis=-1)),
        [-L / 2, -L / 2], [h, h], (N, N))
    W = classical_wigner(g)
    i0 = np.argmin(np.abs(W.axis(0)))
    k0 = np.argmin(np.abs(W.axis(2)))
    np.testing.assert_allclose(W.values[i0, i0, k0, k0], 4.0, rtol=1e-8)
    # spot-check the factorized closed form off-center
    x1, v1 = W.axis(0)[i0 + 2], W.axis(2)[k0 + 5]
    np.testing.assert_allclose(
        W.values[i0 + 2, i0, k0 + 5, k0],
        4.0 * math.exp(-2 * math.pi * (x1 ** 2 + v1 ** 2)), atol=1e-7)


# ------------------------------------------------------------------ surface

def test_surface_slice_real_and_consistent():
    S = _cap()
    slc = surface_wigner(S, _bump, _bump, 128, nodes_v=512)
    assert np.max(np.abs(np.imag(slc.values))) <= 1e-9
    assert slc.fft_consistency() <= 1e-10
    grid = slc.as_grid()
    assert grid.shape == (512,)


def test_surface_slice_matches_direct_oracle():
    S = _cap()
    u = 128
    slc = surface_wigner(S, _bump, _bump, u, nodes_v=512)
    vq = np.array([0.0, 0.35, -1.2, 2.5, 7.0])
    direct = surface_wigner_direct(S, _bump, _bump, u, vq)
    assert np.max(np.abs(np.imag(direct))) < 1e-12
    vgrid = slc.v_origin[0] + slc.v_spacing[0] * np.arange(slc.values.size)
    spl = CubicSpline(vgrid, np.real(slc.values))
    np.testing.assert_allclose(spl(vq), np.real(direct), atol=2e-4)


def test_surface_conjugate_symmetry_two_densities():
    S = _cap()
    g1 = lambda t: _bump(t) * np.exp(1j * 2.0 * np.asarray(t))
    g2 = lambda t: _bump(t, c=0.1, w=0.3) * (1.0 + 0.5j)
    u = 120
    a = surface_wigner(S, g1, g2, u, nodes_v=512)
    b = surface_wigner(S, g2, g1, u, nodes_v=512)
    np.testing.assert_allclose(a.values, np.conj(b.values), atol=1e-9)


def test_surface_node_density_matches_callable():
    S = _cap()
    gn = _bump(S.param)
    a = surface_wigner(S, gn, gn, 128, nodes_v=512)
    b = surface_wigner(S, _bump, _bump, 128, nodes_v=512)
    np.testing.assert_allclose(a.values, b.values, atol=1e-7)


def test_paraboloid_pullback_dictionary():
    """Surface slices on the parabola pull back to the classical transform:
    with density (1+4x^2)^{-1/2} g(x) at base point (x, x^2), the slice at
    tangent coordinate v/sqrt(1+4x^2), scaled by sqrt(1+4x^2), is W(g,g)(x,v)."""
    S = build_surface("graph-curve", {"fn": "t2", "interval": [-3.0, 3.0]}, 513)
    gg = lambda t: 2 ** 0.25 * np.exp(-math.pi * np.asarray(t, float) ** 2)
    dens = lambda t: gg(t) / np.sqrt(1.0 + 4.0 * np.asarray(t, float) ** 2)
    x0 = 0.6
    u = int(np.argmin(np.abs(S.param - x0)))
    x0 = float(S.param[u])
    slc = surface_wigner(S, dens, dens, u, nodes_v=1024)
    vgrid = slc.v_origin[0] + slc.v_spacing[0] * np.arange(slc.values.size)
    spl = CubicSpline(vgrid, np.real(slc.values))
    sl = math.sqrt(1.0 + 4.0 * x0 ** 2)
    for v in (0.0, 0.3, -0.5, 1.0, 1.7):
        lhs = sl * spl(v / sl)
        rhs = 2.0 * math.exp(-2.0 * math.pi * (x0 ** 2 + v ** 2))
        np.testing.assert_allclose(lhs, rhs, atol=1e-4)


def test_sphere_cov_agrees_with_direct():
    S = build_surface("sphere2-cap", {"aperture_deg": 120.0}, 48)
    one = lambda om: np.ones(np.atleast_2d(om).shape[0])
    direct = surface_wigner_direct(S, one, one, 0, np.array([[0.0, 0.0]]))
    slc = surface_wigner(S, one, one, 0, nodes_v=256)
    N = slc.values.shape[0]
    iv = np.argmin(np.abs(slc.v_origin[0] + slc.v_spacing[0] * np.arange(N)))
    rel = abs(slc.values[iv, iv] - np.real(direct[0])) / abs(np.real(direct[0]))
    assert rel < 1e-4
    assert np.max(np.abs(np.imag(slc.values))) <= 1e-9


def test_sphere_full_second_marginal():
    # both chart sheets carry unit measure weight, so integrating the slice
    # over v collects the density at the base point and its antipode
    S = build_surface("sphere2-cap", {"aperture_deg": 360.0}, 48)

    def g(om):
        om = np.atleast_2d(om)
        return 1.0 + om[:, 2] + 0.5 * om[:, 0] ** 2

    u = 5
    slc = surface_wigner(S, g, g, u, nodes_v=256)
    total = float(np.real(np.sum(slc.values))) * float(np.prod(slc.v_spacing))
    om = S.points[u]
    target = abs(g(om[None, :])[0]) ** 2 + abs(g(-om[None, :])[0]) ** 2
    assert abs(total - target) / target < 0.01


def test_sphere_cap_second_marginal():
    # on a proper cap only the near sheet meets the support, and the slice
    # integrates to |g(u)|^2 alone
    S = build_surface("sphere2-cap", {"aperture_deg": 120.0}, 48)

    def g(pts):
        z = np.atleast_2d(pts)[:, 2]
        r = (1.0 - z) / 0.25
        return np.where(r < 1.0,
                        np.exp(1.0 - 1.0 / np.clip(1.0 - r ** 2, 1e-300, None)),
                        0.0)

    u = 3
    assert g(S.points[u][None, :])[0] > 0.1
    slc = surface_wigner(S, g, g, u, nodes_v=256)
    total = float(np.real(np.sum(slc.values))) * float(np.prod(slc.v_spacing))
    target = abs(g(S.points[u][None, :])[0]) ** 2
    assert abs(total - target) / target < 0.01


# ---------------------------------------------------------------- marginals

def test_marginal_velocity_cutoff_convergence():
    S = _cap()
    u = 100
    target = abs(_bump(S.param[u])) ** 2
    errs = []
    for r in (8, 16, 32, 64):
        val = marginal_velocity(S, _bump, u, r)
        assert abs(val.imag) < 1e-12
        errs.append(abs(val.real - target))
    assert errs == sorted(errs, reverse=True)  # error decreases with r
    assert errs[-1] / target < 0.01


def test_marginal_velocity_zero_density():
    S = _cap()
    val = marginal_velocity(S, lambda t: np.zeros_like(np.asarray(t)), 80, 16)
    assert val == 0


def test_marginal_surface_circle_origin():
    S = _cap()
    gn = _bump(S.param)
    val = marginal_surface(S, _bump, np.zeros(2))
    target = abs(extend(S, gn, np.zeros(2))) ** 2  # |integral of g dsigma|^2
    np.testing.assert_allclose(val, target, rtol=1e-3)


def test_marginal_surface_matches_intensity_circle():
    S = _cap()
    gn = _bump(S.param)
    rng = np.random.default_rng(7)
    X = rng.uniform(-2.0, 2.0, size=(20, 2))
    ms = marginal_surface(S, _bump, X)
    inten = np.abs(extend_many(S, gn, X)) ** 2
    assert np.max(np.abs(ms - inten)) / inten.max() < 1e-3


def test_marginal_surface_matches_intensity_paraboloid():
    S = build_surface("paraboloid-patch", {"halfwidth": 1.0}, 48)
    sig = 0.22
    g = lambda x: np.exp(-np.sum(np.atleast_2d(np.asarray(x)) ** 2, axis=-1)
                         / (2 * sig ** 2))
    gn = g(S.param)
    rng = np.random.default_rng(11)
    X = rng.uniform(-0.55, 0.55, size=(8, 3))
    ms = marginal_surface(S, g, X)
    inten = np.abs(extend_many(S, gn, X)) ** 2
    assert np.max(np.abs(ms - inten)) / inten.max() < 1e-3


def test_marginal_surface_zero_density():
    S = _cap(65)
    z = lambda t: np.zeros_like(np.asarray(t, float))
    assert marginal_surface(S, z, np.array([0.4, -0.2])) == 0.0
