"""Classical and surface-carried Wigner transforms.

The surface transform of a density pair at a base point u is

    W(g1,g2)(u,v) = integral_S g1(u') conj(g2(R_u u'))
                      exp(-2 pi i v.(u' - R_u u')) J(u,u') dsigma(u'),

with R_u the midpoint map and J its pushforward weight.  The production
route substitutes xi = u' - R_u u' (a tangent vector at u), interpolates the
resulting density G(xi) = g1 conj(g2 o R_u) J / Jtilde onto a uniform
xi-lattice and applies one FFT for the whole v-slice.  The textbook
oscillatory sum over nodes is kept alongside as ``surface_wigner_direct``;
it costs a factor of the node count more and serves as the cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Aliased
from .geometry import SurfaceModel
from .gridio import GridFunction
from . import midpoint as mp

_DECAY_REL = 1e-8


# ---------------------------------------------------------------------------
# slices
# ---------------------------------------------------------------------------

@dataclass
class PhaseSpaceSlice:
    """One base point's worth of phase-space data, physical and Fourier."""

    u_index: int
    v_origin: np.ndarray
    v_spacing: np.ndarray
    values: np.ndarray
    xi_origin: np.ndarray
    xi_spacing: np.ndarray
    fourier: np.ndarray
    meta: dict = field(default_factory=dict)

    def as_grid(self) -> GridFunction:
        return GridFunction(self.values, self.v_origin, self.v_spacing)

    def fourier_grid(self) -> GridFunction:
        return GridFunction(self.fourier, self.xi_origin, self.xi_spacing)

    def fft_consistency(self) -> float:
        """Max deviation between the stored physical samples and the
        transform of the stored Fourier samples."""
        recomputed = _fourier_to_physical(self.fourier, self.xi_origin,
                                          self.xi_spacing)[0]
        scale = float(np.abs(self.values).max()) or 1.0
        return float(np.abs(recomputed - self.values).max() / scale)


def _fourier_to_physical(G: np.ndarray, xi_origin, xi_spacing):
    """W(v) = integral G(xi) exp(-2 pi i v.xi) dxi on the conjugate grid.

    Returns (values, v_origin, v_spacing) with every axis in ascending order.
    """
    m = G.ndim
    xi_origin = np.atleast_1d(xi_origin)
    xi_spacing = np.atleast_1d(xi_spacing)
    Wk = np.fft.fftn(G)
    cell = float(np.prod(xi_spacing))
    axes_v = []
    for k in range(m):
        axes_v.append(np.fft.fftshift(np.fft.fftfreq(G.shape[k],
                                                     d=xi_spacing[k])))
        Wk = np.fft.fftshift(Wk, axes=k)
    phase = np.zeros(Wk.shape)
    for k in range(m):
        rs = [1] * m
        rs[k] = -1
        phase = phase + axes_v[k].reshape(rs) * xi_origin[k]
    W = Wk * cell * np.exp(-2j * math.pi * phase)
    v_origin = np.array([ax[0] for ax in axes_v])
    v_spacing = np.array([ax[1] - ax[0] for ax in axes_v])
    return W, v_origin, v_spacing


# ---------------------------------------------------------------------------
# classical transform
# ---------------------------------------------------------------------------

def classical_wigner(g: GridFunction) -> GridFunction:
    """W(g,g) on the doubled phase-space grid, by FFT in the chord variable.

    Output axes are (x..., v...); the v-grid is the conjugate of the chord
    grid {2 m h}, so it spans [-1/(4h), 1/(4h)) per axis.
    """
    d = g.ndim
    if d not in (1, 2):
        raise ValueError("classical Wigner implemented for d = 1, 2")
    peak = float(np.abs(g.values).max())
    if peak > 0 and g.boundary_max() > _DECAY_REL * peak:
        raise Aliased("data does not decay at the grid boundary")
    n = g.shape
    vals = g.values
    if d == 1:
        N = n[0]
        idx = np.arange(N)
        m = np.arange(-N, N)
        jp = idx[:, None] + m[None, :]
        jm = idx[:, None] - m[None, :]
        ok = (jp >= 0) & (jp < N) & (jm >= 0) & (jm < N)
        A = np.where(ok, vals[np.clip(jp, 0, N - 1)]
                     * np.conj(vals[np.clip(jm, 0, N - 1)]), 0.0)
        h = float(g.spacing[0])
        # y = 2 m h; FFT over m
        Gk = np.fft.fft(np.fft.ifftshift(A, axes=1), axis=1)
        Gk = np.fft.fftshift(Gk, axes=1) * 2.0 * h
        v = np.fft.fftshift(np.fft.fftfreq(2 * N, d=2.0 * h))
        W = Gk.real
        out = GridFunction(W, np.array([g.origin[0], v[0]]),
                           np.array([h, v[1] - v[0]]))
        return out
    # d == 2: same construction per axis, chunked over the first x-axis to
    # keep the intermediate chord array small
    N0, N1 = n
    h0, h1 = (float(s) for s in g.spacing)
    m0 = np.arange(-N0, N0)[None, :, None]
    m1 = np.arange(-N1, N1)[None, None, :]
    i1 = np.arange(N1)[:, None, None]
    jp1, jm1 = i1 + m1, i1 - m1
    ok1 = (jp1 >= 0) & (jp1 < N1) & (jm1 >= 0) & (jm1 < N1)
    W = np.empty((N0, N1, 2 * N0, 2 * N1))
    for i0 in range(N0):
        jp0, jm0 = i0 + m0, i0 - m0
        ok = ok1 & (jp0 >= 0) & (jp0 < N0) & (jm0 >= 0) & (jm0 < N0)
        A = np.where(ok,
                     vals[np.clip(jp0, 0, N0 - 1), np.clip(jp1, 0, N1 - 1)]
                     * np.conj(vals[np.clip(jm0, 0, N0 - 1),
                                    np.clip(jm1, 0, N1 - 1)]), 0.0)
        Gk = np.fft.fft2(np.fft.ifftshift(A, axes=(1, 2)), axes=(1, 2))
        W[i0] = np.fft.fftshift(Gk, axes=(1, 2)).real * 4.0 * h0 * h1
    v0 = np.fft.fftshift(np.fft.fftfreq(2 * N0, d=2.0 * h0))
    v1 = np.fft.fftshift(np.fft.fftfreq(2 * N1, d=2.0 * h1))
    return GridFunction(W,
                        np.array([g.origin[0], g.origin[1], v0[0], v1[0]]),
                        np.array([h0, h1, v0[1] - v0[0], v1[1] - v1[0]]))


# ---------------------------------------------------------------------------
# surface transform: densities and reflection data
# ---------------------------------------------------------------------------

def density_evaluator(S: SurfaceModel, g):
    """Make a callable over parameters from a callable or node-value array.

    Callables receive curve parameters (n=2), base-plane points (paraboloid)
    or ambient unit vectors (sphere).  Either way the result vanishes off the
    patch: a density lives on the surface, so the reflected point exiting the
    patch contributes nothing.  Closed curves wrap instead.
    """
    if callable(g):
        return _patch_clipped(S, g)
    g = np.asarray(g)
    if S.ambient_dim == 2:
        from scipy.interpolate import CubicSpline
        t0, t1 = float(S.param[0]), float(S.param[-1])
        if np.iscomplexobj(g):
            spl_r, spl_i = (CubicSpline(S.param, part)
                            for part in (g.real, g.imag))

            def ev(t):
                t = np.asarray(t, float)
                inside = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
                return np.where(inside, spl_r(t) + 1j * spl_i(t), 0.0)
        else:
            spl = CubicSpline(S.param, g)

            def ev(t):
                t = np.asarray(t, float)
                inside = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
                return np.where(inside, spl(t), 0.0)
        return ev
    if S.kind == "sphere2-cap":
        from scipy.interpolate import RegularGridInterpolator
        Mt, Mp = S.grid_shape
        theta = S.param[:Mp * Mt:Mp, 0]
        phi = S.param[:Mp, 1]
        # wrap the azimuth so interpolation is periodic
        phi_ext = np.concatenate([phi, [phi[0] + 2.0 * math.pi]])
        vals = g.reshape(Mt, Mp)
        vals_ext = np.concatenate([vals, vals[:, :1]], axis=1)
        rgi = RegularGridInterpolator((theta, phi_ext), vals_ext,
                                      bounds_error=False, fill_value=0.0)

        def ev(omega):
            omega = np.atleast_2d(np.asarray(omega, float))
            th = np.arccos(np.clip(omega[:, 2], -1.0, 1.0))
            ph = np.mod(np.arctan2(omega[:, 1], omega[:, 0]), 2.0 * math.pi)
            return rgi(np.stack([th, ph], axis=-1))
        return ev
    if S.kind == "paraboloid-patch":
        from scipy.interpolate import RegularGridInterpolator
        M = S.grid_shape[0]
        xs = S.param[::M, 0]
        ys = S.param[:M, 1]
        rgi = RegularGridInterpolator((xs, ys), g.reshape(M, M),
                                      bounds_error=False, fill_value=0.0)

        def ev(x):
            return rgi(np.atleast_2d(np.asarray(x, float)))
        return ev
    raise ValueError(S.kind)


def _patch_clipped(S: SurfaceModel, g):
    """Wrap a callable density so it vanishes off the patch (wraps on a
    closed curve)."""
    if S.ambient_dim == 2:
        t0, t1 = float(S.param[0]), float(S.param[-1])
        closed = (S.kind in ("circle-arc", "ellipse-arc")
                  and t1 - t0 >= 2.0 * math.pi - 1e-9)

        def ev(t):
            t = np.asarray(t, float)
            if closed:
                t = t0 + np.mod(t - t0, 2.0 * math.pi)
                return np.asarray(g(t))
            inside = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
            return np.where(inside, np.asarray(g(t)), 0.0)
        return ev
    if S.kind == "sphere2-cap":
        cos_c = math.cos(float(S.meta["theta_c"]))

        def ev(omega):
            omega = np.atleast_2d(np.asarray(omega, float))
            inside = omega[:, 2] >= cos_c - 1e-12
            return np.where(inside, np.asarray(g(omega)), 0.0)
        return ev
    if S.kind == "paraboloid-patch":
        hw = float(S.params["halfwidth"])

        def ev(x):
            x = np.atleast_2d(np.asarray(x, float))
            inside = np.all(np.abs(x) <= hw + 1e-12, axis=-1)
            return np.where(inside, np.asarray(g(x)), 0.0)
        return ev
    return g


def _curve_chart_data(S: SurfaceModel, u_index: int):
    """Signed chord coordinate xi, weights J and the xi-measure density
    along the whole node grid, for a fixed base node."""
    t_u = float(S.param[u_index])
    t = S.param
    tpp, ok = mp.reflect_param_grid(S, np.full(t.shape, t_u), t)
    That = S.tangent_at(t_u)
    xi = (S.point_at(t) - S.point_at(tpp)) @ That
    J = mp.curve_jacobian_J(S, np.full(t.shape, t_u), t, tpp)
    JtA = mp.curve_jtilde_A(S, np.full(t.shape, t_u), t, tpp)
    return t_u, tpp, np.asarray(xi), np.asarray(J), np.asarray(JtA), ok


def surface_wigner(S: SurfaceModel, g1, g2, u_index: int,
                   nodes_v: int = 512) -> PhaseSpaceSlice:
    """Phase-space slice at a base node, change-of-variables route."""
    same = g1 is g2 or (
        not callable(g1) and not callable(g2)
        and np.array_equal(np.asarray(g1), np.asarray(g2)))
    if S.ambient_dim == 2:
        return _surface_wigner_curve(S, g1, g2, u_index, nodes_v, same)
    if S.kind == "sphere2-cap":
        return _surface_wigner_sphere(S, g1, g2, u_index, nodes_v, same)
    if S.kind == "paraboloid-patch":
        return _surface_wigner_paraboloid(S, g1, g2, u_index, nodes_v, same)
    raise ValueError(S.kind)


def _surface_wigner_curve(S, g1, g2, u_index, nodes_v, same):
    from scipy.interpolate import CubicSpline
    t_u, tpp, xi, J, JtA, ok = _curve_chart_data(S, u_index)
    ev1, ev2 = density_evaluator(S, g1), density_evaluator(S, g2)
    Gnode = ev1(S.param) * np.conj(ev2(tpp)) * J / JtA
    Gnode = np.where(ok, Gnode, 0.0)
    order = np.argsort(xi)
    xi_s, G_s = xi[order], Gnode[order]
    T = float(np.max(np.abs(xi_s)))
    B = 2.0 * T
    N = int(nodes_v)
    xiu = -B + (2.0 * B / N) * np.arange(N)
    spl_r = CubicSpline(xi_s, G_s.real)
    spl_i = CubicSpline(xi_s, G_s.imag)
    inside = (xiu >= xi_s[0]) & (xiu <= xi_s[-1])
    G = np.where(inside, spl_r(xiu) + 1j * spl_i(xiu), 0.0)
    if same:
        # exact conjugate symmetry of the density; symmetrizing removes the
        # interpolation asymmetry and makes the slice real to rounding
        G = 0.5 * (G + np.conj(_reverse_about_zero(G, xiu)))
    W, v0, dv = _fourier_to_physical(G, [xiu[0]], [xiu[1] - xiu[0]])
    if same:
        W = W.real
    return PhaseSpaceSlice(u_index=u_index, v_origin=v0, v_spacing=dv,
                           values=W, xi_origin=np.array([xiu[0]]),
                           xi_spacing=np.array([xiu[1] - xiu[0]]),
                           fourier=G, meta={"band": T, "kind": S.kind})


def _reverse_about_zero(G: np.ndarray, xiu: np.ndarray) -> np.ndarray:
    """Samples of xi -> G(-xi) on the same uniform grid (grid contains 0)."""
    k0 = int(np.argmin(np.abs(xiu)))
    out = np.zeros_like(G)
    for k in range(G.size):
        mirror = 2 * k0 - k
        if 0 <= mirror < G.size:
            out[k] = G[mirror]
    return out


def _surface_wigner_sphere(S, g1, g2, u_index, nodes_v, same):
    om = S.points[u_index]
    E = S.tangents[u_index]
    theta_c = float(S.meta["theta_c"])
    # chord band: |xi| = 2 |P_perp omega'| <= 2 sin(min(theta_c, pi/2))
    T = 2.0 * math.sin(min(theta_c, 0.5 * math.pi))
    B = 2.0 * T
    N = int(nodes_v)
    xiu = -B + (2.0 * B / N) * np.arange(N)
    X0, X1 = np.meshgrid(xiu, xiu, indexing="ij")
    half = np.stack([X0, X1], axis=-1) / 2.0
    r2 = np.sum(half ** 2, axis=-1)
    valid = r2 < 1.0
    root = np.sqrt(np.clip(1.0 - r2, 0.0, None))
    half_amb = half[..., 0:1] * E[0] + half[..., 1:2] * E[1]
    ev1, ev2 = density_evaluator(S, g1), density_evaluator(S, g2)
    # two chart sheets: omega' on the near and far hemispheres rel. omega;
    # the measure factor J/Jtilde = 4|om.om'| / 4|om.om'| is exactly 1 on both
    G = np.zeros(valid.shape, complex)
    for sheet in (1.0, -1.0):
        up = half_amb + sheet * root[..., None] * om
        upp = -half_amb + sheet * root[..., None] * om
        G[valid] = G[valid] + ev1(up[valid]) * np.conj(ev2(upp[valid]))
    if same:
        G = 0.5 * (G + np.conj(G[::-1, ::-1] if N % 2 == 1 else
                               np.roll(G[::-1, ::-1], (1, 1), axis=(0, 1))))
    W, v0, dv = _fourier_to_physical(G, [xiu[0], xiu[0]],
                                     [xiu[1] - xiu[0], xiu[1] - xiu[0]])
    if same:
        W = W.real
    return PhaseSpaceSlice(u_index=u_index, v_origin=v0, v_spacing=dv,
                           values=W, xi_origin=np.array([xiu[0], xiu[0]]),
                           xi_spacing=np.array([xiu[1] - xiu[0]] * 2),
                           fourier=G, meta={"band": T, "kind": S.kind})


def _surface_wigner_paraboloid(S, g1, g2, u_index, nodes_v, same):
    x = S.param[u_index]
    hw = float(S.params["halfwidth"])
    ev1, ev2 = density_evaluator(S, g1), density_evaluator(S, g2)
    # xi = A delta with delta = x' - x; columns of A are the tangent-frame
    # coordinates of 2 (e_i, 2 x_i)
    from .geometry import paraboloid_frame
    E1, E2 = paraboloid_frame(x[None, :])
    A = np.zeros((2, 2))
    for c, e in enumerate(np.eye(2)):
        lift = 2.0 * np.array([e[0], e[1], 2.0 * float(x @ e)])
        A[:, c] = [float(E1[0] @ lift), float(E2[0] @ lift)]
    Ainv = np.linalg.inv(A)
    # |xi| <= sigma_max(A) |delta|, sigma_max = 2 sqrt(1+4|x|^2), |x|,|delta|
    # bounded by the patch corners
    T = 4.0 * math.sqrt(2.0) * hw * math.sqrt(1.0 + 8.0 * hw * hw)
    B = 2.0 * T
    N = int(nodes_v)
    xiu = -B + (2.0 * B / N) * np.arange(N)
    X0, X1 = np.meshgrid(xiu, xiu, indexing="ij")
    delta = np.stack([X0, X1], axis=-1) @ Ainv.T
    xp = x[None, None, :] + delta
    xpp = x[None, None, :] - delta
    r2p = np.sum(xp ** 2, axis=-1)
    r2pp = np.sum(xpp ** 2, axis=-1)
    weight = np.sqrt((1.0 + 4.0 * r2pp) * (1.0 + 4.0 * r2p)) \
        / (1.0 + 4.0 * float(x @ x))
    G = (ev1(xp.reshape(-1, 2)).reshape(N, N)
         * np.conj(ev2(xpp.reshape(-1, 2)).reshape(N, N)) * weight)
    if same:
        G = 0.5 * (G + np.conj(np.roll(G[::-1, ::-1], (1, 1), axis=(0, 1))))
    W, v0, dv = _fourier_to_physical(G, [xiu[0], xiu[0]],
                                     [xiu[1] - xiu[0], xiu[1] - xiu[0]])
    if same:
        W = W.real
    return PhaseSpaceSlice(u_index=u_index, v_origin=v0, v_spacing=dv,
                           values=W, xi_origin=np.array([xiu[0], xiu[0]]),
                           xi_spacing=np.array([xiu[1] - xiu[0]] * 2),
                           fourier=G, meta={"band": T, "kind": S.kind})


def surface_wigner_direct(S: SurfaceModel, g1, g2, u_index: int,
                          v_points: np.ndarray) -> np.ndarray:
    """Oscillatory node sum for W(g1,g2)(u, v) at arbitrary v; the oracle.

    On the sphere this performs the intrinsic quadrature with the spherical
    weight 2^{n-2}|omega.omega'|^{n-2}.
    """
    ev1, ev2 = density_evaluator(S, g1), density_evaluator(S, g2)
    if S.ambient_dim == 2:
        t_u, tpp, xi, J, JtA, ok = _curve_chart_data(S, u_index)
        amp = ev1(S.param) * np.conj(ev2(tpp)) * J * S.weights
        amp = np.where(ok, amp, 0.0)
        v = np.atleast_1d(np.asarray(v_points, float))
        return np.exp(-2j * math.pi * np.outer(v, xi)) @ amp
    if S.kind == "sphere2-cap":
        om = S.points[u_index]
        E = S.tangents[u_index]
        upp = mp.reflect_sphere(om[None, :], S.points)
        Jw = 4.0 * np.abs(S.points @ om)
        amp = ev1(S.points) * np.conj(ev2(upp)) * Jw * S.weights
        chord = S.points - upp
        xi2 = np.stack([chord @ E[0], chord @ E[1]], axis=-1)
        v = np.atleast_2d(np.asarray(v_points, float))
        return np.exp(-2j * math.pi * (v @ xi2.T)) @ amp
    if S.kind == "paraboloid-patch":
        from .geometry import paraboloid_frame, paraboloid_point
        x = S.param[u_index]
        E1, E2 = paraboloid_frame(x[None, :])
        xpp = mp.reflect_paraboloid(x[None, :], S.param)
        uppts = paraboloid_point(xpp)
        r2pp = np.sum(xpp ** 2, axis=-1)
        r2 = float(x @ x)
        J = 4.0 * np.sqrt((1.0 + 4.0 * r2pp) / (1.0 + 4.0 * r2))
        amp = (ev1(S.param) * np.conj(ev2(xpp)) * J * S.weights)
        chord = S.points - uppts
        xi2 = np.stack([chord @ E1[0], chord @ E2[0]], axis=-1)
        v = np.atleast_2d(np.asarray(v_points, float))
        return np.exp(-2j * math.pi * (v @ xi2.T)) @ amp
    raise ValueError(S.kind)


# ---------------------------------------------------------------------------
# marginals
# ---------------------------------------------------------------------------

def marginal_velocity(S: SurfaceModel, g, u_index: int, r: float) -> complex:
    """Cutoff velocity integral int W(g,g)(u,v) chi(v/r) dv with the Gaussian
    chi; equals the chord-mollified surface average, which is how it is
    computed (Fubini moves the v-integral onto the chord variable)."""
    ev = density_evaluator(S, g)
    dim_v = S.ambient_dim - 1
    if S.ambient_dim == 2:
        t_u, tpp, xi, J, JtA, ok = _curve_chart_data(S, u_index)
        amp = ev(S.param) * np.conj(ev(tpp)) * J * S.weights
        amp = np.where(ok, amp, 0.0)
        kern = r ** dim_v * np.exp(-math.pi * r * r * xi ** 2)
        return complex(np.sum(amp * kern))
    if S.kind == "sphere2-cap":
        om = S.points[u_index]
        upp = mp.reflect_sphere(om[None, :], S.points)
        Jw = 4.0 * np.abs(S.points @ om)
        chord2 = np.sum((S.points - upp) ** 2, axis=-1)
        amp = ev(S.points) * np.conj(ev(upp)) * Jw * S.weights
        kern = r ** dim_v * np.exp(-math.pi * r * r * chord2)
        return complex(np.sum(amp * kern))
    raise ValueError(S.kind)


def marginal_surface(S: SurfaceModel, g, x: np.ndarray):
    """integral_S W(g,g)(u, P_{T_u} x) dsigma(u), evaluated by direct sums.

    Since u' - R_u u' is tangent at u, the projection of x never enters:
    the phase is x.(u' - u'') directly.  The base sweep assumes the chart
    u -> R_u u' is injective over the node set, which holds on caps and
    patches (a closed surface would revisit each pair from the antipodal
    midpoint).  Accepts a single point or a stack of points; the
    per-base-point pair data is built once and reused across evaluation
    points.
    """
    ev = density_evaluator(S, g)
    x = np.asarray(x, float)
    single = x.ndim == 1
    X = np.atleast_2d(x)                      # (P, n)
    total = np.zeros(X.shape[0])
    if S.ambient_dim == 2:
        gvals = ev(S.param)
        for i in range(S.node_count):
            tu = np.full(S.param.shape, float(S.param[i]))
            tpp, ok = mp.reflect_param_grid(S, tu, S.param)
            J = mp.curve_jacobian_J(S, tu, S.param, tpp)
            amp = gvals * np.conj(ev(tpp)) * J * S.weights
            amp = np.where(ok, amp, 0.0)
            chord = S.point_at(S.param) - S.point_at(tpp)    # (M, 2)
            osc = np.exp(-2j * math.pi * (X @ chord.T))      # (P, M)
            total += np.real(osc @ amp) * float(S.weights[i])
        return float(total[0]) if single else total
    if S.kind == "sphere2-cap":
        pts = S.points
        for i in range(S.node_count):
            om = pts[i]
            upp = mp.reflect_sphere(om[None, :], pts)
            Jw = 4.0 * np.abs(pts @ om)
            amp = ev(pts) * np.conj(ev(upp)) * Jw * S.weights
            osc = np.exp(-2j * math.pi * (X @ (pts - upp).T))
            total += np.real(osc @ amp) * float(S.weights[i])
        return float(total[0]) if single else total
    if S.kind == "paraboloid-patch":
        from .geometry import paraboloid_point
        for i in range(S.node_count):
            xpp = mp.reflect_paraboloid(S.param[i][None, :], S.param)
            uppts = paraboloid_point(xpp)
            r2pp = np.sum(xpp ** 2, axis=-1)
            J = 4.0 * np.sqrt((1.0 + 4.0 * r2pp)
                              / (1.0 + 4.0 * float(S.param[i] @ S.param[i])))
            amp = ev(S.param) * np.conj(ev(xpp)) * J * S.weights
            osc = np.exp(-2j * math.pi * (X @ (S.points - uppts).T))
            total += np.real(osc @ amp) * float(S.weights[i])
        return float(total[0]) if single else total
    raise ValueError(S.kind)
