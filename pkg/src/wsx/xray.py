"""Line integrals of gridded weights and their surface/kinetic relatives.

`xray` integrates a weight over the line {v + t omega}; `xray_pullback`
aims the ray along a surface normal, and `xray_adjoint` superposes
phase-space slices back to a function of the ambient point.  The kinetic
pair `rho_star` / `velocity_average` is the flat analogue used for
parabolic problems: straight-line averages of a space-time weight and
velocity averages of a phase-space density.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import OutOfBand
from .geometry import SurfaceModel
from .gridio import GridFunction

__all__ = [
    "xray", "xray_parallel", "xray_pullback", "xray_pullback_grid",
    "xray_adjoint", "rho_star", "rho_star_grid",
    "velocity_average", "velocity_average_many", "sinogram",
]


def _ray_window(w: GridFunction, omega: np.ndarray, v: np.ndarray):
    """Parameter interval over which v + t*omega stays inside w's box."""
    lo = w.origin
    hi = w.origin + (np.asarray(w.shape) - 1) * w.spacing
    t0, t1 = -math.inf, math.inf
    for k in range(w.ndim):
        if abs(omega[k]) < 1e-14:
            if not (lo[k] - 1e-12 <= v[k] <= hi[k] + 1e-12):
                return None
            continue
        a = (lo[k] - v[k]) / omega[k]
        b = (hi[k] - v[k]) / omega[k]
        t0 = max(t0, min(a, b))
        t1 = min(t1, max(a, b))
    if not (t0 < t1):
        return None
    return t0, t1


def xray(w: GridFunction, omega, v) -> float:
    """Integral of w over the line {v + t omega}, composite trapezoid.

    The step is half the smallest grid spacing and samples are bilinear
    in w; lines that miss the support box integrate to zero.
    """
    omega = np.asarray(omega, float)
    nrm = np.linalg.norm(omega)
    if nrm < 1e-14:
        raise ValueError("ray direction must be nonzero")
    omega = omega / nrm
    v = np.asarray(v, float)
    v = v - (v @ omega) * omega
    window = _ray_window(w, omega, v)
    if window is None:
        return 0.0
    ts = _t_lattice(w, *window)
    pts = v[None, :] + ts[:, None] * omega[None, :]
    return float(np.trapezoid(w.sample(pts), ts))


def _t_lattice(w: GridFunction, t0: float, t1: float) -> np.ndarray:
    """Quadrature nodes on an absolute lattice of a quarter grid spacing.

    Snapping to a shared lattice makes single-ray and parallel-beam
    evaluations agree exactly: widening a window only appends nodes
    outside the support box, where the fill value is zero.  A quarter
    cell (rather than half) keeps several nodes between consecutive
    kinks of the bilinear interpolant even on diagonal rays, where the
    crossings come as close as spacing/sqrt(2) apart.
    """
    step = 0.25 * float(w.spacing.min())
    k0 = math.floor(t0 / step) - 1
    k1 = math.ceil(t1 / step) + 1
    return step * np.arange(k0, k1 + 1)


def xray_parallel(w: GridFunction, omega, V: np.ndarray) -> np.ndarray:
    """xray at many offsets sharing one direction (a parallel beam).

    All rays reuse a common t-window (the union of the individual ones)
    so the sampling collapses into a single interpolator call; offsets
    whose rays miss the box contribute exactly zero through the fill.
    """
    omega = np.asarray(omega, float)
    omega = omega / np.linalg.norm(omega)
    V = np.atleast_2d(np.asarray(V, float))
    V = V - np.outer(V @ omega, omega)
    t0, t1 = math.inf, -math.inf
    for v in V:
        window = _ray_window(w, omega, v)
        if window is not None:
            t0 = min(t0, window[0])
            t1 = max(t1, window[1])
    if not (t0 < t1):
        return np.zeros(V.shape[0])
    ts = _t_lattice(w, t0, t1)
    pts = V[:, None, :] + ts[None, :, None] * omega[None, None, :]
    vals = w.sample(pts.reshape(-1, w.ndim)).reshape(V.shape[0], ts.size)
    return np.trapezoid(vals, ts, axis=1)


def _node_frame(S: SurfaceModel, i: int) -> np.ndarray:
    """Orthonormal tangent directions at node i, rows of shape (n-1, n)."""
    if S.ambient_dim == 2:
        return S.tangents[i][None, :]
    return S.tangents[i]


def xray_pullback(S: SurfaceModel, w: GridFunction, u_index: int, v) -> float:
    """xray with the ray aimed along the normal at node u_index.

    v holds tangent coordinates with respect to the node frame (a scalar
    on curves).
    """
    E = _node_frame(S, u_index)
    coeff = np.atleast_1d(np.asarray(v, float))
    return xray(w, S.normals[u_index], coeff @ E)


def xray_pullback_grid(S: SurfaceModel, w: GridFunction, u_index: int,
                       axes: list[np.ndarray]) -> np.ndarray:
    """Pullback values on a tensor grid of tangent coordinates."""
    E = _node_frame(S, u_index)
    mesh = np.meshgrid(*axes, indexing="ij")
    coeffs = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    vals = xray_parallel(w, S.normals[u_index], coeffs @ E)
    return vals.reshape([len(a) for a in axes])


def _slice_value(slc, vt: np.ndarray) -> float:
    """Evaluate one slice at an off-grid tangent point.

    Slices whose Fourier data matches the physical grid are band-limited,
    so the stored spectrum gives the exact value as a finite trig sum;
    otherwise fall back to linear interpolation of the physical values.
    """
    if getattr(slc, "fourier", None) is not None and \
            np.shape(slc.fourier) == np.shape(slc.values):
        cell = float(np.prod(np.atleast_1d(slc.xi_spacing)))
        acc = np.asarray(slc.fourier)
        for k in range(acc.ndim):
            xi = np.atleast_1d(slc.xi_origin)[k] + \
                np.atleast_1d(slc.xi_spacing)[k] * np.arange(acc.shape[0])
            phase = np.exp(-2j * math.pi * vt[k] * xi)
            acc = np.tensordot(phase, acc, axes=(0, 0))
        return float(np.real(complex(acc) * cell))
    return float(np.real(complex(slc.as_grid().sample(vt[None, :])[0])))


def xray_adjoint(S: SurfaceModel, slices, x) -> float:
    """Superpose phase-space slices: sum of h(u, P_{T_u} x) over nodes.

    Each slice is evaluated at the tangential part of x expressed in its
    node frame; a point that leaves a slice's v-grid raises OutOfBand
    since extrapolating phase-space data silently would corrupt the
    quadrature.  Nodes without a slice contribute zero.
    """
    x = np.asarray(x, float)
    total = 0.0
    for slc in slices:
        i = slc.u_index
        vt = _node_frame(S, i) @ x
        origin = np.atleast_1d(slc.v_origin)
        spacing = np.atleast_1d(slc.v_spacing)
        shape = np.asarray(slc.values.shape)
        hi = origin + (shape - 1) * spacing
        if np.any(vt < origin - 1e-9) or np.any(vt > hi + 1e-9):
            raise OutOfBand(
                f"P_T x = {vt} exits the v-grid of the slice at node {i}")
        total += _slice_value(slc, vt) * float(S.weights[i])
    return total


def rho_star(w: GridFunction, x: float, v: float) -> float:
    """Straight-line time average: integral over t of w(x - 2 t v, t)."""
    ts_lo = float(w.origin[1])
    ts_hi = float(w.origin[1] + (w.shape[1] - 1) * w.spacing[1])
    step = 0.5 * float(w.spacing.min())
    nt = max(2, int(math.ceil((ts_hi - ts_lo) / step)) + 1)
    ts = np.linspace(ts_lo, ts_hi, nt)
    pts = np.stack([x - 2.0 * ts * v, ts], axis=-1)
    return float(np.trapezoid(w.sample(pts), ts))


def rho_star_grid(w: GridFunction, xs: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """rho_star on a tensor (x, v) grid, vectorized over x per velocity."""
    xs = np.asarray(xs, float)
    vs = np.asarray(vs, float)
    ts_lo = float(w.origin[1])
    ts_hi = float(w.origin[1] + (w.shape[1] - 1) * w.spacing[1])
    step = 0.5 * float(w.spacing.min())
    nt = max(2, int(math.ceil((ts_hi - ts_lo) / step)) + 1)
    ts = np.linspace(ts_lo, ts_hi, nt)
    out = np.empty((xs.size, vs.size))
    for j, v in enumerate(vs):
        px = xs[:, None] - 2.0 * ts[None, :] * v
        pts = np.stack([px, np.broadcast_to(ts, px.shape)], axis=-1)
        vals = w.sample(pts.reshape(-1, 2)).reshape(px.shape)
        out[:, j] = np.trapezoid(vals, ts, axis=1)
    return out


def velocity_average(f0: GridFunction, x: float, t: float) -> float:
    """Transported velocity integral of a phase-space density.

    Evaluates the integral over v of f0(x + 2 t v, v); at t = 0 this is
    the plain second-coordinate marginal at x.
    """
    return float(velocity_average_many(f0, np.asarray([x]), t)[0])


def velocity_average_many(f0: GridFunction, X: np.ndarray, t: float) -> np.ndarray:
    X = np.asarray(X, float)
    if abs(t) < 1e-14:
        # plain marginal: sampling on the v-lattice and its midpoints keeps
        # grid abscissae exact
        vs_lo = float(f0.origin[1])
        vs_hi = float(f0.origin[1] + (f0.shape[1] - 1) * f0.spacing[1])
        step = 0.5 * float(f0.spacing[1])
        nv = max(2, int(math.ceil((vs_hi - vs_lo) / step)) + 1)
        vs = np.linspace(vs_lo, vs_hi, nv)
        px = np.broadcast_to(X[:, None], (X.size, nv)).copy()
        pts = np.stack([px, np.broadcast_to(vs, px.shape)], axis=-1)
        vals = f0.sample(pts.reshape(-1, 2)).reshape(px.shape)
        return np.trapezoid(vals, vs, axis=1)
    # A tilted section is a line integral through phase space, so delegate
    # to the snapped ray lattice: its half-cell step resolves the kinks the
    # bilinear interpolant has at every cell crossing, which a v-step tied
    # to the velocity axis alone leaves unresolved when the x-axis is finer.
    speed = math.sqrt(1.0 + 4.0 * t * t)
    omega = np.array([2.0 * t, 1.0]) / speed
    P = np.stack([X, np.zeros_like(X)], axis=-1)
    return xray_parallel(f0, omega, P) / speed


def sinogram(w: GridFunction, angles: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Plane ray transform tabulated over (angle, offset); rows follow angles."""
    out = np.empty((len(angles), len(offsets)))
    for a, th in enumerate(angles):
        omega = np.array([math.cos(th), math.sin(th)])
        perp = np.array([-omega[1], omega[0]])
        out[a] = xray_parallel(w, omega, np.outer(offsets, perp))
    return out
