"""Cross-module identity and inequality checks, plus the suite runner.

The single-purpose modules each certify one construction in isolation; this
module plays them against each other.  ``check_pairing`` compares the
weighted extension energy with the phase-space pairing assembled from
surface Wigner slices and ray transforms of the weight.  The two weighted
energy bounds, ``check_sobolev_stein`` (integral form of the right-hand
side) and ``check_sobolev_mt`` (sup form over the reachable-midpoint set),
evaluate both sides honestly and record the raw ratio against a documented
budget; the budgets absorb the non-explicit dimensional constants, so every
record archives the ratio for later tightening.

``run_suite`` executes named blocks of frozen cases behind a JSON-style
config and returns a report whose CSV/JSON serialization is deterministic:

    {"suites": ["pairing", "marginals", ...] | "all",
     "cases":  [{"check": "pairing", "surface": {...}, ...}, ...]}

An empty config runs nothing and passes; a missing config (``None``) means
the full default suite.  Per-case failures become error records rather than
exceptions, so one sick case cannot hide the health of the rest.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import extension, fracint, midpoint as mp, wigner, xray
from .errors import Degenerate, SingularityUnderResolved
from .flandrin import (ConvexBody, concave_layercake_check,
                       convex_wigner_integral, flandrin_ratio, hermite_profile)
from .geometry import SurfaceModel, build_surface, curvature_quotient, \
    lambda_functional
from .gridio import GridFunction, fmt12
from .records import VerificationRecord
from .sobolev import hnorm, wigner_sobolev_identity
from .tomography import delta_chord_mass, tomographic_wigner

__all__ = [
    "check_pairing", "check_pairing_chart", "check_sobolev_stein",
    "check_sobolev_mt", "check_sobolev_stein_chart", "check_sobolev_mt_chart",
    "SUITES", "default_config", "run_suite", "write_report",
]

_SEED = 20260823


# --------------------------------------------------------------- ingredients

def _arc_bump(c: float, width: float):
    """Smooth compactly supported bump on a curve parameter."""
    def g(t):
        t = np.asarray(t, float)
        z = (t - c) / width
        out = np.zeros_like(z)
        m = np.abs(z) < 1.0
        out[m] = np.exp(1.0 - 1.0 / (1.0 - z[m] ** 2))
        return out
    return g


def _arc_gauss(c: float, width: float):
    def g(t):
        t = np.asarray(t, float)
        return np.exp(-np.pi * (t - c) ** 2 / (width * width))
    return g


def _cap_bump(depth: float):
    """Density on the sphere cap, peaked at the pole: exp(-(1-omega_3)/depth)."""
    def g(om):
        om = np.asarray(om, float)
        return np.exp(-(1.0 - om[..., 2]) / depth)
    return g


def _gauss_weight(center, s2: float, half: float, n: int) -> GridFunction:
    """Gaussian exp(-pi |x-c|^2 / s2) sampled on a cube around its center."""
    center = np.asarray(center, float)
    d = center.size
    step = 2.0 * half / (n - 1)
    origin = center - half
    axes = [origin[k] + step * np.arange(n) for k in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    r2 = sum((m - center[k]) ** 2 for k, m in enumerate(mesh))
    return GridFunction(np.exp(-math.pi * r2 / s2), origin, np.full(d, step))


def _signed_weight(c1, c2, s2: float, half: float, n: int) -> GridFunction:
    """Difference of two Gaussians; genuinely changes sign between centers."""
    c1 = np.asarray(c1, float)
    c2 = np.asarray(c2, float)
    step = 2.0 * half / (n - 1)
    origin = 0.5 * (c1 + c2) - half
    axes = [origin[k] + step * np.arange(n) for k in range(c1.size)]
    mesh = np.meshgrid(*axes, indexing="ij")
    r1 = sum((m - c1[k]) ** 2 for k, m in enumerate(mesh))
    r2 = sum((m - c2[k]) ** 2 for k, m in enumerate(mesh))
    vals = np.exp(-math.pi * r1 / s2) - 0.8 * np.exp(-math.pi * r2 / s2)
    return GridFunction(vals, origin, np.full(c1.size, step))


def _node_values(S: SurfaceModel, g) -> np.ndarray:
    """Node samples of a density callable, honoring the per-kind convention."""
    if S.ambient_dim == 2:
        return np.asarray(g(S.param), complex)
    if S.kind == "sphere2-cap":
        return np.asarray(g(S.points), complex)
    return np.asarray(g(S.param), complex)


def _trap_weights(shape) -> np.ndarray:
    """Tensor trapezoid weights, the same rule weighted_l2 applies."""
    out = np.ones(shape[0])
    out[0] = out[-1] = 0.5
    for m in shape[1:]:
        t = np.ones(m)
        t[0] = t[-1] = 0.5
        out = np.multiply.outer(out, t)
    return out


def _slice_axes(slc) -> list[np.ndarray]:
    origin = np.atleast_1d(slc.v_origin)
    spacing = np.atleast_1d(slc.v_spacing)
    return [origin[k] + spacing[k] * np.arange(slc.values.shape[k])
            for k in range(np.ndim(slc.values))]


def _slice_at_points(slc, P: np.ndarray) -> np.ndarray:
    """Band-limited slice values at arbitrary tangent points (m, 2).

    Same trig sum as the single-point adjoint evaluation, batched through
    one einsum per slice.
    """
    F = np.asarray(slc.fourier) * float(np.prod(np.atleast_1d(slc.xi_spacing)))
    xi0 = np.atleast_1d(slc.xi_origin)
    dxi = np.atleast_1d(slc.xi_spacing)
    xi = [xi0[k] + dxi[k] * np.arange(F.shape[k]) for k in range(F.ndim)]
    A = np.exp(-2j * math.pi * np.outer(P[:, 0], xi[0]))
    B = np.exp(-2j * math.pi * np.outer(P[:, 1], xi[1]))
    return np.real(np.einsum("mi,ij,mj->m", A, F, B, optimize=True))


# ------------------------------------------------------------- the pairing

def check_pairing(S: SurfaceModel, g, w: GridFunction, nodes_v: int = 256,
                  tol: float = 1e-3, label: str = "") -> VerificationRecord:
    """Weighted extension energy against the slice/ray phase-space pairing.

    On curves the right-hand side integrates each Wigner slice against the
    ray transform of the weight on the slice's own velocity lattice.  On the
    sphere the same pairing is assembled in the ambient variable instead:
    the slices are superposed on the weight grid (they are band-limited, so
    the evaluation is exact) and the ray integration is absorbed into the
    shared volume quadrature.  Either way both sides are independent
    pipelines fed by the same density and weight.
    """
    name = label or f"pairing[{S.kind}]"
    lhs = extension.weighted_l2(S, _node_values(S, g), w)
    if S.ambient_dim == 2:
        rhs = 0.0
        for i in range(S.node_count):
            slc = wigner.surface_wigner(S, g, g, i, nodes_v=nodes_v)
            X = xray.xray_pullback_grid(S, w, i, _slice_axes(slc))
            rhs += float(S.weights[i]) * float(np.sum(slc.values * X)) \
                * float(np.prod(np.atleast_1d(slc.v_spacing)))
        return VerificationRecord.compare(name, lhs, rhs, tol)
    if S.kind != "sphere2-cap":
        raise ValueError("pairing check supports curves and sphere caps")
    quad = (_trap_weights(w.shape) * w.values).reshape(-1) * w.cell_volume
    pts = np.stack(w.meshgrid(), axis=-1).reshape(-1, 3)
    keep = np.abs(quad) > 1e-16 * float(np.abs(quad).max(initial=0.0))
    pts, quad = pts[keep], quad[keep]
    rhs = 0.0
    for i in range(S.node_count):
        slc = wigner.surface_wigner(S, g, g, i, nodes_v=nodes_v)
        vals = _slice_at_points(slc, pts @ S.tangents[i].T)
        rhs += float(S.weights[i]) * float(np.dot(vals, quad))
    return VerificationRecord.compare(name, lhs, rhs, tol)


def _chart_surface(support, nodes: int) -> SurfaceModel:
    """Parabolic dictionary patch: graph curve in d=1, paraboloid in d=2."""
    if np.ndim(support) == 0:
        return build_surface("paraboloid-patch",
                             {"halfwidth": float(support)}, nodes)
    lo, hi = (float(v) for v in support)
    return build_surface("graph-curve", {"fn": "t2", "interval": [lo, hi]},
                         nodes)


def _chart_speed(S: SurfaceModel) -> np.ndarray:
    if S.ambient_dim == 2:
        return np.sqrt(1.0 + 4.0 * S.param ** 2)
    return np.sqrt(1.0 + 4.0 * np.sum(S.param ** 2, axis=1))


def _chart_lhs(uhat, w: GridFunction, support, nodes: int) -> float:
    """Extension route for the flat dictionary.

    The conjugate profile divided by the graph speed turns the surface
    measure back into coordinate measure, and the evolution convention
    evaluates the extension at the reflected point.
    """
    S = _chart_surface(support, nodes)
    dens = np.asarray(uhat(S.param), complex) / _chart_speed(S)
    pts = -np.stack(w.meshgrid(), axis=-1).reshape(-1, w.ndim)
    I2 = np.abs(extension.extend_many(S, dens, pts)) ** 2
    return float(np.sum(I2.reshape(w.shape) * w.values * _trap_weights(w.shape))
                 * w.cell_volume)


def check_pairing_chart(uhat, u0: GridFunction, w: GridFunction, support,
                        nodes: int, w_fn=None, tol: float = 1e-3,
                        label: str = "") -> VerificationRecord:
    """Flat-dictionary pairing: extension energy against Wigner transport.

    ``uhat`` is the conjugate profile as a callable (the extension side only
    ever sees that face), ``u0`` its physical samples for the Wigner side.
    The right-hand side pairs the classical Wigner transform with the
    time-averaged pullback of the weight along straight characteristics,
    sharing the weight's own time lattice; ``w_fn(x..., t)``, when given,
    evaluates the weight off-lattice exactly instead of by interpolation.
    """
    d = u0.ndim
    if w.ndim != d + 1:
        raise ValueError("weight must carry one time axis over the profile")
    name = label or f"pairing-chart[d={d}]"
    lhs = _chart_lhs(uhat, w, support, nodes)
    W = wigner.classical_wigner(u0)
    t_ax = w.axis(d)
    tw = np.ones(t_ax.size)
    tw[0] = tw[-1] = 0.5
    rhs = 0.0
    if d == 1:
        X = W.axis(0)[:, None]
        V = W.axis(1)[None, :]
        for k, tk in enumerate(t_ax):
            if w_fn is not None:
                vals = w_fn(X - 2.0 * tk * V, np.full((1, 1), tk))
            else:
                q = np.stack([np.broadcast_to(X - 2.0 * tk * V, W.shape),
                              np.full(W.shape, tk)], axis=-1)
                vals = w.sample(q.reshape(-1, 2)).reshape(W.shape)
            rhs += float(tw[k]) * float(np.einsum("ij,ij->", W.values, vals))
    else:
        X1 = W.axis(0)[:, None, None, None]
        X2 = W.axis(1)[None, :, None, None]
        V1 = W.axis(2)[None, None, :, None]
        V2 = W.axis(3)[None, None, None, :]
        for k, tk in enumerate(t_ax):
            if w_fn is not None:
                vals = w_fn(X1 - 2.0 * tk * V1, X2 - 2.0 * tk * V2,
                            np.full((1, 1, 1, 1), tk))
            else:
                q1 = np.broadcast_to(X1 - 2.0 * tk * V1, W.shape)
                q2 = np.broadcast_to(X2 - 2.0 * tk * V2, W.shape)
                q = np.stack([q1, q2, np.full(W.shape, tk)], axis=-1)
                vals = w.sample(q.reshape(-1, 3)).reshape(W.shape)
            rhs += float(tw[k]) * float(
                np.einsum("ijab,ijab->", W.values, vals))
    rhs *= W.cell_volume * float(t_ax[1] - t_ax[0])
    return VerificationRecord.compare(name, lhs, rhs, tol)


# ------------------------------------------------- weighted energy bounds

def _pullback_norms(S: SurfaceModel, w: GridFunction, s: float,
                    node_indices: np.ndarray, v_extent: float,
                    v_nodes: int) -> np.ndarray:
    """Homogeneous Sobolev norms of the weight's ray slices at given nodes.

    Curves get a shared symmetric velocity window; on the sphere each node's
    square window is centered at the projection of the weight's barycenter
    so the slice decays inside the window whatever the node.
    """
    out = np.empty(node_indices.size)
    if S.ambient_dim == 2:
        vax = np.linspace(-v_extent, v_extent, v_nodes)
        dv = vax[1] - vax[0]
        for j, i in enumerate(node_indices):
            X = xray.xray_pullback_grid(S, w, int(i), [vax])
            out[j] = hnorm(GridFunction(X, np.array([vax[0]]),
                                        np.array([dv])), s)
        return out
    mesh = np.stack(w.meshgrid(), axis=-1)
    mass = np.abs(w.values)
    bary = (mesh * mass[..., None]).reshape(-1, 3).sum(axis=0) \
        / max(float(mass.sum()), 1e-300)
    off = np.linspace(-v_extent, v_extent, v_nodes)
    dv = off[1] - off[0]
    for j, i in enumerate(node_indices):
        ct = S.tangents[int(i)] @ bary
        axes = [ct[0] + off, ct[1] + off]
        X = xray.xray_pullback_grid(S, w, int(i), axes)
        out[j] = hnorm(GridFunction(X, np.array([axes[0][0], axes[1][0]]),
                                    np.array([dv, dv])), s)
    return out


def _stride_nodes(S: SurfaceModel, subsample) -> tuple[np.ndarray, np.ndarray]:
    """Node subset and matching quadrature weights for the right-hand sides.

    Curves keep every node.  On the sphere the (theta, phi) product lattice
    is strided, scaling the retained weights by the stride product; the
    integrands are smooth, so this trades a percent-level quadrature error
    for an order of magnitude of ray-transform work.
    """
    if S.ambient_dim == 2 or subsample in (None, 1, (1, 1)):
        idx = np.arange(S.node_count)
        return idx, S.weights[idx]
    st, sp = subsample
    grid = np.arange(S.node_count).reshape(S.grid_shape)
    idx = grid[::st, ::sp].reshape(-1)
    return idx, S.weights[idx] * (st * sp)


def _abs2(g):
    def f(p):
        return np.abs(np.asarray(g(p))) ** 2
    return f


def check_sobolev_stein(S: SurfaceModel, g, w: GridFunction, s: float,
                        c: float = 10.0, budget: str = "curvature",
                        v_extent: float = 3.0, v_nodes: int = 301,
                        subsample=None, label: str = "") -> VerificationRecord:
    """Integral-form weighted energy bound; records the raw ratio.

    The right-hand core integrates, over the surface, the square root of the
    collision-paired fractional integral of |g|^2 times the homogeneous
    Sobolev norm of the weight's ray slice.  The asserted budget is
    c * Q^{(5n-8)/4}, or c * Lambda(S) for plane curves when
    ``budget="plane"``.
    """
    n = S.ambient_dim
    if not 0.0 < s < (n - 1) / 2.0:
        raise ValueError(f"order s={s} outside (0, {(n - 1) / 2})")
    name = label or f"sobolev-stein[{S.kind},s={s:g}]"
    lhs = extension.weighted_l2(S, _node_values(S, g), w)
    idx, wts = _stride_nodes(S, subsample)
    gsq = _abs2(g)
    I = np.zeros(idx.size)
    skipped = 0
    for j, i in enumerate(idx):
        try:
            I[j] = fracint.frac_integral_surface(S, gsq, gsq, 2.0 * s,
                                                 int(i))
        except SingularityUnderResolved:
            # support-edge nodes where the density is at noise scale; the
            # collision zone there cannot be certified, and omitting its
            # nonnegative mass only inflates the recorded ratio
            skipped += 1
    hn = _pullback_norms(S, w, s, idx, v_extent, v_nodes)
    rhs = float(np.sum(wts * np.sqrt(np.clip(I, 0.0, None)) * hn))
    ratio = 0.0 if lhs == 0.0 else (math.inf if rhs == 0.0 else lhs / rhs)
    if budget == "plane":
        scale = lambda_functional(S)
        limit = c * scale
        tag = "Lambda"
    else:
        scale = curvature_quotient(S)
        limit = c * scale ** ((5 * n - 8) / 4.0)
        tag = "Q"
    return VerificationRecord.bound(name, ratio, limit, detail={
        "lhs": lhs, "rhs_core": rhs, tag: scale, "budget": budget,
        "nodes_used": int(idx.size), "zones_skipped": skipped})


def check_sobolev_mt(S: SurfaceModel, g, w: GridFunction, s: float,
                     c: float = 10.0, v_extent: float = 3.0,
                     v_nodes: int = 301, subsample=None,
                     label: str = "") -> VerificationRecord:
    """Sup-form weighted energy bound over the reachable-midpoint set."""
    n = S.ambient_dim
    if not 0.0 < s < (n - 1) / 2.0:
        raise ValueError(f"order s={s} outside (0, {(n - 1) / 2})")
    name = label or f"sobolev-mt[{S.kind},s={s:g}]"
    lhs = extension.weighted_l2(S, _node_values(S, g), w)
    mask = fracint.supp_star_mask(S, g, g)
    idx, _ = _stride_nodes(S, subsample)
    idx = idx[mask[idx]]
    gl2 = float(np.sum(np.abs(_node_values(S, g)) ** 2 * S.weights))
    if idx.size == 0 or gl2 == 0.0:
        rhs = 0.0
    else:
        rhs = float(np.max(_pullback_norms(S, w, s, idx, v_extent,
                                           v_nodes))) * gl2
    ratio = 0.0 if lhs == 0.0 else (math.inf if rhs == 0.0 else lhs / rhs)
    q = curvature_quotient(S)
    limit = c * q ** ((9 * n - 12) / 4.0)
    return VerificationRecord.bound(name, ratio, limit, detail={
        "lhs": lhs, "rhs_core": rhs, "Q": q, "midpoint_nodes": int(idx.size)})


def _chart_f_grid(uhat, support, n: int = 441) -> GridFunction:
    """|uhat|^2 on a uniform one-dimensional grid over the support window."""
    lo, hi = (float(v) for v in support)
    ax = np.linspace(lo, hi, n)
    vals = np.abs(np.asarray(uhat(ax), complex)) ** 2
    return GridFunction(vals, np.array([lo]), np.array([ax[1] - ax[0]]))


def check_sobolev_stein_chart(uhat, w: GridFunction, s: float, support,
                              nodes: int = 481, c: float = 10.0,
                              v_stride: int = 4,
                              label: str = "") -> VerificationRecord:
    """Integral-form bound on the flat dictionary (one space dimension).

    The translation-dilation symmetry of the dictionary leaves no curvature
    quotient to budget with, so the asserted limit is the bare constant.
    """
    if w.ndim != 2:
        raise ValueError("chart bound takes a space-time weight, d = 1")
    if not 0.0 < s < 0.5:
        raise ValueError("order must sit in (0, 1/2)")
    name = label or f"sobolev-stein-chart[s={s:g}]"
    lhs = _chart_lhs(uhat, w, support, nodes)
    F = _chart_f_grid(uhat, support)
    vs = F.axis(0)[::v_stride]
    dv = float(vs[1] - vs[0])
    t_hi = float(np.max(np.abs(w.axis(1))))
    x_hi = float(np.max(np.abs(w.axis(0)))) + 2.0 * t_hi * float(
        np.max(np.abs(vs))) + 0.4
    xs = np.linspace(-x_hi, x_hi, int(2 * x_hi / 0.03) + 1)
    A = xray.rho_star_grid(w, xs, vs)
    I = np.array([fracint.frac_integral_euclid(F, F, 2.0 * s, [float(v)])
                  for v in vs])
    hx = np.array([hnorm(GridFunction(A[:, j], np.array([xs[0]]),
                                      np.array([xs[1] - xs[0]])), s)
                   for j in range(vs.size)])
    rhs = float(np.sum(np.sqrt(np.clip(I, 0.0, None)) * hx) * dv)
    ratio = 0.0 if lhs == 0.0 else (math.inf if rhs == 0.0 else lhs / rhs)
    return VerificationRecord.bound(name, ratio, c, detail={
        "lhs": lhs, "rhs_core": rhs})


def check_sobolev_mt_chart(uhat, w: GridFunction, s: float, support,
                           nodes: int = 481, c: float = 10.0,
                           v_stride: int = 4,
                           label: str = "") -> VerificationRecord:
    """Sup-form bound on the flat dictionary, sup over the frequency hull.

    The reachable set of the flat reflection is the midpoint hull of the
    conjugate support, an interval here.
    """
    if w.ndim != 2:
        raise ValueError("chart bound takes a space-time weight, d = 1")
    if not 0.0 < s < 0.5:
        raise ValueError("order must sit in (0, 1/2)")
    name = label or f"sobolev-mt-chart[s={s:g}]"
    lhs = _chart_lhs(uhat, w, support, nodes)
    F = _chart_f_grid(uhat, support)
    u_l2 = F.trapezoid()
    live = np.nonzero(F.values > 1e-12 * float(F.values.max()))[0]
    hull = (float(F.axis(0)[live[0]]), float(F.axis(0)[live[-1]]))
    vs = F.axis(0)[::v_stride]
    vs = vs[(vs >= hull[0]) & (vs <= hull[1])]
    t_hi = float(np.max(np.abs(w.axis(1))))
    x_hi = float(np.max(np.abs(w.axis(0)))) + 2.0 * t_hi * float(
        np.max(np.abs(vs))) + 0.4
    xs = np.linspace(-x_hi, x_hi, int(2 * x_hi / 0.03) + 1)
    A = xray.rho_star_grid(w, xs, vs)
    sup = max(hnorm(GridFunction(A[:, j], np.array([xs[0]]),
                                 np.array([xs[1] - xs[0]])), s)
              for j in range(vs.size))
    rhs = sup * u_l2
    ratio = 0.0 if lhs == 0.0 else (math.inf if rhs == 0.0 else lhs / rhs)
    return VerificationRecord.bound(name, ratio, c, detail={
        "lhs": lhs, "rhs_core": rhs, "hull": list(hull)})


# ------------------------------------------------------------ frozen suites

def suite_pairing() -> list[VerificationRecord]:
    """Six pairing cases: four patch geometries, both density flavors, both
    weight signs, and both assembly routes for the right-hand side."""
    recs = []
    circ = build_surface("circle-arc", {"radius": 1.0, "aperture_deg": 170.0},
                         192)
    w_pos = _gauss_weight([0.2, -0.1], 0.5, 3.0, 141)
    recs.append(check_pairing(circ, _arc_bump(0.1, 0.6), w_pos,
                              label="pairing[circle,bump,+w]"))
    w_sgn = _signed_weight([0.35, 0.2], [-0.4, -0.25], 0.4, 3.0, 141)
    recs.append(check_pairing(circ, _arc_gauss(-0.2, 0.55), w_sgn,
                              label="pairing[circle,gauss,signed-w]"))
    par = build_surface("graph-curve", {"fn": "t2", "interval": [-1.2, 1.2]},
                        385)
    wp = _gauss_weight([0.1, 0.3], 0.45, 2.8, 127)
    recs.append(check_pairing(par, _arc_gauss(0.15, 0.5), wp,
                              label="pairing[parabola,gauss,+w]"))
    wps = _signed_weight([0.3, 0.35], [-0.3, 0.1], 0.4, 2.8, 181)
    recs.append(check_pairing(par, _arc_bump(-0.1, 0.7), wps,
                              label="pairing[parabola,bump,signed-w]"))

    g2 = 0.64
    def uhat2(P):
        P = np.asarray(P, float)
        return (1.0 / g2) * np.exp(-math.pi * np.sum(P ** 2, axis=-1) / g2)
    x0 = np.array([0.2, -0.1])
    sw2, st2 = 0.1225, 0.0625
    def wfn(q1, q2, t):
        r2 = (q1 - x0[0]) ** 2 + (q2 - x0[1]) ** 2
        return np.exp(-math.pi * r2 / sw2) * np.exp(
            -math.pi * np.square(t) / st2) * (1.0 + 0.4 * np.sin(2.1 * t))
    h, N = 0.16, 41
    half = h * (N - 1) / 2.0
    ax = -half + h * np.arange(N)
    XX, YY = np.meshgrid(ax, ax, indexing="ij")
    u0 = GridFunction(np.exp(-math.pi * g2 * (XX ** 2 + YY ** 2)),
                      np.array([-half, -half]), np.array([h, h]))
    w3 = GridFunction(np.zeros((21, 21, 12)),
                      np.array([x0[0] - 0.75, x0[1] - 0.75, -0.55]),
                      np.array([0.075, 0.075, 0.1]))
    Q1, Q2, QT = w3.meshgrid()
    w3.values = wfn(Q1, Q2, QT)
    recs.append(check_pairing_chart(uhat2, u0, w3, support=1.55, nodes=168,
                                    w_fn=wfn,
                                    label="pairing[paraboloid-r3,chart]"))

    sph = build_surface("sphere2-cap", {"aperture_deg": 60.0}, 20)
    wsph = _gauss_weight([0.15, -0.1, 0.8], 0.12, 1.1, 23)
    recs.append(check_pairing(sph, _cap_bump(0.05), wsph, nodes_v=24,
                              label="pairing[sphere2,bump,+w]"))
    return recs


def suite_marginals() -> list[VerificationRecord]:
    """Surface marginals against extension intensity at 20 points per case,
    and the Gaussian-cutoff velocity marginal shrinking onto |g(u)|^2."""
    recs = []
    rng = np.random.default_rng(_SEED)
    cases = [
        ("circle", build_surface("circle-arc", {"radius": 1.0,
                                                "aperture_deg": 170.0}, 192),
         _arc_bump(0.1, 0.6)),
        ("parabola", build_surface("graph-curve",
                                   {"fn": "t2", "interval": [-0.8, 0.8]},
                                   257), _arc_gauss(0.0, 0.45)),
        ("sphere2", build_surface("sphere2-cap", {"aperture_deg": 60.0}, 16),
         _cap_bump(0.05)),
    ]
    for tag, S, g in cases:
        gv = _node_values(S, g)
        lim = extension.resolution_limit(S)
        pts = rng.uniform(-1.0, 1.0, size=(20, S.ambient_dim))
        pts *= min(0.9 * lim, 1.5) / math.sqrt(S.ambient_dim)
        worst = (0.0, 0.0, 0.0)
        for x in pts:
            ms = wigner.marginal_surface(S, g, x)
            it = abs(extension.extend(S, gv, x)) ** 2
            rel = abs(ms - it) / max(abs(it), 1e-300)
            if rel >= worst[0]:
                worst = (rel, ms, it)
        recs.append(VerificationRecord.compare(
            f"marginal-surface[{tag}]", worst[1], worst[2], 1e-3,
            detail={"points": 20}))
    cutoff = [
        ("circle", build_surface("circle-arc", {"radius": 1.0,
                                                "aperture_deg": 60.0}, 257),
         _arc_bump(0.0, 0.35), 100),
        ("parabola", build_surface("graph-curve",
                                   {"fn": "t2", "interval": [-0.8, 0.8]},
                                   641), _arc_gauss(0.0, 0.45), 320),
        ("sphere2", build_surface("sphere2-cap", {"aperture_deg": 24.0},
                                  64), _cap_bump(0.05), 5 * 384 + 12),
    ]
    for tag, S, g, iu in cutoff:
        target = float(abs(_node_values(S, g)[iu]) ** 2)
        vals = [wigner.marginal_velocity(S, g, iu, r).real
                for r in (8.0, 16.0, 32.0, 64.0)]
        errs = [abs(v - target) for v in vals]
        rec = VerificationRecord.compare(
            f"marginal-velocity[{tag}]", vals[-1], target, 1e-2,
            detail={"errors": errs})
        rec.passed = bool(rec.passed and all(
            errs[k + 1] < errs[k] for k in range(len(errs) - 1)))
        recs.append(rec)
    return recs


def suite_jacobians() -> list[VerificationRecord]:
    """Pushforward, switch, lower-bound, diagonal-limit and closed-form
    spot checks of the midpoint Jacobians on all four patch families."""
    rng = np.random.default_rng(_SEED)
    recs = []
    circ = build_surface("circle-arc", {"radius": 1.0, "aperture_deg": 60.0},
                         129)
    rec = mp.pushforward_check(circ, 40,
                               lambda t: 1.0 if -0.17 <= t <= 0.17 else 0.0,
                               support=(-0.17, 0.17))
    recs.append(VerificationRecord.compare("jacobian-pushforward[circle]",
                                           rec.lhs, rec.rhs, 1e-5))
    parab = build_surface("paraboloid-patch", {"halfwidth": 1.0}, 96)
    x0 = np.array([0.1, -0.05])
    rec = mp.pushforward_check(
        parab, 96 * 48 + 40,
        lambda x: float(np.exp(-np.sum((x - x0) ** 2) / 0.045)))
    recs.append(VerificationRecord.compare("jacobian-pushforward[paraboloid]",
                                           rec.lhs, rec.rhs, 1e-5))

    curves = [
        ("circle", build_surface("circle-arc",
                                 {"radius": 1.0, "aperture_deg": 120.0},
                                 257)),
        ("parabola", build_surface("graph-curve",
                                   {"fn": "t2", "interval": [-1.0, 1.0]},
                                   257)),
        ("ellipse", build_surface("ellipse-arc",
                                  {"a": 2.0, "b": 1.0, "aperture_deg": 30.0},
                                  256)),
    ]
    sph = build_surface("sphere2-cap", {"aperture_deg": 60.0}, 20)
    for tag, S in curves:
        t = S.param
        worst = 0.0
        pairs = 0
        while pairs < 100:
            t_u, t_p = rng.uniform(t[4], t[-5], size=2)
            if abs(t_u - t_p) < 1e-3:
                continue
            tpp = mp.reflect_param(S, t_u, t_p)
            lhs = float(mp.curve_jacobian_J(S, t_u, t_p)) * \
                mp.curve_delta_fd(S, t_u, tpp, h=1e-5)
            rhs = float(mp.curve_jacobian_J(S, t_u, tpp))
            worst = max(worst, abs(lhs - rhs) / rhs)
            pairs += 1
        recs.append(VerificationRecord.bound(f"jacobian-switch[{tag}]",
                                             worst, 1e-5))
    worst = 0.0
    pairs = 0
    while pairs < 100:
        i, j = (int(v) for v in rng.integers(0, sph.node_count, size=2))
        if i == j:
            continue
        om, omp = sph.points[i], sph.points[j]
        om2 = mp.reflect_sphere(om, omp)
        lhs = 4.0 * abs(np.dot(om, omp)) * mp.sphere_delta_fd(om, om2, h=1e-5)
        rhs = 4.0 * abs(np.dot(om, om2))
        worst = max(worst, abs(lhs - rhs) / rhs)
        pairs += 1
    recs.append(VerificationRecord.bound("jacobian-switch[sphere2]",
                                         worst, 1e-5))

    deficit = 0.0
    for _, S in curves + [("sphere2", sph), ("paraboloid", parab)]:
        done = 0
        while done < 100:
            i, j = (int(v) for v in rng.integers(0, S.node_count, size=2))
            if i == j:
                continue
            try:
                jt = mp.jacobian_Jtilde(S, i, j)
                dl = mp.jacobian_Delta(S, i, j)
            except Degenerate:
                # wide arcs fold the tangent chart past a quarter turn;
                # the chart Jacobian only means something where it exists
                continue
            deficit = max(deficit, math.sqrt(1.0 + dl * dl) - jt)
            done += 1
    recs.append(VerificationRecord.bound("jacobian-floor[all-kinds]",
                                         max(deficit, 0.0), 1e-4))

    P = curves[1][1]
    d0 = 2e-3
    for tag, fn in (
            ("J", lambda d: float(mp.curve_jacobian_J(P, 0.3, 0.3 + d))),
            ("Jtilde", lambda d: mp.curve_jtilde_fd(P, 0.3, 0.3 + d,
                                                    h=1e-6))):
        extrap = 2.0 * fn(d0 / 2.0) - fn(d0)
        recs.append(VerificationRecord.bound(
            f"jacobian-diagonal[parabola,{tag}]", abs(extrap - 2.0), 1e-3))
    om = sph.points[5]
    vals = [4.0 * abs(np.dot(om, mp._geo_step(om, sph.tangents[5, 0], d)))
            for d in (d0, d0 / 2.0)]
    recs.append(VerificationRecord.bound(
        "jacobian-diagonal[sphere2]", abs(2.0 * vals[1] - vals[0] - 4.0),
        1e-3))

    worst = 0.0
    for _ in range(100):
        i, j = (int(v) for v in rng.integers(0, sph.node_count, size=2))
        if i == j:
            continue
        Jc = mp.jacobian_J(sph, i, j)
        Jf = mp.jacobian_J_fd(sph, i, j)
        worst = max(worst, abs(Jc - Jf) / Jc)
    recs.append(VerificationRecord.bound("jacobian-closed-form[sphere2]",
                                         worst, 1e-4))
    return recs


def suite_distance() -> list[VerificationRecord]:
    """Chord-ratio scan: exact window on the symmetric cap, curvature-budget
    windows on parabola and ellipse families."""
    recs = []
    S = build_surface("circle-arc", {"radius": 1.0, "aperture_deg": 60.0},
                      193)
    scan = mp.distance_ratio_scan(S)
    recs.append(VerificationRecord.bound("distance-exact-min[circle60]",
                                         abs(scan["min"] - math.sqrt(3.0)),
                                         1e-6))
    recs.append(VerificationRecord.bound("distance-exact-max[circle60]",
                                         abs(scan["max"] - 2.0), 1e-6))
    family = [
        ("parabola-0.6", build_surface("graph-curve",
                                       {"fn": "t2",
                                        "interval": [-0.6, 0.6]}, 192)),
        ("parabola-1.2", build_surface("graph-curve",
                                       {"fn": "t2",
                                        "interval": [-1.2, 1.2]}, 192)),
        ("ellipse-2-1", build_surface("ellipse-arc",
                                      {"a": 2.0, "b": 1.0,
                                       "aperture_deg": 32.0}, 192)),
        ("ellipse-1.5-0.9", build_surface("ellipse-arc",
                                          {"a": 1.5, "b": 0.9,
                                           "aperture_deg": 28.0}, 192)),
    ]
    for tag, S in family:
        q = curvature_quotient(S)
        scan = mp.distance_ratio_scan(S, max_pairs=30_000)
        recs.append(VerificationRecord.bound(
            f"distance-budget-max[{tag}]", scan["max"], 10.0 * math.sqrt(q),
            detail={"Q": q}))
        recs.append(VerificationRecord.bound(
            f"distance-budget-min[{tag}]", 1.0 / (10.0 * q * scan["min"]),
            1.0, detail={"Q": q, "min": scan["min"]}))
    return recs


def suite_sobolev_identity() -> list[VerificationRecord]:
    """Negative-order slice norms against collision-weighted quadrature at
    the three tested orders, on a cap and on a parabola patch."""
    recs = []
    S = build_surface("circle-arc", {"radius": 1.0, "aperture_deg": 60.0},
                      257)
    gn = _arc_bump(0.0, 0.35)(S.param)
    for s in (0.0, 0.25, 0.4):
        rec = wigner_sobolev_identity(S, gn, 128, s, nodes_v=1024)
        rec.name = f"sobolev-identity[circle,s={s:g}]"
        recs.append(rec)
    P = build_surface("graph-curve", {"fn": "t2", "interval": [-0.8, 0.8]},
                      257)
    gp = _arc_bump(0.1, 0.5)(P.param)
    for s in (0.0, 0.25, 0.4):
        rec = wigner_sobolev_identity(P, gp, 150, s, nodes_v=1024)
        rec.name = f"sobolev-identity[parabola,s={s:g}]"
        recs.append(rec)
    return recs


def suite_sobolev_bounds() -> list[VerificationRecord]:
    """Twelve-ratio sweep of the two weighted energy bounds.

    Six case families (three circular-arc flavors, an ellipse, the sphere
    cap, the flat dictionary) each contribute the integral-form and the
    sup-form record; one plane case asserts the arc-functional budget
    instead of the curvature-quotient power, and one uses a density with two
    separated humps so the reachable-midpoint restriction matters.
    """
    recs = []
    w2 = _gauss_weight([0.25, -0.2], 0.4, 2.6, 79)
    c60 = build_surface("circle-arc", {"radius": 1.0, "aperture_deg": 60.0},
                        192)
    g1 = _arc_bump(0.05, 0.3)
    recs.append(check_sobolev_stein(c60, g1, w2, 0.25,
                                    label="sobolev-stein[circle60,s=0.25]"))
    recs.append(check_sobolev_mt(c60, g1, w2, 0.25,
                                 label="sobolev-mt[circle60,s=0.25]"))
    c170 = build_surface("circle-arc", {"radius": 1.0, "aperture_deg": 170.0},
                         192)
    def g2(t):
        return _arc_bump(-0.75, 0.35)(t) + _arc_bump(0.85, 0.3)(t)
    recs.append(check_sobolev_stein(c170, g2, w2, 0.4, budget="plane",
                                    label="sobolev-stein[circle170,s=0.4]"))
    recs.append(check_sobolev_mt(c170, g2, w2, 0.4,
                                 label="sobolev-mt[circle170,s=0.4]"))
    ell = build_surface("ellipse-arc", {"a": 2.0, "b": 1.0,
                                        "aperture_deg": 30.0}, 192)
    g3 = _arc_bump(0.0, 0.2)
    recs.append(check_sobolev_stein(ell, g3, w2, 0.25,
                                    label="sobolev-stein[ellipse,s=0.25]"))
    recs.append(check_sobolev_mt(ell, g3, w2, 0.25,
                                 label="sobolev-mt[ellipse,s=0.25]"))
    par = build_surface("graph-curve", {"fn": "t2", "interval": [-1.0, 1.0]},
                        257)
    g4 = _arc_gauss(0.1, 0.4)
    recs.append(check_sobolev_stein(par, g4, w2, 0.4,
                                    label="sobolev-stein[parabola,s=0.4]"))
    recs.append(check_sobolev_mt(par, g4, w2, 0.4,
                                 label="sobolev-mt[parabola,s=0.4]"))

    sph = build_surface("sphere2-cap", {"aperture_deg": 60.0}, 16)
    g5 = _cap_bump(0.06)
    w3 = _gauss_weight([0.1, -0.05, 0.75], 0.045, 0.6, 21)
    recs.append(check_sobolev_stein(sph, g5, w3, 0.5, v_extent=1.5,
                                    v_nodes=39, subsample=(2, 6),
                                    label="sobolev-stein[sphere2,s=0.5]"))
    recs.append(check_sobolev_mt(sph, g5, w3, 0.5, v_extent=1.5, v_nodes=39,
                                 subsample=(2, 6),
                                 label="sobolev-mt[sphere2,s=0.5]"))

    def uhat(xi):
        xi = np.asarray(xi, float)
        return (1.0 / 0.8) * np.exp(-math.pi * (xi - 0.4) ** 2 / 0.64)
    wc = GridFunction(np.zeros((33, 21)), np.array([0.15 - 1.12, -0.75]),
                      np.array([0.07, 0.075]))
    QX, QT = wc.meshgrid()
    wc.values = np.exp(-math.pi * (QX - 0.15) ** 2 / 0.16) * \
        np.exp(-math.pi * QT ** 2 / 0.09)
    recs.append(check_sobolev_stein_chart(
        uhat, wc, 0.25, support=(-1.8, 2.6),
        label="sobolev-stein-chart[s=0.25]"))
    recs.append(check_sobolev_mt_chart(
        uhat, wc, 0.25, support=(-1.8, 2.6),
        label="sobolev-mt-chart[s=0.25]"))
    return recs


def suite_fractional() -> list[VerificationRecord]:
    """Quasinorm sweep at the recorded constant, the L^1 pairing identity,
    and the weak-type witness of the collision maximal function."""
    recs = []
    M = 384
    S = build_surface("circle-arc", {"aperture_deg": 170.0}, M)
    t, W = S.param, S.weights
    rng = np.random.default_rng(_SEED)
    ratios = {0.25: [], 0.5: [], 0.75: []}
    for _ in range(20):
        co1 = rng.normal(size=(2, 7)) / (1.0 + np.arange(7)) ** 1.5
        co2 = rng.normal(size=(2, 7)) / (1.0 + np.arange(7)) ** 1.5

        def mk(co):
            def g(tt):
                tt = np.asarray(tt, float)
                acc = np.zeros_like(tt)
                for k in range(7):
                    acc += co[0, k] * np.cos(k * tt) \
                        + co[1, k] * np.sin(k * tt)
                return acc ** 2
            return g
        ga, gb = mk(co1), mk(co2)
        n1 = float(np.sum(ga(t) * W))
        n2 = float(np.sum(gb(t) * W))
        for s in ratios:
            I = np.array([fracint.frac_integral_surface(S, ga, gb, s, i)
                          for i in range(M)])
            ratios[s].append(
                float(np.sum(np.sqrt(np.abs(I)) * W)) ** 2 / (n1 * n2))
    for s, vals in ratios.items():
        recs.append(VerificationRecord.bound(
            f"fractional-quasinorm[s={s:g}]", max(vals), 10.0,
            detail={"ratios": vals}))

    Sh = build_surface("circle-arc", {"aperture_deg": 180.0}, M)
    th, Wh = Sh.param, Sh.weights
    h = float(Sh.meta["spacing"])
    ga, gb = _arc_bump(-0.35, 0.55), _arc_bump(0.25, 0.65)
    s = 0.5
    lhs = sum(fracint.frac_integral_surface(Sh, ga, gb, s, i) * Wh[i]
              for i in range(M))
    Pp = Sh.points
    D = np.linalg.norm(Pp[:, None, :] - Pp[None, :, :], axis=-1)
    far = np.abs(th[:, None] - th[None, :]) > 2.5 * h
    V1, V2 = ga(th), gb(th)
    rhs = float(np.sum(np.where(far, V1[:, None] * V2[None, :] *
                                np.where(D > 0, D, 1.0) ** (-s), 0.0) *
                       Wh[:, None] * Wh[None, :]))
    for i in range(M):
        sp = float(Sh.speed_at(th[i]))
        e = fracint._split_edges(max(th[0], th[i] - 2.5 * h),
                                 min(th[-1], th[i] + 2.5 * h), th[i], h / 16)
        mids = 0.5 * (e[:-1] + e[1:])
        kern = sp ** (-s) * fracint._power_cell(e[:-1] - th[i],
                                                e[1:] - th[i], s)
        ch = np.linalg.norm(Sh.point_at(np.full(mids.shape, th[i])) -
                            Sh.point_at(mids), axis=-1)
        ratio = np.where(mids == th[i], 1.0,
                         ch / (sp * np.abs(mids - th[i])))
        rhs += float(np.sum(ga(np.full(mids.shape, th[i])) * gb(mids) *
                            ratio ** (-s) * Sh.speed_at(mids) * kern)) * Wh[i]
    recs.append(VerificationRecord.compare("fractional-l1-identity",
                                           lhs, rhs, 1e-3))

    Sw = build_surface("circle-arc", {"aperture_deg": 170.0}, M)
    tw = Sw.param
    hw = float(Sw.meta["spacing"])
    c = float(tw[M // 2 - 31])
    raw = lambda tt: (np.abs(np.asarray(tt, float) - c) < 2.0 * hw) \
        .astype(float)
    nrm = math.sqrt(float(np.sum(raw(tw) ** 2 * Sw.weights)))
    spike = lambda tt: raw(tt) / nrm
    vals = np.array([fracint.maximal(Sw, spike, spike, i) for i in range(M)])
    worst = max(lam * float(np.sum(Sw.weights[vals > lam]))
                for lam in (1.0, 2.0, 4.0, 8.0))
    recs.append(VerificationRecord.bound("fractional-weak-type", worst, 0.5,
                                         detail={"peak": float(vals.max())}))
    return recs


def suite_tomography() -> list[VerificationRecord]:
    """Window-scale ladders of the pinned-window reconstruction on three cap
    cases, plus mollified collision-mass spot checks."""
    recs = []
    v = np.linspace(-2.0, 2.0, 257)
    cases = [
        ("cap90-centred", build_surface("circle-arc",
                                        {"aperture_deg": 90.0}, 896),
         _arc_bump(0.0, 0.70), 448),
        ("cap90-offset", build_surface("circle-arc",
                                       {"aperture_deg": 90.0}, 896),
         _arc_bump(-0.05, 0.65), 406),
        ("cap60-centred", build_surface("circle-arc",
                                        {"aperture_deg": 60.0}, 640),
         _arc_bump(0.0, 0.50), 320),
    ]
    for tag, S, g, iu in cases:
        errs = [tomographic_wigner(S, g, iu, v, lam).meta["max_relerr_inner"]
                for lam in (4.0, 8.0, 16.0, 32.0)]
        rec = VerificationRecord.bound(f"tomography-ladder[{tag}]",
                                       errs[-1], 0.05,
                                       detail={"errors": errs})
        rec.passed = bool(rec.passed and all(
            errs[k + 1] < errs[k] for k in range(len(errs) - 1)))
        recs.append(rec)

    S = cases[2][1]
    h = float(np.max(np.diff(S.param)))
    worst = 0.0
    for off in (91, 213):
        value, limit = delta_chord_mass(S, 320, 320 + off, h / 4.0)
        worst = max(worst, abs(value - limit) / limit)
    recs.append(VerificationRecord.bound("tomography-mass[circle]", worst,
                                         2e-2))
    E = build_surface("ellipse-arc", {"a": 1.3, "b": 0.8,
                                      "aperture_deg": 30.0}, 768)
    he = float(np.max(np.diff(E.param)))
    worst = 0.0
    for off in (170, 250):
        value, limit = delta_chord_mass(E, 414, 414 + off, he / 4.0)
        worst = max(worst, abs(value - limit) / limit)
    recs.append(VerificationRecord.bound("tomography-mass[ellipse]", worst,
                                         2e-2))
    return recs


def _fine_profile(order: int) -> GridFunction:
    """Hermite-type profile on the wide fine grid used by the exact-value
    checks; the module's own tests use a coarser one."""
    L, h = 16.0, 0.0125
    n = int(round(2 * L / h)) + 1
    ax = -L + h * np.arange(n)
    vals = hermite_profile(order)(ax)
    return GridFunction(np.asarray(vals, complex), np.array([-L]),
                        np.array([h]))


def suite_flandrin() -> list[VerificationRecord]:
    """Exact Gaussian-disk values, the signed sweep over convex bodies and
    excited profiles, and the layer-cake account of the disk integral."""
    recs = []
    g0 = _fine_profile(0)
    for r in (0.5, 1.0, 2.0):
        got = convex_wigner_integral(g0, ConvexBody.disk((0.0, 0.0), r))
        want = 1.0 - math.exp(-2.0 * math.pi * r * r)
        recs.append(VerificationRecord.compare(
            f"flandrin-disk[r={r:g}]", got, want, 1e-4))

    rng = np.random.default_rng(_SEED)
    L, h = 6.4, 0.05
    n = int(round(2 * L / h)) + 1
    ax = -L + h * np.arange(n)
    profs = [GridFunction(np.asarray(hermite_profile(k)(ax), complex),
                          np.array([-L]), np.array([h])) for k in range(7)]
    bodies = []
    for i in range(15):
        c = rng.uniform(-0.6, 0.6, size=2)
        bodies.append(ConvexBody.disk(tuple(c), float(rng.uniform(0.3, 1.6))))
    for i in range(15):
        c = rng.uniform(-0.6, 0.6, size=2)
        halfw = float(rng.uniform(0.3, 1.2))
        ang = float(rng.uniform(0.0, math.pi / 2))
        R = np.array([[math.cos(ang), -math.sin(ang)],
                      [math.sin(ang), math.cos(ang)]])
        corners = np.array([[halfw, halfw], [-halfw, halfw],
                            [-halfw, -halfw], [halfw, -halfw]])
        bodies.append(ConvexBody.polygon(corners @ R.T + c))
    for k in range(7):
        vals = [flandrin_ratio(profs[k], K, 0.1) for K in bodies]
        recs.append(VerificationRecord.bound(
            f"flandrin-sweep[order={k}]", max(vals), 10.0,
            detail={"min": min(vals), "max": max(vals)}))

    dome = GridFunction.from_callable(
        lambda p: np.clip(1.0 - (p[:, 0] / 1.2) ** 2 - (p[:, 1] / 0.7) ** 2,
                          0.0, None),
        [-2.0, -0.9], [0.025, 0.025], [161, 73])
    rec = concave_layercake_check(dome)
    rec.name = "flandrin-layercake"
    recs.append(rec)
    return recs


SUITES = {
    "pairing": suite_pairing,
    "marginals": suite_marginals,
    "jacobians": suite_jacobians,
    "distance": suite_distance,
    "sobolev-identity": suite_sobolev_identity,
    "sobolev-bounds": suite_sobolev_bounds,
    "fractional": suite_fractional,
    "tomography": suite_tomography,
    "flandrin": suite_flandrin,
}


# ---------------------------------------------------------------- the runner

def default_config() -> dict:
    return {"suites": list(SUITES)}


def _error_record(label: str, exc: Exception) -> VerificationRecord:
    return VerificationRecord(
        name=label, lhs=math.nan, rhs=math.nan, rel_error=math.inf,
        tol=0.0, passed=False,
        detail={"error": f"{type(exc).__name__}: {exc}"})


def _case_record(spec: dict) -> VerificationRecord:
    """One config-defined check; a small declarative escape hatch.

    Recognized shape::

        {"check": "pairing" | "sobolev-stein" | "sobolev-mt",
         "surface": {"kind": ..., "params": {...}, "nodes": ...},
         "g": {"kind": "bump" | "gauss" | "cap", "center": c, "width": w},
         "w": {"center": [...], "s2": ..., "half": ..., "n": ...},
         "s": 0.25}
    """
    S = build_surface(spec["surface"]["kind"], spec["surface"]["params"],
                      int(spec["surface"]["nodes"]))
    gs = spec.get("g", {"kind": "bump", "center": 0.0, "width": 0.4})
    if gs["kind"] == "bump":
        g = _arc_bump(float(gs.get("center", 0.0)),
                      float(gs.get("width", 0.4)))
    elif gs["kind"] == "gauss":
        g = _arc_gauss(float(gs.get("center", 0.0)),
                       float(gs.get("width", 0.4)))
    elif gs["kind"] == "cap":
        g = _cap_bump(float(gs.get("width", 0.05)))
    else:
        raise ValueError(f"unknown density kind {gs['kind']!r}")
    ws = spec["w"]
    w = _gauss_weight(ws["center"], float(ws["s2"]), float(ws["half"]),
                      int(ws["n"]))
    kind = spec["check"]
    label = spec.get("label", f"case[{kind}:{S.kind}]")
    if kind == "pairing":
        return check_pairing(S, g, w, label=label,
                             nodes_v=int(spec.get("nodes_v", 256)))
    if kind == "sobolev-stein":
        return check_sobolev_stein(S, g, w, float(spec["s"]), label=label)
    if kind == "sobolev-mt":
        return check_sobolev_mt(S, g, w, float(spec["s"]), label=label)
    raise ValueError(f"unknown check {kind!r}")


def run_suite(config: dict | None = None, threads: int = 1) -> dict:
    """Execute the configured blocks and assemble the report.

    ``None`` means the full default suite; an empty dict runs nothing and
    passes.  Suites may run on a thread pool, but records are assembled in
    configuration order, so the report (and its serialization) is
    deterministic either way.
    """
    cfg = default_config() if config is None else dict(config)
    names = cfg.get("suites", [])
    if names == "all":
        names = list(SUITES)
    elif isinstance(names, str):
        names = [names]
    jobs: list[tuple[str, object]] = []
    for nm in names:
        if nm in SUITES:
            jobs.append((nm, SUITES[nm]))
        else:
            jobs.append((nm, None))
    for k, spec in enumerate(cfg.get("cases", [])):
        jobs.append((f"case-{k}", dict(spec)))

    def run_one(job):
        label, payload = job
        if payload is None:
            return [_error_record(label,
                                  ValueError(f"unknown suite {label!r}"))]
        try:
            if callable(payload):
                return list(payload())
            return [_case_record(payload)]
        except Exception as exc:  # collected, not fatal
            return [_error_record(label, exc)]

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run_one, jobs))
    else:
        blocks = [run_one(j) for j in jobs]
    records = [r for block in blocks for r in block]
    failed = sum(0 if r.passed else 1 for r in records)
    return {
        "suites": list(names),
        "n_records": len(records),
        "n_failed": failed,
        "passed": failed == 0,
        "records": [r.as_dict() for r in records],
    }


def _fmt_json(obj):
    if isinstance(obj, dict):
        return {k: _fmt_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt_json(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt12(float(obj)))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return obj


def write_report(report: dict, out_dir: str) -> tuple[str, str]:
    """Write records.json and records.csv; returns both paths.

    Floats pass through the shared 12-significant-digit formatter before
    serialization, so byte-identical reruns are a meaningful promise.
    """
    os.makedirs(out_dir, exist_ok=True)
    jpath = os.path.join(out_dir, "records.json")
    with open(jpath, "w") as fh:
        json.dump(_fmt_json(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    cpath = os.path.join(out_dir, "records.csv")
    with open(cpath, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["name", "lhs", "rhs", "rel_error", "tol", "passed"])
        for r in report["records"]:
            wr.writerow([r["name"], fmt12(r["lhs"]), fmt12(r["rhs"]),
                         fmt12(r["rel_error"]), fmt12(r["tol"]),
                         "1" if r["passed"] else "0"])
    return jpath, cpath
