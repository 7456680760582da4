"""Discretized strictly convex surface patches.

A :class:`SurfaceModel` carries a parameter grid together with points, outward
unit normals, curvature data and per-node surface-measure weights.  Five kinds
are supported:

``circle-arc``
    arc of a circle of radius ``r`` centred at the origin, parametrized by
    angle; aperture 360 closes the curve.
``ellipse-arc``
    symmetric arc of the ellipse (a cos t, b sin t).
``graph-curve``
    plane curve (t, f(t)) for a strictly convex polynomial f, including the
    builtins f = t^2 and f = t^4.
``paraboloid-patch``
    the surface (x, |x|^2) in R^3 over a square in x.
``sphere2-cap``
    polar cap of the unit 2-sphere, parametrized by colatitude/longitude;
    aperture 360 covers the whole sphere (minus the poles' grid lines).

All queries are pure and the model is treated as immutable after construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConeViolation, DomainExhausted, NotConvex

# Kinds for which off-patch midpoints have a trusted analytic continuation.
# For these the cone-of-normals condition is recorded but not enforced; the
# remaining kinds refuse to build when normals spread beyond the half-angle
# 60 degrees cone (min pairwise N.N' >= 1/2).
_CONTINUED_KINDS = {"circle-arc", "paraboloid-patch", "sphere2-cap"}

_CURVE_KINDS = {"circle-arc", "ellipse-arc", "graph-curve"}

# strict positivity tolerance for curvatures
_KMIN = 1e-9


@dataclass
class SurfaceModel:
    kind: str
    params: dict
    ambient_dim: int
    param: np.ndarray        # (M,) curves; (M,2) = (theta,phi) or (x1,x2)
    points: np.ndarray       # (M, n)
    normals: np.ndarray      # (M, n) outward unit normals
    curvatures: np.ndarray   # (M,) curves; (M,2) principal curvatures for n=3
    weights: np.ndarray      # (M,) surface-measure quadrature weights
    tangents: np.ndarray     # (M, n) unit tangent (curves); (M, 2, n) frames (n=3)
    cone_certificate: float  # max over node pairs of 1 - N(u).N(u')
    grid_shape: tuple = ()   # (M_t, M_p) for the 2-parameter kinds
    meta: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return self.points.shape[0]

    # ---- parametric evaluators (continuous in the parameter) -------------

    def point_at(self, t):
        """Ambient position for curve parameter(s) t (curves only)."""
        return _curve_eval(self, t)[0]

    def normal_at(self, t):
        return _curve_eval(self, t)[1]

    def tangent_at(self, t):
        return _curve_eval(self, t)[2]

    def speed_at(self, t):
        return _curve_eval(self, t)[3]

    def curvature_at(self, t):
        return _curve_eval(self, t)[4]

    def gaussian_curvature(self) -> np.ndarray:
        if self.ambient_dim == 2:
            return self.curvatures
        return self.curvatures[:, 0] * self.curvatures[:, 1]

    def describe(self) -> dict:
        return {"kind": self.kind, "params": self.params,
                "nodes": int(self.meta.get("requested_nodes", self.node_count))}


def _as_array(t):
    return np.asarray(t, dtype=float)


def _curve_eval(S: SurfaceModel, t):
    """(point, normal, tangent, speed, curvature) along a curve kind."""
    t = _as_array(t)
    if S.kind == "circle-arc":
        r = S.params["radius"]
        ct, st = np.cos(t), np.sin(t)
        point = np.stack([r * ct, r * st], axis=-1)
        normal = np.stack([ct, st], axis=-1)
        tangent = np.stack([-st, ct], axis=-1)
        speed = np.full_like(t, r)
        curv = np.full_like(t, 1.0 / r)
    elif S.kind == "ellipse-arc":
        a, b = S.params["a"], S.params["b"]
        ct, st = np.cos(t), np.sin(t)
        point = np.stack([a * ct, b * st], axis=-1)
        nn = np.sqrt((b * ct) ** 2 + (a * st) ** 2)
        normal = np.stack([b * ct / nn, a * st / nn], axis=-1)
        speed = np.sqrt((a * st) ** 2 + (b * ct) ** 2)
        tangent = np.stack([-a * st / speed, b * ct / speed], axis=-1)
        curv = a * b / speed ** 3
    elif S.kind == "graph-curve":
        f, fp, fpp = _graph_functions(S.params)
        y, yp, ypp = f(t), fp(t), fpp(t)
        point = np.stack([t, y], axis=-1)
        speed = np.sqrt(1.0 + yp ** 2)
        normal = np.stack([-yp / speed, np.ones_like(t) / speed], axis=-1)
        tangent = np.stack([np.ones_like(t) / speed, yp / speed], axis=-1)
        curv = ypp / speed ** 3
    else:
        raise ValueError(f"not a curve kind: {S.kind}")
    return point, normal, tangent, speed, curv


def _graph_functions(params):
    """f, f', f'' for a graph-curve parameter set."""
    fn = params.get("fn")
    if fn == "t2":
        return (lambda t: t ** 2, lambda t: 2.0 * t,
                lambda t: 2.0 * np.ones_like(_as_array(t)))
    if fn == "t4":
        return (lambda t: t ** 4, lambda t: 4.0 * t ** 3, lambda t: 12.0 * t ** 2)
    coeffs = params["coeffs"]  # highest degree first, numpy convention
    p = np.polynomial.Polynomial(coeffs[::-1])
    return p, p.deriv(1), p.deriv(2)


# ---- sphere helpers ------------------------------------------------------

def sphere_point(theta, phi):
    theta, phi = _as_array(theta), _as_array(phi)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def sphere_frame(theta, phi):
    """Orthonormal tangent frame, parallel-transported from the north pole.

    Columns are E1, E2 with E1 -> e_x, E2 -> e_y as theta -> 0; this keeps
    tangent coordinates continuous across the cap.
    """
    theta, phi = _as_array(theta), _as_array(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    e_th = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e_ph = np.stack([-sp, cp, np.zeros_like(theta)], axis=-1)
    E1 = cp[..., None] * e_th - sp[..., None] * e_ph
    E2 = sp[..., None] * e_th + cp[..., None] * e_ph
    return E1, E2


def paraboloid_point(x):
    x = _as_array(x)
    return np.concatenate([x, np.sum(x * x, axis=-1, keepdims=True)], axis=-1)


def paraboloid_normal(x):
    x = _as_array(x)
    denom = np.sqrt(1.0 + 4.0 * np.sum(x * x, axis=-1, keepdims=True))
    return np.concatenate([-2.0 * x / denom, 1.0 / denom], axis=-1)


def paraboloid_frame(x):
    """Orthonormal tangent frame on (x, |x|^2), radially adapted."""
    x = _as_array(x)
    r2 = np.sum(x * x, axis=-1)
    r = np.sqrt(r2)
    # radial unit direction in the base plane; fall back to e_x at the apex
    with np.errstate(invalid="ignore", divide="ignore"):
        e_r = np.where(r[..., None] > 1e-14, x / np.where(r[..., None] == 0, 1, r[..., None]),
                       np.broadcast_to(np.array([1.0, 0.0]), x.shape))
    sl = np.sqrt(1.0 + 4.0 * r2)
    E1 = np.concatenate([e_r / sl[..., None], (2.0 * r / sl)[..., None]], axis=-1)
    e_t = np.stack([-e_r[..., 1], e_r[..., 0]], axis=-1)
    E2 = np.concatenate([e_t, np.zeros_like(r)[..., None]], axis=-1)
    return E1, E2


# ---- construction --------------------------------------------------------

def build_surface(kind: str, params: dict, M: int) -> SurfaceModel:
    """Construct a surface patch with ``M`` nodes (per parameter axis for the
    two-parameter kinds).

    Raises
    ------
    NotConvex
        if any nodal curvature fails the strict positivity policy K > 1e-9.
    ConeViolation
        if the patch normals spread beyond the admissible cone and the kind
        has no analytic midpoint continuation.
    """
    if M < 16:
        raise ValueError("need at least 16 nodes")
    params = dict(params)

    if kind == "circle-arc":
        params.setdefault("radius", 1.0)
        model = _build_curve_arc(kind, params, M)
    elif kind == "ellipse-arc":
        if params.get("a", 0) <= 0 or params.get("b", 0) <= 0:
            raise ValueError("ellipse semi-axes must be positive")
        model = _build_curve_arc(kind, params, M)
    elif kind == "graph-curve":
        model = _build_graph_curve(params, M)
    elif kind == "paraboloid-patch":
        model = _build_paraboloid(params, M)
    elif kind == "sphere2-cap":
        model = _build_sphere_cap(params, M)
    else:
        raise ValueError(f"unknown surface kind: {kind}")

    _check_invariants(model)
    return model


def _aperture_rad(params) -> float:
    return math.radians(float(params["aperture_deg"]))


def _build_curve_arc(kind, params, M):
    ap = _aperture_rad(params)
    closed = kind == "circle-arc" and ap >= 2.0 * math.pi - 1e-12
    if closed:
        t = -math.pi + 2.0 * math.pi * np.arange(M) / M
        h = 2.0 * math.pi / M
        w_shape = np.full(M, h)
    else:
        t = np.linspace(-ap / 2.0, ap / 2.0, M)
        h = t[1] - t[0]
        w_shape = np.full(M, h)
        w_shape[0] = w_shape[-1] = h / 2.0
    S = SurfaceModel(kind=kind, params=params, ambient_dim=2, param=t,
                     points=None, normals=None, curvatures=None, weights=None,
                     tangents=None, cone_certificate=0.0,
                     meta={"closed": closed, "spacing": h, "requested_nodes": M})
    pt, nm, tg, sp, cv = _curve_eval(S, t)
    S.points, S.normals, S.tangents, S.curvatures = pt, nm, tg, cv
    S.weights = w_shape * sp
    return S


def _build_graph_curve(params, M):
    lo, hi = params["interval"]
    t = np.linspace(lo, hi, M)
    h = t[1] - t[0]
    w_shape = np.full(M, h)
    w_shape[0] = w_shape[-1] = h / 2.0
    S = SurfaceModel(kind="graph-curve", params=params, ambient_dim=2, param=t,
                     points=None, normals=None, curvatures=None, weights=None,
                     tangents=None, cone_certificate=0.0,
                     meta={"closed": False, "spacing": h, "requested_nodes": M})
    pt, nm, tg, sp, cv = _curve_eval(S, t)
    S.points, S.normals, S.tangents, S.curvatures = pt, nm, tg, cv
    S.weights = w_shape * sp
    return S


def _build_paraboloid(params, M):
    L = float(params["halfwidth"])
    x1 = np.linspace(-L, L, M)
    h = x1[1] - x1[0]
    w1 = np.full(M, h)
    w1[0] = w1[-1] = h / 2.0
    X1, X2 = np.meshgrid(x1, x1, indexing="ij")
    x = np.stack([X1.ravel(), X2.ravel()], axis=-1)
    W = np.outer(w1, w1).ravel()
    pts = paraboloid_point(x)
    nms = paraboloid_normal(x)
    r2 = np.sum(x * x, axis=-1)
    area = np.sqrt(1.0 + 4.0 * r2)
    # principal curvatures of (x, |x|^2): radial and transverse
    k_rad = 2.0 / (1.0 + 4.0 * r2) ** 1.5
    k_tan = 2.0 / np.sqrt(1.0 + 4.0 * r2)
    E1, E2 = paraboloid_frame(x)
    return SurfaceModel(kind="paraboloid-patch", params=params, ambient_dim=3,
                        param=x, points=pts, normals=nms,
                        curvatures=np.stack([k_rad, k_tan], axis=-1),
                        weights=W * area,
                        tangents=np.stack([E1, E2], axis=1),
                        cone_certificate=0.0, grid_shape=(M, M),
                        meta={"spacing": h, "requested_nodes": M})


def _build_sphere_cap(params, M):
    theta_c = _aperture_rad(params) / 2.0
    if not 0.0 < theta_c <= math.pi:
        raise ValueError("aperture must lie in (0, 360] degrees")
    d_th = theta_c / M
    theta = (np.arange(M) + 0.5) * d_th
    M_phi = max(8, int(math.ceil(math.pi * M / theta_c)))
    phi = 2.0 * math.pi * np.arange(M_phi) / M_phi
    d_ph = 2.0 * math.pi / M_phi
    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    th, ph = TH.ravel(), PH.ravel()
    pts = sphere_point(th, ph)
    # exact spherical cell areas: the theta band integrates cos exactly
    band = np.cos(np.arange(M) * d_th) - np.cos((np.arange(M) + 1) * d_th)
    W = np.repeat(band, M_phi) * d_ph
    E1, E2 = sphere_frame(th, ph)
    return SurfaceModel(kind="sphere2-cap", params=params, ambient_dim=3,
                        param=np.stack([th, ph], axis=-1), points=pts,
                        normals=pts.copy(),
                        curvatures=np.ones((th.size, 2)),
                        weights=W,
                        tangents=np.stack([E1, E2], axis=1),
                        cone_certificate=0.0, grid_shape=(M, M_phi),
                        meta={"spacing": d_th, "theta_c": theta_c,
                              "dphi": d_ph, "requested_nodes": M})


def _check_invariants(S: SurfaceModel):
    norms = np.linalg.norm(S.normals, axis=-1)
    if not np.all(np.abs(norms - 1.0) <= 1e-12):
        raise AssertionError("normals not unit length")
    K = S.curvatures if S.ambient_dim == 2 else S.curvatures.min(axis=-1)
    if np.any(K <= _KMIN):
        raise NotConvex(f"{S.kind}: curvature {K.min():.3e} below positivity policy")
    gram_min = _min_normal_dot(S.normals)
    S.cone_certificate = float(1.0 - gram_min)
    if S.kind not in _CONTINUED_KINDS and not (
            S.kind == "graph-curve" and S.params.get("fn") == "t2"):
        if gram_min < 0.5:
            raise ConeViolation(
                f"{S.kind}: min pairwise normal dot {gram_min:.4f} < 1/2")


def _min_normal_dot(normals: np.ndarray) -> float:
    # chunked pairwise min of the normal Gram matrix; O(M^2) but streamed
    m = normals.shape[0]
    best = 1.0
    step = 2048
    for i in range(0, m, step):
        block = normals[i:i + step] @ normals.T
        best = min(best, float(block.min()))
    return best


# ---- scalar functionals --------------------------------------------------

def curvature_quotient(S: SurfaceModel) -> float:
    """Largest ratio of principal curvatures across any two points (>= 1)."""
    lam = np.ravel(S.curvatures)
    return float(lam.max() / lam.min())


def lambda_functional(S: SurfaceModel, max_pairs: int = 200_000) -> float:
    """Plane-curve sup of sqrt(|u'-u''| K(u) / |N(u') ^ N(u'')|).

    Only pairs whose midpoint u'' stays on the patch participate; raises
    :class:`DomainExhausted` when no pair qualifies.
    """
    if S.ambient_dim != 2:
        raise ValueError("defined for plane curves only")
    from .midpoint import reflect_param_grid  # deferred: avoids module cycle

    t = S.param
    stride = max(1, int(math.ceil(t.size / math.sqrt(max_pairs))))
    ts = t[::stride]
    tu, tp = np.meshgrid(ts, ts, indexing="ij")
    tu, tp = tu.ravel(), tp.ravel()
    keep = np.abs(tu - tp) > 1e-12
    tu, tp = tu[keep], tp[keep]
    tpp, valid = reflect_param_grid(S, tu, tp)
    lo, hi = t[0], t[-1]
    valid &= (tpp >= lo - 1e-12) & (tpp <= hi + 1e-12)
    if not np.any(valid):
        raise DomainExhausted("no admissible pair with on-patch midpoint")
    tu, tp, tpp = tu[valid], tp[valid], tpp[valid]
    Pu, Nu = S.point_at(tu), S.normal_at(tu)
    Pp, Np_ = S.point_at(tp), S.normal_at(tp)
    P2, N2 = S.point_at(tpp), S.normal_at(tpp)
    Ku = S.curvature_at(tu)
    chord = np.linalg.norm(Pp - P2, axis=-1)
    wedge = np.abs(Np_[:, 0] * N2[:, 1] - Np_[:, 1] * N2[:, 0])
    ok = wedge > 1e-14
    if not np.any(ok):
        raise DomainExhausted("all admissible pairs degenerate")
    return float(np.sqrt(np.max(chord[ok] * Ku[ok] / wedge[ok])))


# ---- (de)serialization ---------------------------------------------------

def surface_from_json(text: str) -> SurfaceModel:
    """Build from a JSON descriptor {"kind":..., "params":..., "nodes":...}."""
    desc = json.loads(text)
    return build_surface(desc["kind"], desc.get("params", {}), int(desc["nodes"]))
