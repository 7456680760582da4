"""Surface midpoint map and its three Jacobian factors.

For a base point u and a second point u', the midpoint map sends u' to the
unique third point u'' with u' - u'' tangent at u and (for surfaces in R^3)
N(u), N(u'), N(u'') coplanar.  Three scalar factors ride along:

``J``      the surface-measure distortion of u -> R_u u' at fixed u'; it is
           the weight that makes the pushforward identity
           ``integral Phi(R_u u') J(u,u') dsigma(u) = integral Phi dsigma``
           hold on patches where the map is injective.
``Delta``  the surface-measure distortion of u' -> R_u u' at fixed u.
``Jtilde`` the Jacobian of u' -> xi = u' - R_u u' with both sides read in
           tangent coordinates at u (the chart convention).  The companion
           ``jtilde_surface_measure`` returns the density of the same map
           against surface measure, which is what change-of-variables
           integrals against dsigma(u') need; the two differ exactly by the
           factor N(u).N(u').

Closed forms are used wherever the kind admits one (parameter reflection for
conics, ambient reflection for sphere and paraboloid); generic graph curves
fall back to a bracketed bisection+Newton root solve, tolerance 1e-12 in the
parameter.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import Degenerate, OffPatch, StepTooLarge
from .geometry import (SurfaceModel, paraboloid_frame, paraboloid_point,
                       sphere_frame, sphere_point)
from .records import JacobianRecord

_PARAM_TOL = 1e-12


# ---------------------------------------------------------------------------
# the midpoint map
# ---------------------------------------------------------------------------

def _is_param_reflection(S: SurfaceModel) -> bool:
    """Kinds whose midpoint map is t'' = 2 t_u - t' exactly.

    For the circle and any ellipse the chord P(2t_u - t') - P(t') is parallel
    to the tangent at t_u (angle-sum identities); for the t^2 graph the chord
    slope (b^2-c^2)/(b-c) = b+c equals the tangent slope 2a when c = 2a-b.
    """
    return S.kind in ("circle-arc", "ellipse-arc") or (
        S.kind == "graph-curve" and S.params.get("fn") == "t2")


def reflect_param(S: SurfaceModel, t_u: float, t_p: float) -> float:
    """Midpoint-map parameter t'' for curve kinds."""
    if abs(t_u - t_p) <= _PARAM_TOL:
        return float(t_p)
    if _is_param_reflection(S):
        return 2.0 * t_u - t_p
    return _reflect_generic(S, t_u, t_p)


def reflect_param_grid(S: SurfaceModel, t_u, t_p):
    """Vectorized ``reflect_param``; returns (t'', validity mask)."""
    t_u, t_p = np.asarray(t_u, float), np.asarray(t_p, float)
    if _is_param_reflection(S):
        return 2.0 * t_u - t_p, np.ones(t_u.shape, dtype=bool)
    shape = t_u.shape
    tu, tp = t_u.ravel(), t_p.ravel()

    lo, hi = float(S.param[0]), float(S.param[-1])
    ts = np.linspace(lo, hi, max(129, 4 * S.param.size + 1))
    guard = max(4.0 * (ts[1] - ts[0]), 1e-9)
    P_ts = S.point_at(ts)                              # (K, 2)
    Nu = S.normal_at(tu)                               # (m, 2)
    Pp = S.point_at(tp)
    # G[i, k] = (P(ts_k) - u'_i) . N(u_i), the tangent-line residual
    G = Nu @ P_ts.T - np.sum(Nu * Pp, axis=1)[:, None]
    # omit cells touching the trivial root at t'
    cell_bad = (ts[None, 1:] > (tp - guard)[:, None]) & \
               (ts[None, :-1] < (tp + guard)[:, None])
    change = (G[:, :-1] * G[:, 1:] < 0.0) & ~cell_bad
    ok = np.any(change, axis=1)
    first = np.argmax(change, axis=1)
    a = ts[first]
    b = ts[first + 1]
    ga = np.take_along_axis(G, first[:, None], axis=1)[:, 0]
    # vectorized bisection; the bracket width shrinks below 1e-12 in ~50 steps
    for _ in range(52):
        mid = 0.5 * (a + b)
        gm = np.sum((S.point_at(mid) - Pp) * Nu, axis=1)
        left = ga * gm <= 0.0
        b = np.where(left, mid, b)
        ga = np.where(left, ga, gm)
        a = np.where(left, a, mid)
    out = np.where(ok, 0.5 * (a + b), np.nan)
    # ties reflect to themselves
    tie = np.abs(tu - tp) <= _PARAM_TOL
    out = np.where(tie, tp, out)
    ok = ok | tie
    return out.reshape(shape), ok.reshape(shape)


def _reflect_generic(S: SurfaceModel, t_u: float, t_p: float) -> float:
    """Second intersection of the tangent-direction line through u' with the
    curve, by bracketed bisection plus Newton polish."""
    N = S.normal_at(t_u)
    up = S.point_at(t_p)

    def g(t):
        return float(np.dot(S.point_at(t) - up, N))

    def gprime(t):
        return float(np.dot(S.tangent_at(t), N)) * float(S.speed_at(t))

    lo, hi = float(S.param[0]), float(S.param[-1])
    # sample for a sign change away from the trivial root at t_p
    ts = np.linspace(lo, hi, max(129, 4 * S.param.size + 1))
    guard = max(4.0 * (ts[1] - ts[0]), 1e-9)
    vals = np.array([g(t) for t in ts])
    bracket = None
    for k in range(ts.size - 1):
        if ts[k + 1] > t_p - guard and ts[k] < t_p + guard:
            continue
        if vals[k] == 0.0:
            bracket = (ts[k], ts[k])
            break
        if vals[k] * vals[k + 1] < 0.0:
            bracket = (ts[k], ts[k + 1])
            break
    if bracket is None:
        raise OffPatch(
            f"{S.kind}: no second tangent-line intersection within the patch")
    a, b = bracket
    if a == b:
        return float(a)
    ga = g(a)
    t = 0.5 * (a + b)
    for _ in range(200):
        gt = g(t)
        if ga * gt <= 0.0:
            b = t
        else:
            a, ga = t, gt
        # Newton step when it stays inside the bracket, bisection otherwise
        dp = gprime(t)
        t_new = t - gt / dp if dp != 0.0 else 0.5 * (a + b)
        if not (a < t_new < b):
            t_new = 0.5 * (a + b)
        if abs(t_new - t) <= _PARAM_TOL:
            return float(t_new)
        t = t_new
    return float(t)


def reflect_sphere(omega: np.ndarray, omega_p: np.ndarray) -> np.ndarray:
    """Reflection of omega' through the axis spanned by omega (unit vectors)."""
    dot = np.sum(omega * omega_p, axis=-1, keepdims=True)
    return 2.0 * dot * omega - omega_p


def reflect_paraboloid(x: np.ndarray, x_p: np.ndarray) -> np.ndarray:
    """Base-plane reflection x'' = 2x - x' for the surface (x, |x|^2)."""
    return 2.0 * np.asarray(x, float) - np.asarray(x_p, float)


def reflect_point(S: SurfaceModel, i: int, j: int) -> np.ndarray:
    """Ambient coordinates of R_u u' for node indices i (= u) and j (= u')."""
    if i == j:
        return S.points[i].copy()
    if S.ambient_dim == 2:
        tpp = reflect_param(S, float(S.param[i]), float(S.param[j]))
        return np.asarray(S.point_at(tpp), float)
    if S.kind == "sphere2-cap":
        return reflect_sphere(S.points[i], S.points[j])
    if S.kind == "paraboloid-patch":
        return paraboloid_point(reflect_paraboloid(S.param[i], S.param[j]))
    raise ValueError(S.kind)


# ---------------------------------------------------------------------------
# J, the pushforward weight
# ---------------------------------------------------------------------------

def curve_jacobian_J(S: SurfaceModel, t_u, t_p, t_pp=None):
    """|u''-u'| K(u) / |N(u) wedge N(u'')| for plane curves, vectorized."""
    t_u = np.asarray(t_u, float)
    t_p = np.asarray(t_p, float)
    if t_pp is None:
        t_pp, _ = reflect_param_grid(S, t_u, t_p)
    Pu, Nu = S.point_at(t_u), S.normal_at(t_u)
    Pp = S.point_at(t_p)
    P2, N2 = S.point_at(t_pp), S.normal_at(t_pp)
    Ku = S.curvature_at(t_u)
    chord = np.linalg.norm(P2 - Pp, axis=-1)
    wedge = np.abs(Nu[..., 0] * N2[..., 1] - Nu[..., 1] * N2[..., 0])
    tie = np.abs(t_u - t_p) <= _PARAM_TOL
    if np.any(~tie & (wedge < 1e-12)):
        raise Degenerate("parallel normals at u and u''")
    out = np.where(tie, 2.0, chord * Ku / np.where(wedge == 0, 1.0, wedge))
    return out if out.ndim else float(out)


def jacobian_J(S: SurfaceModel, i: int, j: int) -> float:
    """Pushforward weight J(u,u') at a node pair, by closed form."""
    if i == j:
        return float(2 ** (S.ambient_dim - 1))
    if S.ambient_dim == 2:
        return float(curve_jacobian_J(S, float(S.param[i]), float(S.param[j])))
    if S.kind == "sphere2-cap":
        return float(4.0 * abs(np.dot(S.points[i], S.points[j])))
    if S.kind == "paraboloid-patch":
        x, xp = S.param[i], S.param[j]
        xpp = reflect_paraboloid(x, xp)
        return float(4.0 * math.sqrt((1.0 + 4.0 * np.dot(xpp, xpp)) /
                                     (1.0 + 4.0 * np.dot(x, x))))
    raise ValueError(S.kind)


def jacobian_J_fd(S: SurfaceModel, i: int, j: int, h: float | None = None) -> float:
    """Finite-difference oracle for J: surface-measure distortion of the map
    u -> R_u u' at fixed u'."""
    h = h if h is not None else _fd_step(S)
    if S.ambient_dim == 2:
        t_u, t_p = float(S.param[i]), float(S.param[j])
        tpp_plus = reflect_param(S, t_u + h, t_p)
        tpp_minus = reflect_param(S, t_u - h, t_p)
        tpp0 = reflect_param(S, t_u, t_p)
        dt = (tpp_plus - tpp_minus) / (2.0 * h)
        return float(abs(dt) * S.speed_at(tpp0) / S.speed_at(t_u))
    if S.kind == "sphere2-cap":
        om, omp = S.points[i], S.points[j]
        E1, E2 = _frames_at(S, i)
        om2 = reflect_sphere(om, omp)
        F1, F2 = _orthonormal_frame(om2)
        cols = []
        for E in (E1, E2):
            p = reflect_sphere(_geo_step(om, E, h), omp)
            m = reflect_sphere(_geo_step(om, E, -h), omp)
            d = (p - m) / (2.0 * h)
            cols.append([float(np.dot(F1, d)), float(np.dot(F2, d))])
        return float(abs(np.linalg.det(np.array(cols).T)))
    if S.kind == "paraboloid-patch":
        x, xp = np.asarray(S.param[i], float), np.asarray(S.param[j], float)
        xpp = reflect_paraboloid(x, xp)  # linear in x: d xpp / d x = 2 I
        area = math.sqrt((1.0 + 4.0 * np.dot(xpp, xpp)) /
                         (1.0 + 4.0 * np.dot(x, x)))
        return float(4.0 * area)
    raise ValueError(S.kind)


# ---------------------------------------------------------------------------
# Delta and Jtilde (finite differences, closed forms as fast paths)
# ---------------------------------------------------------------------------

def _fd_step(S: SurfaceModel) -> float:
    return max(1e-5, S.meta.get("spacing", 1e-3) / 8.0)


def _fd_guard_curve(S: SurfaceModel, t: float, h: float):
    if _is_param_reflection(S) or S.kind != "graph-curve":
        return
    lo, hi = float(S.param[0]), float(S.param[-1])
    if t - h < lo - 1e-12 or t + h > hi + 1e-12:
        raise StepTooLarge("stencil exits the patch")


def _frames_at(S: SurfaceModel, i: int):
    T = S.tangents[i]
    return T[0], T[1]


def _orthonormal_frame(v: np.ndarray):
    """Any orthonormal basis of the plane orthogonal to unit vector v."""
    a = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    F1 = a - np.dot(a, v) * v
    F1 /= np.linalg.norm(F1)
    return F1, np.cross(v, F1)


def _geo_step(omega, direction, h):
    return math.cos(h) * omega + math.sin(h) * direction


def curve_delta_fd(S: SurfaceModel, t_u: float, t_p: float,
                   h: float | None = None) -> float:
    """Delta at curve parameters (t_u, t') by central finite differences."""
    h = h if h is not None else _fd_step(S)
    _fd_guard_curve(S, t_p, h)
    tpp_p = reflect_param(S, t_u, t_p + h)
    tpp_m = reflect_param(S, t_u, t_p - h)
    tpp0 = reflect_param(S, t_u, t_p)
    return float(abs(tpp_p - tpp_m) / (2.0 * h)
                 * S.speed_at(tpp0) / S.speed_at(t_p))


def sphere_delta_fd(om: np.ndarray, omp: np.ndarray, h: float = 1e-5) -> float:
    """Delta on the unit sphere by geodesic central differences."""
    om2 = reflect_sphere(om, omp)
    F1, F2 = _orthonormal_frame(om2)
    W1, W2 = _orthonormal_frame(omp)
    cols = []
    for Wd in (W1, W2):
        p = reflect_sphere(om, _geo_step(omp, Wd, h))
        m = reflect_sphere(om, _geo_step(omp, Wd, -h))
        d = (p - m) / (2.0 * h)
        cols.append([float(np.dot(F1, d)), float(np.dot(F2, d))])
    return float(abs(np.linalg.det(np.array(cols).T)))


def jacobian_Delta(S: SurfaceModel, i: int, j: int, h: float | None = None) -> float:
    """Surface-measure distortion of u' -> R_u u' at fixed u, central FD."""
    if i == j:
        return 1.0
    h = h if h is not None else _fd_step(S)
    if S.ambient_dim == 2:
        return curve_delta_fd(S, float(S.param[i]), float(S.param[j]), h)
    if S.kind == "sphere2-cap":
        return sphere_delta_fd(S.points[i], S.points[j], h)
    if S.kind == "paraboloid-patch":
        x, xp = np.asarray(S.param[i], float), np.asarray(S.param[j], float)
        xpp = reflect_paraboloid(x, xp)  # d xpp / d xp = -I
        return float(math.sqrt((1.0 + 4.0 * np.dot(xpp, xpp)) /
                               (1.0 + 4.0 * np.dot(xp, xp))))
    raise ValueError(S.kind)


def delta_formula_sphere(S: SurfaceModel, i: int, j: int) -> float:
    """Closed-form Delta on the sphere, where the inverse shape operator is the
    identity: every factor in the general expression cancels pairwise."""
    om, omp = S.points[i], S.points[j]
    om2 = reflect_sphere(om, omp)
    wedge_ratio = math.sqrt(max(1.0 - np.dot(om, om2) ** 2, 0.0)) / \
        math.sqrt(max(1.0 - np.dot(om, omp) ** 2, 1e-300))
    proj_ratio = (1.0 - np.dot(om, omp) ** 2) / \
        max(1.0 - np.dot(om, om2) ** 2, 1e-300)
    return float(wedge_ratio ** 2 * proj_ratio)  # == 1 identically


def curve_jtilde_fd(S: SurfaceModel, t_u: float, t_p: float,
                    h: float | None = None) -> float:
    """Chart Jacobian of t' -> xi at curve parameters, central FD."""
    h = h if h is not None else _fd_step(S)
    _fd_guard_curve(S, t_p, h)
    u, That = S.point_at(t_u), S.tangent_at(t_u)

    def chart(t):
        return float(np.dot(S.point_at(t) - u, That))

    def xi(t):
        tpp = reflect_param(S, t_u, t)
        return float(np.dot(S.point_at(t) - S.point_at(tpp), That))

    dxi = xi(t_p + h) - xi(t_p - h)
    dch = chart(t_p + h) - chart(t_p - h)
    if dch == 0.0:
        raise Degenerate("chart coordinate stationary")
    return float(abs(dxi / dch))


def jacobian_Jtilde(S: SurfaceModel, i: int, j: int, h: float | None = None) -> float:
    """Chart Jacobian of u' -> xi = u' - R_u u', both read in tangent
    coordinates at u; central finite differences."""
    if i == j:
        return float(2 ** (S.ambient_dim - 1))
    h = h if h is not None else _fd_step(S)
    if S.ambient_dim == 2:
        return curve_jtilde_fd(S, float(S.param[i]), float(S.param[j]), h)
    if S.kind == "sphere2-cap":
        om, omp = S.points[i], S.points[j]
        E1, E2 = _frames_at(S, i)
        W1, W2 = _orthonormal_frame(omp)
        A = np.zeros((2, 2))
        F = np.zeros((2, 2))
        for c, Wd in enumerate((W1, W2)):
            pp, pm = _geo_step(omp, Wd, h), _geo_step(omp, Wd, -h)
            dxi = ((pp - reflect_sphere(om, pp)) - (pm - reflect_sphere(om, pm))) \
                / (2.0 * h)
            dup = (pp - pm) / (2.0 * h)
            A[:, c] = [np.dot(E1, dup), np.dot(E2, dup)]
            F[:, c] = [np.dot(E1, dxi), np.dot(E2, dxi)]
        detA = np.linalg.det(A)
        if abs(detA) < 1e-14:
            raise Degenerate("chart collapse")
        return float(abs(np.linalg.det(F) / detA))
    if S.kind == "paraboloid-patch":
        x, xp = np.asarray(S.param[i], float), np.asarray(S.param[j], float)
        E1, E2 = paraboloid_frame(x[None, :])
        E = np.stack([E1[0], E2[0]])
        u = paraboloid_point(x[None, :])[0]
        A = np.zeros((2, 2))
        F = np.zeros((2, 2))
        for c in range(2):
            e = np.zeros(2)
            e[c] = h
            for sgn in (1.0, -1.0):
                q = xp + sgn * e
                up = paraboloid_point(q[None, :])[0]
                u2 = paraboloid_point(reflect_paraboloid(x, q)[None, :])[0]
                A[:, c] += sgn * (E @ (up - u)) / (2.0 * h)
                F[:, c] += sgn * (E @ (up - u2)) / (2.0 * h)
        return float(abs(np.linalg.det(F) / np.linalg.det(A)))
    raise ValueError(S.kind)


def jtilde_surface_measure(S: SurfaceModel, i: int, j: int) -> float:
    """Density |d xi / d sigma(u')| of the tangent-coordinate map against
    surface measure: the chart Jacobian times |N(u).N(u')|."""
    ndot = abs(float(np.dot(S.normals[i], S.normals[j])))
    return jacobian_Jtilde(S, i, j) * ndot


def curve_jtilde_A(S: SurfaceModel, t_u, t_p, t_pp=None):
    """Vectorized surface-measure density of t' -> xi for curve kinds."""
    t_u = np.asarray(t_u, float)
    t_p = np.asarray(t_p, float)
    if S.kind == "circle-arc":
        return 2.0 * np.cos(t_p - t_u)
    if S.kind == "graph-curve" and S.params.get("fn") == "t2":
        return 2.0 * np.sqrt(1.0 + 4.0 * t_u ** 2) / np.sqrt(1.0 + 4.0 * t_p ** 2)
    # generic: central difference of the xi coordinate in arclength
    if t_pp is None:
        t_pp, _ = reflect_param_grid(S, t_u, t_p)
    h = _fd_step(S)
    That = S.tangent_at(t_u)
    out = np.empty(np.shape(t_p))
    it = np.nditer(np.asarray(t_p), flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        tu = float(t_u[idx]) if np.shape(t_u) else float(t_u)
        tp = float(np.asarray(t_p)[idx])
        Th = That[idx] if That.ndim > 1 else That

        def xi(t):
            tpp = reflect_param(S, tu, t)
            return float(np.dot(S.point_at(t) - S.point_at(tpp), Th))

        out[idx] = abs(xi(tp + h) - xi(tp - h)) / (2.0 * h * float(S.speed_at(tp)))
    return out


# ---------------------------------------------------------------------------
# integral checks and scans
# ---------------------------------------------------------------------------

def pushforward_check(S: SurfaceModel, j: int, phi, support=None):
    """Verify that J reweights the pushforward of surface measure under
    u -> R_u u' back to surface measure, for fixed u' (node index j).

    ``phi`` is either a callable of the curve parameter (n=2) / base-plane
    point (paraboloid), or an array of node values (interpolated).  For
    indicator-like phi pass ``support=(a, b)`` so the quadrature can place
    breakpoints at the discontinuities.
    """
    from scipy.integrate import quad
    from .records import VerificationRecord

    if S.ambient_dim == 2:
        t_p = float(S.param[j])
        lo, hi = float(S.param[0]), float(S.param[-1])
        phi_fn = _phi_as_callable(S, phi)

        def rhs_f(t):
            return phi_fn(t) * float(S.speed_at(t))

        def lhs_f(t):
            tpp = reflect_param(S, t, t_p)
            return phi_fn(tpp) * float(curve_jacobian_J(S, t, t_p)) \
                * float(S.speed_at(t))

        points = None
        if support is not None:
            a, b = support
            # breakpoints where R_u u' crosses the support edges: for the
            # parameter-reflection kinds that is t = (edge + t')/2
            points = [p for p in
                      ((a + t_p) / 2.0, (b + t_p) / 2.0) if lo < p < hi]
        rhs, _ = quad(rhs_f, lo, hi, points=(
            [p for p in support if lo < p < hi] if support else None),
            limit=200)
        lhs, _ = quad(lhs_f, lo, hi, points=points, limit=200)
        return VerificationRecord.compare("pushforward", lhs, rhs, 1e-6)

    if S.kind == "paraboloid-patch":
        xp = np.asarray(S.param[j], float)
        vals_rhs = np.array([phi(x) for x in S.param]) if callable(phi) \
            else np.asarray(phi, float)
        rhs = float(np.sum(vals_rhs * S.weights))
        xpp = reflect_paraboloid(S.param, xp[None, :])
        vals_lhs = np.array([phi(x) for x in xpp]) if callable(phi) else None
        if vals_lhs is None:
            raise ValueError("paraboloid pushforward needs a callable phi")
        r2_pp = np.sum(xpp * xpp, axis=-1)
        r2 = np.sum(S.param * S.param, axis=-1)
        Jv = 4.0 * np.sqrt((1.0 + 4.0 * r2_pp) / (1.0 + 4.0 * r2))
        lhs = float(np.sum(vals_lhs * Jv * S.weights))
        return VerificationRecord.compare("pushforward", lhs, rhs, 1e-5)

    raise ValueError(f"pushforward check not implemented for {S.kind}")


def _phi_as_callable(S: SurfaceModel, phi):
    if callable(phi):
        return phi
    from scipy.interpolate import CubicSpline
    spline = CubicSpline(S.param, np.asarray(phi, float))
    lo, hi = float(S.param[0]), float(S.param[-1])

    def fn(t):
        if t < lo or t > hi:
            return 0.0
        return float(spline(t))

    return fn


def distance_ratio_scan(S: SurfaceModel, max_pairs: int = 200_000) -> dict:
    """min/max of |u'-u''| / |u-u'| over sampled pairs (u not= u').

    Besides the pair grid, a sweep of nearly coincident pairs (offset 1e-5
    in the parameter) is included, since the extreme ratios of smooth convex
    patches are often attained in the diagonal limit.
    """
    diag = 1e-5
    if S.ambient_dim == 2:
        t = S.param
        stride = max(1, int(math.ceil(t.size / math.sqrt(max_pairs))))
        ts = t[::stride]
        tu, tp = np.meshgrid(ts, ts, indexing="ij")
        tu, tp = tu.ravel(), tp.ravel()
        tu = np.concatenate([tu, ts[:-1]])
        tp = np.concatenate([tp, ts[:-1] + diag])
        keep = np.abs(tu - tp) > 1e-9
        tu, tp = tu[keep], tp[keep]
        tpp, ok = reflect_param_grid(S, tu, tp)
        tu, tp, tpp = tu[ok], tp[ok], tpp[ok]
        num = np.linalg.norm(S.point_at(tp) - S.point_at(tpp), axis=-1)
        den = np.linalg.norm(S.point_at(tu) - S.point_at(tp), axis=-1)
    elif S.kind == "sphere2-cap":
        pts = _subsample(S.points, max_pairs)
        G = pts @ pts.T
        iu = np.triu_indices(pts.shape[0], k=1)
        dots = np.concatenate([G[iu], [math.cos(diag)]])
        num = 2.0 * np.sqrt(np.clip(1.0 - dots ** 2, 0.0, None))
        den = np.sqrt(np.clip(2.0 - 2.0 * dots, 1e-300, None))
    elif S.kind == "paraboloid-patch":
        xs = _subsample(S.param, max_pairs)
        xu = np.concatenate([np.repeat(xs, xs.shape[0], axis=0), xs], axis=0)
        xp = np.concatenate([np.tile(xs, (xs.shape[0], 1)),
                             xs + np.array([diag, 0.0])], axis=0)
        xpp = 2.0 * xu - xp
        Pu, Pp, P2 = (paraboloid_point(z) for z in (xu, xp, xpp))
        num = np.linalg.norm(Pp - P2, axis=-1).ravel()
        den = np.linalg.norm(Pu - Pp, axis=-1).ravel()
        keep = den > 1e-9
        num, den = num[keep], den[keep]
    else:
        raise ValueError(S.kind)
    ratios = num / den
    return {"min": float(ratios.min()), "max": float(ratios.max()),
            "pairs": int(ratios.size)}


def _subsample(arr: np.ndarray, max_pairs: int) -> np.ndarray:
    m = arr.shape[0]
    target = int(math.sqrt(max_pairs))
    stride = max(1, m // target)
    return arr[::stride]


def midpoint_table(S: SurfaceModel, pairs) -> list[JacobianRecord]:
    """JacobianRecords for an iterable of node index pairs."""
    records = []
    for i, j in pairs:
        u2 = reflect_point(S, i, j)
        method = "closed-form" if (_is_param_reflection(S) or S.ambient_dim == 3) \
            else "finite-difference"
        records.append(JacobianRecord(
            u_index=int(i), uprime_index=int(j), u2=tuple(float(c) for c in u2),
            J=jacobian_J(S, i, j), Delta=jacobian_Delta(S, i, j),
            Jtilde=jacobian_Jtilde(S, i, j), method=method))
    return records
