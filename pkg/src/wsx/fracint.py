"""Bilinear fractional integrals and the surface maximal averages.

The Euclidean operator pairs two gridded profiles through a kernel that
is singular at the origin of the difference variable; the surface form
pairs two densities through the midpoint map, with the collision u' = u
playing the role of the origin.  Both integrate the singular zone on a
locally refined polar sub-grid and cross-check that refinement against
a coarser one, so an under-resolved density near the singularity fails
loudly instead of silently biasing the value.
"""
from __future__ import annotations

import math

import numpy as np

from . import midpoint as mp
from .errors import SingularityUnderResolved
from .geometry import SurfaceModel, paraboloid_point
from .gridio import GridFunction

__all__ = [
    "frac_integral_euclid", "frac_integral_surface", "supp_star_mask",
    "maximal_average", "maximal",
]

_ZONE_CELLS = 2      # cells around the singularity handed to the refiner
_REFINE = 16         # sub-cells per cell inside the zone
_CONSISTENCY = 2e-2  # tolerated relative gap between the two refinements


# ---------------------------------------------------------------------------
# Euclidean kernels
# ---------------------------------------------------------------------------

def _kernel_point(r, s: float, variant: str):
    if variant == "homogeneous":
        return np.where(r > 0, r, 1.0) ** (-s)
    return (1.0 + r * r) ** (-0.5 * s)


def _power_cell(lo, hi, s: float):
    """Exact integral of |x|^(-s) over [lo, hi], elementwise; needs s < 1."""
    def F(x):
        return np.sign(x) * np.abs(x) ** (1.0 - s) / (1.0 - s)
    return F(np.asarray(hi, float)) - F(np.asarray(lo, float))


def _radial_power_cell(lo, hi, s: float):
    """Exact integral of r^(1-s) over [lo, hi] (the polar measure r dr)."""
    e = 2.0 - s
    return (np.asarray(hi, float) ** e - np.asarray(lo, float) ** e) / e


def _split_edges(lo: float, hi: float, knot: float, step: float) -> np.ndarray:
    """Sub-cell edges over [lo, hi] of width about ``step``, with ``knot``
    forced onto an edge when it falls strictly inside the interval."""
    pieces = [(lo, knot), (knot, hi)] if lo < knot < hi else [(lo, hi)]
    parts = []
    for p, q in pieces:
        n = max(1, round((q - p) / step))
        arr = np.linspace(p, q, n + 1)
        parts.append(arr if not parts else arr[1:])
    return np.concatenate(parts)


def _check_zone(fine: float, coarse: float, outer: float, what: str) -> float:
    scale = max(abs(fine), abs(outer), 1e-12)
    if abs(fine - coarse) > _CONSISTENCY * scale:
        raise SingularityUnderResolved(
            f"{what}: refined singular zone disagrees with its half-resolution "
            f"check ({fine:.6g} vs {coarse:.6g})")
    return fine


def frac_integral_euclid(f1: GridFunction, f2: GridFunction, s: float, v,
                         variant: str = "homogeneous") -> float:
    """Pair two profiles through a fractional kernel of the difference.

    Integrates f1(v + xi/2) f2(v - xi/2) K(xi) over the difference
    variable, with K = |xi|^(-s) ("homogeneous", 0 < s < d) or
    (1 + |xi|^2)^(-s/2) ("inhomogeneous", s > 0).  Cells within
    ``_ZONE_CELLS`` steps of xi = 0 are re-integrated on a refined local
    sub-grid with the kernel mass of each sub-cell taken in closed form,
    and that result is cross-checked at half the refinement.
    """
    if variant not in ("homogeneous", "inhomogeneous"):
        raise ValueError(f"unknown variant {variant!r}")
    d = f1.ndim
    if f2.ndim != d:
        raise ValueError("profiles live in different dimensions")
    if d not in (1, 2):
        raise ValueError("implemented in one and two dimensions")
    s = float(s)
    if variant == "homogeneous" and not (0.0 < s < d):
        raise ValueError(f"homogeneous kernel needs 0 < s < {d}")
    if variant == "inhomogeneous" and s <= 0.0:
        raise ValueError("inhomogeneous kernel needs s > 0")
    v = np.broadcast_to(np.asarray(v, float), (d,)).astype(float)

    # window of xi where both factors can be nonzero
    lo1, hi1 = f1.origin, f1.origin + (np.array(f1.shape) - 1) * f1.spacing
    lo2, hi2 = f2.origin, f2.origin + (np.array(f2.shape) - 1) * f2.spacing
    a = np.maximum(2.0 * (lo1 - v), 2.0 * (v - hi2))
    b = np.minimum(2.0 * (hi1 - v), 2.0 * (v - lo2))
    if np.any(b <= a):
        return 0.0
    h = 2.0 * np.minimum(f1.spacing, f2.spacing)

    def pair(xi):
        return np.real(f1.sample(v + 0.5 * xi) * f2.sample(v - 0.5 * xi))

    if d == 1:
        return _euclid_1d(pair, s, variant, float(a[0]), float(b[0]),
                          float(h[0]))
    return _euclid_2d(pair, s, variant, a, b, h)


def _euclid_1d(pair, s, variant, a, b, h) -> float:
    m0 = int(math.ceil(a / h - 0.5))
    m1 = int(math.floor(b / h + 0.5))
    m = np.arange(m0, m1 + 1)
    if m.size == 0:
        return 0.0
    inner = np.abs(m) <= _ZONE_CELLS
    centers = m * h
    if variant == "homogeneous":
        w = _power_cell((m - 0.5) * h, (m + 0.5) * h, s)
    else:
        w = h * _kernel_point(np.abs(centers), s, variant)
    outer = float(np.sum(pair(centers[~inner, None]) * w[~inner]))

    zlo = max(a, -( _ZONE_CELLS + 0.5) * h)
    zhi = min(b, (_ZONE_CELLS + 0.5) * h)
    if zhi <= zlo:
        return outer

    def zone(refine: int) -> float:
        step = h / refine
        e = _split_edges(zlo, zhi, 0.0, step)
        mids = 0.5 * (e[:-1] + e[1:])
        if variant == "homogeneous":
            wz = _power_cell(e[:-1], e[1:], s)
        else:
            wz = np.diff(e) * _kernel_point(np.abs(mids), s, variant)
        return float(np.sum(pair(mids[:, None]) * wz))

    z = _check_zone(zone(_REFINE), zone(_REFINE // 2), outer,
                    "frac_integral_euclid")
    return outer + z


def _euclid_2d(pair, s, variant, a, b, h) -> float:
    m0 = np.ceil(a / h - 0.5).astype(int)
    m1 = np.floor(b / h + 0.5).astype(int)
    if np.any(m1 < m0):
        return 0.0
    g1 = np.arange(m0[0], m1[0] + 1)
    g2 = np.arange(m0[1], m1[1] + 1)
    M1, M2 = np.meshgrid(g1, g2, indexing="ij")
    inner = (np.abs(M1) <= _ZONE_CELLS) & (np.abs(M2) <= _ZONE_CELLS)
    xi = np.stack([M1 * h[0], M2 * h[1]], axis=-1)
    r = np.linalg.norm(xi, axis=-1)
    w = h[0] * h[1] * _kernel_point(r, s, variant)
    outer = float(np.sum(pair(xi[~inner]) * w[~inner]))

    # the zone rectangle, clipped to the support window; rays from the
    # origin reach every point of it because the rectangle is convex
    zlo = np.maximum(a, -(_ZONE_CELLS + 0.5) * h)
    zhi = np.minimum(b, (_ZONE_CELLS + 0.5) * h)
    if np.any(zhi <= zlo):
        return outer

    def zone(n_theta: int, refine: int) -> float:
        th = 2.0 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
        dth = 2.0 * math.pi / n_theta
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        total = 0.0
        step = float(h.min()) / refine
        for e in dirs:
            # clip the ray from the origin to the zone rectangle
            r_stop = math.inf
            for k in range(2):
                if e[k] > 1e-15:
                    r_stop = min(r_stop, zhi[k] / e[k])
                elif e[k] < -1e-15:
                    r_stop = min(r_stop, zlo[k] / e[k])
            if not r_stop > 0.0 or not math.isfinite(r_stop):
                continue
            nr = max(1, int(math.ceil(r_stop / step)))
            re = np.linspace(0.0, r_stop, nr + 1)
            rm = 0.5 * (re[:-1] + re[1:])
            if variant == "homogeneous":
                wr = _radial_power_cell(re[:-1], re[1:], s)
            else:
                wr = rm * np.diff(re) * _kernel_point(rm, s, variant)
            vals = pair(rm[:, None] * e[None, :])
            total += dth * float(np.sum(vals * wr))
        return total

    z = _check_zone(zone(16 * 8, _REFINE), zone(16 * 4, _REFINE // 2),
                    outer, "frac_integral_euclid")
    return outer + z


# ---------------------------------------------------------------------------
# surface-carried integrals
# ---------------------------------------------------------------------------

def _curve_density(S: SurfaceModel, g, t_query: np.ndarray) -> np.ndarray:
    """Evaluate a density at arbitrary parameters.

    Node arrays interpolate by cubic spline, forced to zero outside the
    closed hull of their nonzero nodes so spline overshoot never leaks
    support past where the data says it ends."""
    t_query = np.asarray(t_query, float)
    if callable(g):
        return np.asarray(g(t_query), float)
    g = np.asarray(g, float)
    nz = np.flatnonzero(g != 0.0)
    if nz.size == 0:
        return np.zeros_like(t_query)
    from scipy.interpolate import CubicSpline
    out = CubicSpline(S.param, g)(t_query)
    h = float(S.meta["spacing"])
    lo = float(S.param[nz[0]]) - 0.5 * h
    hi = float(S.param[nz[-1]]) + 0.5 * h
    return np.where((t_query >= lo) & (t_query <= hi), out, 0.0)


def frac_integral_surface(S: SurfaceModel, g1, g2, s: float, u: int) -> float:
    """Midpoint-paired fractional integral at node u.

    Integrates g1(u') g2(R_u u') |u' - R_u u'|^(-s) J(u, u') over the
    surface.  The collision u' = u is handled like the Euclidean origin:
    nodes within ``_ZONE_CELLS`` cells are replaced by a refined local
    quadrature whose radial kernel mass is taken in closed form, checked
    against its half-resolution variant.  The value is exactly zero
    whenever no pair (u', R_u u') meets both supports.
    """
    s = float(s)
    if S.ambient_dim == 2:
        if not (0.0 < s < 1.0):
            raise ValueError("curve kernel needs 0 < s < 1")
        return _frac_curve(S, g1, g2, s, int(u))
    if not (0.0 < s < 2.0):
        raise ValueError("surface kernel needs 0 < s < 2")
    if not (callable(g1) and callable(g2)):
        raise TypeError("pass densities as callables of the ambient point "
                        "for two-dimensional surfaces")
    if S.kind == "sphere2-cap":
        return _frac_sphere(S, g1, g2, s, int(u))
    if S.kind == "paraboloid-patch":
        return _frac_paraboloid(S, g1, g2, s, int(u))
    raise ValueError(S.kind)


def _frac_curve(S: SurfaceModel, g1, g2, s: float, iu: int) -> float:
    t = S.param
    t_u = float(t[iu])
    h = float(S.meta["spacing"])
    tpp, ok = mp.reflect_param_grid(S, np.full(t.shape, t_u), t)
    # reflections leaving the patch carry no surface density; dropping them
    # up front also keeps J away from its removable antipodal singularity
    ok &= (tpp >= t[0] - 1e-12) & (tpp <= t[-1] + 1e-12)
    near = np.abs(t - t_u) < (_ZONE_CELLS + 0.5) * h
    sel = ok & ~near
    v1 = _curve_density(S, g1, t[sel])
    v2 = _curve_density(S, g2, tpp[sel])
    chord = np.linalg.norm(S.point_at(t[sel]) - S.point_at(tpp[sel]), axis=-1)
    J = mp.curve_jacobian_J(S, np.full(t[sel].shape, t_u), t[sel], tpp[sel])
    outer = float(np.sum(v1 * v2 * chord ** (-s) * J * S.weights[sel]))

    lo = max(float(t[0]), t_u - (_ZONE_CELLS + 0.5) * h)
    hi = min(float(t[-1]), t_u + (_ZONE_CELLS + 0.5) * h)
    c = 2.0 * float(S.speed_at(t_u))  # d|chord|/dt' at the collision

    def zone(refine: int) -> float:
        e = _split_edges(lo, hi, t_u, h / refine)
        mids = 0.5 * (e[:-1] + e[1:])
        # exact kernel mass of the linearized chord c|t - t_u|, corrected by
        # the smooth ratio (chord / c|t - t_u|)^(-s) at the sub-cell centre
        kern = c ** (-s) * _power_cell(e[:-1] - t_u, e[1:] - t_u, s)
        tpp_m, ok_m = mp.reflect_param_grid(S, np.full(mids.shape, t_u), mids)
        ok_m &= (tpp_m >= t[0] - 1e-12) & (tpp_m <= t[-1] + 1e-12)
        mids, tpp_m, kern = mids[ok_m], tpp_m[ok_m], kern[ok_m]
        if mids.size == 0:
            return 0.0
        w1 = _curve_density(S, g1, mids)
        w2 = _curve_density(S, g2, tpp_m)
        chord_m = np.linalg.norm(S.point_at(mids) -
                                 S.point_at(tpp_m), axis=-1)
        Jm = mp.curve_jacobian_J(S, np.full(mids.shape, t_u), mids, tpp_m)
        ratio = chord_m / (c * np.abs(mids - t_u))
        vals = w1 * w2 * ratio ** (-s) * Jm * S.speed_at(mids)
        return float(np.sum(vals * kern))

    if hi <= lo:
        return outer
    z = _check_zone(zone(_REFINE), zone(_REFINE // 2), outer,
                    "frac_integral_surface")
    return outer + z


def _tangent_frame(S: SurfaceModel, iu: int):
    E = S.tangents[iu]
    return E[0], E[1]


def _frac_sphere(S: SurfaceModel, g1, g2, s: float, iu: int) -> float:
    u = S.points[iu]
    pts = S.points
    upp = mp.reflect_sphere(u, pts)
    chord = np.linalg.norm(upp - pts, axis=-1)
    geo = np.arccos(np.clip(pts @ u, -1.0, 1.0))
    dth = float(S.meta["spacing"])
    theta_c = float(S.meta["theta_c"])
    R = (_ZONE_CELLS + 0.5) * dth
    # a reflected partner that leaves the cap carries no surface density
    far = (geo >= R) & (np.arccos(np.clip(upp[..., 2], -1.0, 1.0))
                        <= theta_c + 1e-12)
    J = 4.0 * np.abs(pts[far] @ u)
    vals = np.asarray(g1(pts[far]), float) * np.asarray(g2(upp[far]), float)
    outer = float(np.sum(vals * chord[far] ** (-s) * J * S.weights[far]))

    e1, e2 = _tangent_frame(S, iu)

    def zone(n_theta: int, refine: int) -> float:
        th = 2.0 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
        dth_ray = 2.0 * math.pi / n_theta
        nr = max(1, int(math.ceil(R / (dth / refine))))
        re = np.linspace(0.0, R, nr + 1)
        rm = 0.5 * (re[:-1] + re[1:])
        # chord = 2 sin(rho); kernel x polar measure written as the exact
        # (2 rho)^(-s) rho mass times the smooth factor (sin rho / rho)^(1-s)
        wr = 2.0 ** (-s) * _radial_power_cell(re[:-1], re[1:], s)
        corr = (np.sin(rm) / rm) ** (1.0 - s)
        dirs = np.cos(th)[:, None] * e1[None, :] + \
            np.sin(th)[:, None] * e2[None, :]
        up = np.cos(rm)[None, :, None] * u[None, None, :] + \
            np.sin(rm)[None, :, None] * dirs[:, None, :]
        u2 = mp.reflect_sphere(u, up)
        inside = (np.arccos(np.clip(up[..., 2], -1.0, 1.0)) <=
                  theta_c + 1e-12) & \
                 (np.arccos(np.clip(u2[..., 2], -1.0, 1.0)) <=
                  theta_c + 1e-12)
        P = up.reshape(-1, 3)
        vz = (np.asarray(g1(P), float).reshape(up.shape[:2]) *
              np.asarray(g2(u2.reshape(-1, 3)), float).reshape(up.shape[:2]))
        Jz = 4.0 * np.cos(rm)[None, :]
        return dth_ray * float(np.sum(np.where(inside, vz, 0.0) * Jz *
                                      (wr * corr)[None, :]))

    z = _check_zone(zone(64, _REFINE), zone(32, _REFINE // 2), outer,
                    "frac_integral_surface")
    return outer + z


def _frac_paraboloid(S: SurfaceModel, g1, g2, s: float, iu: int) -> float:
    x_u = np.asarray(S.param[iu], float)
    X = S.param
    L = float(S.params["halfwidth"])
    xpp = mp.reflect_paraboloid(x_u, X)
    upp = paraboloid_point(xpp)
    chord = np.linalg.norm(upp - S.points, axis=-1)
    dist = np.linalg.norm(X - x_u, axis=-1)
    h = float(S.meta["spacing"])
    R = (_ZONE_CELLS + 0.5) * h
    # partners reflected off the patch carry no surface density
    far = (dist >= R) & np.all(np.abs(xpp) <= L + 1e-12, axis=-1)
    J = 4.0 * np.sqrt((1.0 + 4.0 * np.sum(xpp[far] ** 2, axis=-1)) /
                      (1.0 + 4.0 * float(x_u @ x_u)))
    vals = np.asarray(g1(S.points[far]), float) * \
        np.asarray(g2(upp[far]), float)
    outer = float(np.sum(vals * chord[far] ** (-s) * J * S.weights[far]))

    def zone(n_theta: int, refine: int) -> float:
        th = 2.0 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
        dth = 2.0 * math.pi / n_theta
        step = h / refine
        total = 0.0
        for ang in th:
            e = np.array([math.cos(ang), math.sin(ang)])
            r_stop = R
            for k in range(2):
                if e[k] > 1e-15:
                    r_stop = min(r_stop, (L - x_u[k]) / e[k])
                elif e[k] < -1e-15:
                    r_stop = min(r_stop, (-L - x_u[k]) / e[k])
            if r_stop <= 0.0:
                continue
            nr = max(1, int(math.ceil(r_stop / step)))
            re = np.linspace(0.0, r_stop, nr + 1)
            rm = 0.5 * (re[:-1] + re[1:])
            # chord = 2 rho sqrt(1 + 4 (e.x_u)^2) exactly on this surface
            aniso = math.sqrt(1.0 + 4.0 * float(e @ x_u) ** 2)
            wr = (2.0 * aniso) ** (-s) * _radial_power_cell(re[:-1], re[1:], s)
            xprime = x_u[None, :] + rm[:, None] * e[None, :]
            xsec = mp.reflect_paraboloid(x_u, xprime)
            uprime = paraboloid_point(xprime)
            usec = paraboloid_point(xsec)
            area = np.sqrt(1.0 + 4.0 * np.sum(xprime ** 2, axis=-1))
            Jz = 4.0 * np.sqrt((1.0 + 4.0 * np.sum(xsec ** 2, axis=-1)) /
                               (1.0 + 4.0 * float(x_u @ x_u)))
            vz = np.asarray(g1(uprime), float) * np.asarray(g2(usec), float)
            vz = np.where(np.all(np.abs(xsec) <= L + 1e-12, axis=-1), vz, 0.0)
            total += dth * float(np.sum(vz * Jz * area * wr))
        return total

    z = _check_zone(zone(64, _REFINE), zone(32, _REFINE // 2), outer,
                    "frac_integral_surface")
    return outer + z


# ---------------------------------------------------------------------------
# support of the pairing, and the maximal averages
# ---------------------------------------------------------------------------

def _pair_products(S: SurfaceModel, f1, f2, iu: int):
    """Node-wise f1(u') f2(R_u u') J w together with the chord lengths."""
    if S.ambient_dim == 2:
        t = S.param
        t_u = float(t[iu])
        tpp, ok = mp.reflect_param_grid(S, np.full(t.shape, t_u), t)
        ok &= (tpp >= t[0] - 1e-12) & (tpp <= t[-1] + 1e-12)
        prod = np.zeros(t.size)
        chord = np.full(t.size, np.inf)
        idx = np.flatnonzero(ok)
        if idx.size:
            v1 = _curve_density(S, f1, t[idx])
            v2 = _curve_density(S, f2, tpp[idx])
            chord[idx] = np.linalg.norm(S.point_at(t[idx]) -
                                        S.point_at(tpp[idx]), axis=-1)
            J = mp.curve_jacobian_J(S, np.full(idx.shape, t_u),
                                    t[idx], tpp[idx])
            prod[idx] = v1 * v2 * J * S.weights[idx]
        return prod, chord
    if not (callable(f1) and callable(f2)):
        raise TypeError("pass densities as callables of the ambient point "
                        "for two-dimensional surfaces")
    pts = S.points
    if S.kind == "sphere2-cap":
        u = pts[iu]
        upp = mp.reflect_sphere(u, pts)
        J = 4.0 * np.abs(pts @ u)
        on_patch = np.arccos(np.clip(upp[..., 2], -1.0, 1.0)) <= \
            float(S.meta["theta_c"]) + 1e-12
    elif S.kind == "paraboloid-patch":
        x_u = np.asarray(S.param[iu], float)
        xpp = mp.reflect_paraboloid(x_u, S.param)
        upp = paraboloid_point(xpp)
        J = 4.0 * np.sqrt((1.0 + 4.0 * np.sum(xpp ** 2, axis=-1)) /
                          (1.0 + 4.0 * float(x_u @ x_u)))
        on_patch = np.all(np.abs(xpp) <= float(S.params["halfwidth"]) + 1e-12,
                          axis=-1)
    else:
        raise ValueError(S.kind)
    chord = np.linalg.norm(upp - pts, axis=-1)
    prod = np.asarray(f1(pts), float) * np.asarray(f2(upp), float) * \
        J * S.weights
    return np.where(on_patch, prod, 0.0), np.where(on_patch, chord, np.inf)


def supp_star_mask(S: SurfaceModel, g1, g2) -> np.ndarray:
    """Nodes u with some u' in supp(g1) whose partner R_u u' lies in supp(g2)."""
    out = np.zeros(len(S.points), dtype=bool)
    for i in range(len(S.points)):
        prod, _ = _pair_products(S, g1, g2, i)
        out[i] = bool(np.any(prod != 0.0))
    return out


def maximal_average(S: SurfaceModel, f1, f2, u: int, delta: float) -> float:
    """Collision-ball average at scale delta.

    Integrates f1(u') f2(R_u u') J over the set where the chord
    |u' - R_u u'| stays below delta, normalized by delta^(n-1)."""
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    prod, chord = _pair_products(S, f1, f2, int(u))
    return float(np.sum(prod[chord < delta])) / delta ** (S.ambient_dim - 1)


def _dyadic_depth(S: SurfaceModel) -> int:
    """Deepest k with 2^-k still a few chord-resolution lengths wide."""
    if S.ambient_dim == 2:
        res = 2.0 * float(S.meta["spacing"]) * \
            float(np.max(S.speed_at(S.param)))
    elif S.kind == "sphere2-cap":
        res = 2.0 * float(S.meta["spacing"])
    else:
        L = float(S.params["halfwidth"])
        res = 2.0 * float(S.meta["spacing"]) * math.sqrt(1.0 + 8.0 * L * L)
    if res <= 0.0 or 4.0 * res >= 1.0:
        return 0
    return int(math.floor(math.log2(1.0 / (4.0 * res))))


def maximal(S: SurfaceModel, f1, f2, u: int) -> float:
    """Dyadic sup of the collision-ball averages, delta = 2^-k, k = 0..K."""
    prod, chord = _pair_products(S, f1, f2, int(u))
    n1 = S.ambient_dim - 1
    best = 0.0
    for k in range(_dyadic_depth(S) + 1):
        delta = 2.0 ** (-k)
        best = max(best, float(np.sum(prod[chord < delta])) / delta ** n1)
    return best
