"""Fourier extension of surface densities and weighted L2 functionals.

The extension of a node density g is the oscillatory surface integral
``integral_S g(u) exp(-2 pi i x.u) dsigma(u)``, evaluated by the surface
quadrature rule carried by the SurfaceModel (periodic trapezoid on closed
curves, so spectrally accurate there).  Oscillation control is explicit: the
evaluation refuses points whose phase advances faster than one period per
eight nodes anywhere on the patch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnderResolved
from .geometry import SurfaceModel
from .gridio import GridFunction

_CHUNK = 4096


@dataclass
class SurfaceDensity:
    """Complex node amplitudes with an explicit support mask."""

    values: np.ndarray
    support: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, complex)
        if not np.all(np.isfinite(self.values.view(float))):
            raise ValueError("non-finite density values")
        if self.support is None:
            self.support = self.values != 0
        self.support = np.asarray(self.support, bool)
        if np.any(self.values[~self.support] != 0):
            raise ValueError("support mask excludes nonzero nodes")


def density_values(g) -> np.ndarray:
    """Coerce a SurfaceDensity or plain array to a complex node array."""
    if isinstance(g, SurfaceDensity):
        return g.values
    return np.asarray(g, complex)


def max_node_step(S: SurfaceModel) -> float:
    """Largest ambient distance between parameter-adjacent nodes."""
    if S.ambient_dim == 2:
        return float(np.max(np.linalg.norm(np.diff(S.points, axis=0), axis=1)))
    if S.kind == "sphere2-cap":
        dtheta = float(S.meta["spacing"])
        dphi_ambient = math.sin(S.meta["theta_c"]) * float(S.meta["dphi"])
        return max(dtheta, dphi_ambient)
    h = float(S.meta["spacing"])
    r = float(np.max(np.linalg.norm(S.param, axis=1)))
    return h * float(np.sqrt(1.0 + 4.0 * r * r))


def resolution_limit(S: SurfaceModel) -> float:
    """Largest |x| whose phase 2 pi x.u is sampled >= 8 nodes per period."""
    return 1.0 / (8.0 * max_node_step(S))


def extend(S: SurfaceModel, g, x) -> complex:
    """Extension at a single point x."""
    return complex(extend_many(S, g, np.asarray(x, float)[None, :])[0])


def extend_many(S: SurfaceModel, g, X: np.ndarray) -> np.ndarray:
    """Vectorized extension over rows of X (shape (P, n))."""
    X = np.atleast_2d(np.asarray(X, float))
    gv = density_values(g)
    rmax = float(np.max(np.linalg.norm(X, axis=1)))
    if rmax > resolution_limit(S):
        raise UnderResolved(
            f"|x| = {rmax:.3g} beyond the phase-resolution limit "
            f"{resolution_limit(S):.3g} of this grid")
    wg = gv * S.weights
    out = np.empty(X.shape[0], complex)
    for lo in range(0, X.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, X.shape[0])
        phase = X[lo:hi] @ S.points.T
        out[lo:hi] = np.exp(-2j * np.pi * phase) @ wg
    return out


def intensity_grid(S: SurfaceModel, g, origin, spacing, shape) -> GridFunction:
    """|extension|^2 sampled on a uniform grid (the 'local intensity')."""
    grid = GridFunction(np.zeros(tuple(shape)), origin, spacing)
    pts = np.stack(grid.meshgrid(), axis=-1).reshape(-1, len(shape))
    vals = np.abs(extend_many(S, g, pts)) ** 2
    grid.values = vals.reshape(tuple(shape))
    return grid


def weighted_l2(S: SurfaceModel, g, w: GridFunction) -> float:
    """integral |extension|^2 w over the weight grid, trapezoid rule."""
    tw = np.ones(w.shape[0])
    tw[0] = tw[-1] = 0.5
    weights = tw
    for k in range(1, w.ndim):
        tk = np.ones(w.shape[k])
        tk[0] = tk[-1] = 0.5
        weights = np.multiply.outer(weights, tk)
    mask = w.values != 0
    if not np.any(mask):
        return 0.0
    pts = np.stack(w.meshgrid(), axis=-1)[mask]
    ext2 = np.abs(extend_many(S, g, pts)) ** 2
    return float(np.sum(ext2 * (w.values[mask] * weights[mask]))
                 * w.cell_volume)


def high_frequency_scaling(S: SurfaceModel, g, w: GridFunction,
                           R0: float = 16.0, samples: int = 9,
                           n_theta: int = 64,
                           xmax: float | None = None) -> dict:
    """Average of R^{n-1} integral |extension(Rx)|^2 w(x) dx over R in
    [R0, 2 R0], against the geometric-optics limit
    integral |g|^2 (integral_R w(t xi) dt) dsigma(xi).

    The intensity oscillates on the half-wavelength scale, so the spatial
    integral runs in the scaled variable y = Rx on a polar mesh whose radial
    step resolves that scale; a fixed x-grid would overweight the origin
    peak by a factor of order R (grid cell)^n.  The averaging window over R
    washes out the residual oscillation; the limit constant is 1 under the
    exp(-2 pi i x.u) convention.
    """
    if S.ambient_dim != 2:
        raise ValueError("scaling check implemented for plane curves")
    gv = density_values(g)
    n = S.ambient_dim
    Rs = np.linspace(R0, 2.0 * R0, samples)
    # extent of w, then the polar mesh in y covering 2 R0 * that extent
    if xmax is None:
        corners = np.abs([w.origin,
                          w.origin + w.spacing * (np.array(w.shape) - 1)])
        xmax = float(np.max(corners)) * math.sqrt(n)
    rho_max = 2.0 * R0 * xmax
    d_rho = 1.0 / 16.0
    rho = np.arange(0.5 * d_rho, rho_max, d_rho)
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    ys = np.stack([rho[:, None] * np.cos(theta)[None, :],
                   rho[:, None] * np.sin(theta)[None, :]], axis=-1)
    intensity = np.abs(extend_many(S, gv, ys.reshape(-1, 2)) ** 2
                       ).reshape(rho.size, n_theta).real
    d_theta = 2.0 * math.pi / n_theta
    lhs_vals = []
    for R in Rs:
        wv = w.sample(ys.reshape(-1, 2) / R).reshape(rho.size, n_theta)
        integral_y = float(np.sum(intensity * wv * rho[:, None])) \
            * d_rho * d_theta
        lhs_vals.append(R ** (n - 1) * integral_y / R ** n)
    lhs = float(np.mean(lhs_vals))
    # line integrals of w along the directions u_i, by dense sampling
    tmax = float(np.max(np.abs(
        [w.origin, w.origin + w.spacing * (np.array(w.shape) - 1)]))) \
        * np.sqrt(n) + 1.0
    ts = np.linspace(-tmax, tmax, 513)
    dt = ts[1] - ts[0]
    queries = (ts[:, None, None] * S.points[None, :, :]).reshape(-1, n)
    vals = w.sample(queries).reshape(ts.size, S.node_count)
    line = vals.sum(axis=0) * dt
    rhs = float(np.sum(np.abs(gv) ** 2 * line * S.weights))
    return {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs else np.inf,
            "per_R": lhs_vals}
