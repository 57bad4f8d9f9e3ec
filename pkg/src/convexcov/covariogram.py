"""Covariogram evaluation, sampling and finite-difference derivatives.

For polygons ``g_K(x)`` is the area of a clipped polygon.  For support bodies
the overlap ``K ∩ (K + x)`` is bounded by two arcs of ``bd K`` whose
endpoints are found by solving ``p(t) - p(t + d) = x``.  The area then
follows from the closed-form arc integral of the body, so values are accurate
to rounding and can be differentiated twice numerically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .errors import NumericalError, PreconditionError
from .geometry import (
    TWO_PI,
    ConvexBody,
    ConvexPolygon,
    SupportBody,
    as_vec,
    body_scale,
    convex_intersection,
    det2,
    difference_body_cached,
    inner_signed_distance,
    polygonize,
    rot90,
    unit,
)

log = logging.getLogger(__name__)

POLYGONIZE_DEFAULT = 4096


# ---------------------------------------------------------------------------
# exact evaluation for support bodies


@lru_cache(maxsize=16)
def _chord_table(K: SupportBody, n_theta: int = 720, n_delta: int = 360):
    theta = np.arange(n_theta) * (TWO_PI / n_theta)
    delta = (np.arange(n_delta) + 0.5) * (math.pi / n_delta)
    T, Dl = np.meshgrid(theta, delta, indexing="ij")
    chords = K.point(T) - K.point(T + Dl)
    tree = cKDTree(chords.reshape(-1, 2))
    return tree, T.ravel(), Dl.ravel()


def _frame(K: SupportBody, angles):
    """Boundary points and tangents at ``angles`` from a single support evaluation."""
    if hasattr(K, "h_derivs_unit"):
        h, h1, h2, u = K.h_derivs_unit(angles)
    else:
        h, h1, h2 = K.h_derivs(angles)
        u = unit(angles)
    Ru = rot90(u)
    return h[..., None] * u + h1[..., None] * Ru, (h + h2)[..., None] * Ru


def _newton_chords(K, X, theta, delta, tol):
    """Damped Newton for ``p(theta) - p(theta + delta) = X``; returns a convergence mask."""
    theta = theta.copy()
    delta = delta.copy()
    ok = np.zeros(len(X), dtype=bool)
    active = np.arange(len(X))
    res = np.full(len(X), np.inf)
    for _ in range(60):
        if len(active) == 0:
            break
        th, de, x = theta[active], delta[active], X[active]
        m = len(active)
        p, t = _frame(K, np.concatenate([th, th + de]))
        F = p[:m] - p[m:] - x
        nF = np.linalg.norm(F, axis=1)
        res[active] = nF
        done = nF <= tol
        ok[active[done]] = True
        # points that just converged still take this step; it only polishes rounding
        a, b = t[:m] - t[m:], -t[m:]
        det = det2(a, b)
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        dth = det2(-F, b) / det
        dde = det2(a, -F) / det
        lam = np.ones(m)
        for _ in range(12):
            nth = th + lam * dth
            nde = np.clip(de + lam * dde, 1e-12, math.pi)
            q, _ = _frame(K, np.concatenate([nth, nth + nde]))
            nF2 = np.linalg.norm(q[:m] - q[m:] - x, axis=1)
            worse = (nF2 > nF) & ~done
            if not worse.any():
                break
            lam = np.where(worse, 0.5 * lam, lam)
        theta[active] = th + lam * dth
        delta[active] = np.clip(de + lam * dde, 1e-12, math.pi)
        active = active[~done]
    return theta, delta, ok, res


def chord_angles(K: SupportBody, X) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``p(theta) - p(theta + delta) = x`` with ``delta`` in ``(0, pi]``.

    The map is a bijection from ``(0, pi)`` chords onto ``int DK \\ {o}``, so
    the solution is unique.  ``X`` must lie in that set.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    tree, T, Dl = _chord_table(K)
    scale = K.diameter
    tol = 1e-13 * scale
    n_seeds = 6
    _, first = tree.query(X, k=1)
    theta0, delta0 = T[first], Dl[first]
    # short chords are nearly tangent, x ~ -delta rho(theta) R u(theta); the
    # table is too coarse for them
    r = np.linalg.norm(X, axis=1)
    short = r < 1e-3 * scale
    if short.any():
        th = np.arctan2(X[short, 0], -X[short, 1])
        theta0[short] = th
        delta0[short] = r[short] / K.curvature_radius(th)
    theta, delta, ok, res = _newton_chords(K, X, theta0, delta0, tol)
    # further table neighbours, looked up only for the stragglers
    strag = np.flatnonzero(~ok)
    if len(strag):
        _, idx = tree.query(X[strag], k=n_seeds)
    for k in range(1, n_seeds):
        if ok.all():
            break
        sel = ~ok[strag]
        bad = strag[sel]
        th, de, okb, rb = _newton_chords(K, X[bad], T[idx[sel, k]], Dl[idx[sel, k]], tol)
        theta[bad], delta[bad], res[bad] = th, de, rb
        ok[bad] = okb
    if not ok.all():
        # accept near-converged points; anything worse is a genuine failure
        soft = res <= 1e-10 * scale
        if not soft.all():
            i = int(np.flatnonzero(~soft)[0])
            raise NumericalError(
                "chord solver did not converge",
                x=X[i].tolist(), residual=float(res[i]), theta=float(theta[i]), delta=float(delta[i]),
            )
    return theta, delta


@lru_cache(maxsize=16)
def _radial_polygon(DK: SupportBody, n: int = 8192):
    """Boundary points of ``DK`` sorted by polar angle, and a band width.

    ``DK`` is centrally symmetric with o inside, so its boundary is a graph
    over the polar angle and the inscribed polygon through these points can
    be searched by angle.  Points farther than ``band`` from the bracketing
    edge's line are classified by side; the rest need the exact distance.
    """
    theta = np.arange(n) * (TWO_PI / n)
    p = DK.point(theta)
    ang = np.arctan2(p[:, 1], p[:, 0])
    order = np.argsort(ang)
    p, ang = p[order], ang[order]
    seg = np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1).max()
    r_min = float(DK.curvature_radius(theta).min())
    sagitta = seg * seg / (8.0 * r_min)
    band = max(10.0 * sagitta, 1e-5 * DK.diameter)
    return ang, p, band


def _inside_support(DK: ConvexBody, X, margin: float) -> np.ndarray:
    """``signed_distance(DK, X) < -margin``, with a cheap radial prefilter for support bodies."""
    if not isinstance(DK, SupportBody):
        return inner_signed_distance(DK, X) < -margin
    ang, p, band = _radial_polygon(DK)
    a = np.arctan2(X[:, 1], X[:, 0])
    j = np.searchsorted(ang, a) % len(ang)
    i = (j - 1) % len(ang)
    e = p[j] - p[i]
    side = det2(e, X - p[i]) / np.linalg.norm(e, axis=1)
    out = side > band
    unsure = np.flatnonzero(np.abs(side) <= band)
    if len(unsure):
        out[unsure] = inner_signed_distance(DK, X[unsure]) < -margin
    return out


def _perp_width(K: SupportBody, X) -> np.ndarray:
    ang = np.arctan2(X[:, 1], X[:, 0]) + 0.5 * math.pi
    return K.support(ang) + K.support(ang + math.pi)


def support_covariogram(K: SupportBody, X) -> np.ndarray:
    """Vectorised exact covariogram of a support body at the rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.zeros(len(X))
    scale = K.diameter
    DK = difference_body_cached(K)
    inside = _inside_support(DK, X, 1e-9 * scale)
    r = np.linalg.norm(X, axis=1)
    tiny = inside & (r <= 1e-8 * scale)
    if tiny.any():
        out[tiny] = K.area - r[tiny] * _perp_width(K, X[tiny])
    work = np.flatnonzero(inside & ~tiny)
    if len(work) == 0:
        return out
    x = X[work]
    m = len(x)
    th, dl = chord_angles(K, np.vstack([x, -x]))
    th1, d1, th3, d3 = th[:m], dl[:m], th[m:], dl[m:]
    th2, th4 = th1 + d1, th3 + d3
    span41 = np.mod(th1 - th4, TWO_PI)
    span23 = np.mod(th3 - th2, TWO_PI)
    p2 = K.point(th2)
    p3 = K.point(th3)
    twice = K.arc_integral(th4, th4 + span41) + K.arc_integral(th2, th2 + span23) + det2(x, p3 - p2)
    out[work] = np.maximum(0.5 * twice, 0.0)
    return out


def polygon_covariogram(P: ConvexPolygon, x) -> float:
    inter = convex_intersection(P, P.translate(x))
    return 0.0 if inter is None else inter.area


def covariogram_value(K: ConvexBody, x, method: str = "auto", n: int = POLYGONIZE_DEFAULT) -> float:
    """Area of ``K ∩ (K + x)``.

    ``method="polygon"`` forces the clipping path for support bodies, after
    polygonising with ``n`` vertices; the default uses the exact boundary
    integral.
    """
    x = as_vec(x, "x")
    if isinstance(K, ConvexPolygon):
        return polygon_covariogram(K, x)
    if method == "polygon":
        return polygon_covariogram(_polygonized(K, n), x)
    if method not in ("auto", "exact"):
        raise PreconditionError(f"unknown covariogram method {method!r}")
    return float(support_covariogram(K, x[None])[0])


def covariogram_values(K: ConvexBody, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(K, ConvexPolygon):
        return np.array([polygon_covariogram(K, x) for x in X])
    return support_covariogram(K, X)


@lru_cache(maxsize=16)
def _polygonized(K: SupportBody, n: int) -> ConvexPolygon:
    return polygonize(K, n)


def cross_covariogram(K: ConvexBody, L: ConvexBody, x, n: int = POLYGONIZE_DEFAULT) -> float:
    """Area of ``K ∩ (L + x)``; support bodies are polygonised first."""
    x = as_vec(x, "x")
    if K is L:
        return covariogram_value(K, x)
    Kp = K if isinstance(K, ConvexPolygon) else _polygonized(K, n)
    Lp = L if isinstance(L, ConvexPolygon) else _polygonized(L, n)
    inter = convex_intersection(Kp, Lp.translate(x))
    return 0.0 if inter is None else inter.area


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class CovariogramGrid:
    """``values[i, j]`` samples ``g`` at ``origin + spacing * (i, j)``."""

    origin: np.ndarray
    spacing: float
    values: np.ndarray
    body_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise PreconditionError("grid values must be a square array")
        if not self.spacing > 0:
            raise PreconditionError("grid spacing must be positive")
        if np.any(v < 0):
            raise PreconditionError("covariogram values must be non-negative")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "origin", as_vec(self.origin, "origin"))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def axis(self) -> np.ndarray:
        """Coordinates along x; the y axis uses the same offsets."""
        return self.origin[0] + self.spacing * np.arange(self.n)

    @property
    def yaxis(self) -> np.ndarray:
        return self.origin[1] + self.spacing * np.arange(self.n)

    def points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.axis, self.yaxis, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)


def covariogram_grid(K: ConvexBody, n: int, pad: float = 0.03, body_id: str = "") -> CovariogramGrid:
    """Sample ``g_K`` on an ``n x n`` grid symmetric about the origin.

    The grid covers the bounding box of ``DK`` enlarged by ``pad`` so the
    outermost ring is zero.
    """
    if n < 32:
        raise PreconditionError("covariogram_grid needs n >= 32")
    DK = difference_body_cached(K)
    if isinstance(DK, ConvexPolygon):
        half = float(np.abs(DK.vertices).max())
    else:
        half = float(max(DK.support(np.array([0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi]))))
    half *= 1.0 + pad
    spacing = 2.0 * half / (n - 1)
    ax = (np.arange(n) - 0.5 * (n - 1)) * spacing
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    # g is even: evaluate the first half of the flattened grid and mirror it
    m = (n * n + 1) // 2
    half_vals = _values_in_support(K, DK, pts[:m])
    vals = np.concatenate([half_vals, half_vals[: n * n - m][::-1]])
    return CovariogramGrid(np.array([ax[0], ax[0]]), spacing, vals.reshape(n, n), body_id)


def _values_in_support(K, DK, pts):
    if isinstance(K, SupportBody):
        return support_covariogram(K, pts)  # does its own support test
    out = np.zeros(len(pts))
    inside = inner_signed_distance(DK, pts) < 0.0
    if inside.any():
        out[inside] = covariogram_values(K, pts[inside])
    return out


# ---------------------------------------------------------------------------
# finite differences over an oracle


def _check_stencil(o, pts):
    scale = o.scale
    sd = o.dk_signed_distance(pts)
    if np.any(sd >= -1e-9 * scale):
        raise PreconditionError("finite-difference stencil leaves int DK")
    if np.any(np.linalg.norm(pts, axis=1) <= 1e-9 * scale):
        raise PreconditionError("finite-difference stencil touches the origin")


def fd_gradient(o, x, step: float | None = None) -> np.ndarray:
    """Central-difference gradient of the oracle's covariogram."""
    x = as_vec(x, "x")
    s = o.step if step is None else step
    e = np.eye(2) * s
    pts = np.vstack([x + e[0], x - e[0], x + e[1], x - e[1]])
    _check_stencil(o, np.vstack([pts, x]))
    v = o.values(pts)
    return np.array([v[0] - v[1], v[2] - v[3]]) / (2.0 * s)


def fd_hessian(o, x, step: float | None = None) -> np.ndarray:
    """Central-difference Hessian, symmetric by construction."""
    x = as_vec(x, "x")
    s = o.step if step is None else step
    ex, ey = np.array([s, 0.0]), np.array([0.0, s])
    pts = np.vstack([
        x, x + ex, x - ex, x + ey, x - ey,
        x + ex + ey, x + ex - ey, x - ex + ey, x - ex - ey,
    ])
    _check_stencil(o, pts)
    v = o.values(pts)
    gxx = (v[1] - 2 * v[0] + v[2]) / s**2
    gyy = (v[3] - 2 * v[0] + v[4]) / s**2
    gxy = (v[5] - v[6] - v[7] + v[8]) / (4 * s**2)
    return np.array([[gxx, gxy], [gxy, gyy]])


def _stencil_ok(o, X, reach):
    """Rows of ``X`` whose square stencil of half-width ``reach`` stays in int DK \\ {o}."""
    corners = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float) * reach
    pts = (X[:, None, :] + corners[None]).reshape(-1, 2)
    sd = o.dk_signed_distance(pts).reshape(len(X), 4)
    ok = np.all(sd < -1e-9 * o.scale, axis=1)
    return ok & (np.linalg.norm(X, axis=1) > 2.0 * reach)


def fd_batch(o, X, step: float | None = None):
    """Central-difference gradients and Hessians at many points with one oracle call.

    Returns ``(grad, hess, ok)``; rows whose stencil leaves the domain are
    ``nan`` and flagged in ``ok``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    s = o.step if step is None else float(step)
    offs = np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1],
                     [1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float) * s
    ok = _stencil_ok(o, X, s)
    grad = np.full((len(X), 2), np.nan)
    hess = np.full((len(X), 2, 2), np.nan)
    if ok.any():
        Y = X[ok]
        v = o.values((Y[:, None, :] + offs[None]).reshape(-1, 2)).reshape(len(Y), 9)
        grad[ok] = np.stack([v[:, 1] - v[:, 2], v[:, 3] - v[:, 4]], axis=1) / (2 * s)
        gxx = (v[:, 1] - 2 * v[:, 0] + v[:, 2]) / s**2
        gyy = (v[:, 3] - 2 * v[:, 0] + v[:, 4]) / s**2
        gxy = (v[:, 5] - v[:, 6] - v[:, 7] + v[:, 8]) / (4 * s**2)
        hess[ok] = np.stack([np.stack([gxx, gxy], -1), np.stack([gxy, gyy], -1)], -2)
    return grad, hess, ok


# ---------------------------------------------------------------------------
# chord lengths


@dataclass
class ChordLengthDistribution:
    """``F(r)``: measure of lines parallel to ``u`` whose chord in ``K`` exceeds ``r``."""

    u: np.ndarray
    r: np.ndarray
    F: np.ndarray
    width: float
    step: float
    noise: float = 0.0

    def is_monotone(self, tol: float | None = None) -> bool:
        """Non-increasing up to ``tol`` (default: the rounding noise of the quotient)."""
        tol = self.noise if tol is None else tol
        order = np.argsort(self.r)
        return bool(np.all(np.diff(self.F[order]) <= tol))


def chord_length_cdf(K: ConvexBody, u, rs, step: float | None = None) -> ChordLengthDistribution:
    """Chord-length tail measure ``F(r) = -d/dr g_K(r u)``.

    Uses the forward quotient ``(g(r) - g(r + s)) / s``, which is the mean of
    ``F`` over ``[r, r + s]``: it keeps ``F`` non-increasing and returns the
    perpendicular width at ``r = 0``, where ``g`` has a kink.
    """
    u = as_vec(u, "u")
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise PreconditionError("direction must be a unit vector")
    rs = np.asarray(rs, dtype=float).ravel()
    if np.any(rs < 0):
        raise PreconditionError("chord lengths must be non-negative")
    s = 1e-6 * body_scale(K) if step is None else float(step)
    pts = np.vstack([rs[:, None] * u, (rs + s)[:, None] * u])
    g = covariogram_values(K, pts)
    F = np.maximum((g[: len(rs)] - g[len(rs):]) / s, 0.0)
    theta = math.atan2(u[1], u[0]) + 0.5 * math.pi
    width = float(K.support(theta) + K.support(theta + math.pi))
    # two values of size <= area, each rounded, divided by s
    noise = 16.0 * np.finfo(float).eps * covariogram_value(K, np.zeros(2)) / s
    return ChordLengthDistribution(u, rs, F, width, s, float(noise))


# ---------------------------------------------------------------------------
# discrete autocorrelation


@dataclass
class ConvolutionReport:
    n: int
    pixel: float
    spectral_vs_direct: float
    direct_vs_exact: float
    exact_tolerance: float
    autocorrelation: np.ndarray = field(repr=False)

    @property
    def maxerr(self) -> float:
        return max(self.spectral_vs_direct, self.direct_vs_exact)


def rasterize(K: ConvexBody, n: int, half: float | None = None) -> tuple[np.ndarray, float]:
    """Indicator of ``K`` at the centres of an ``n x n`` pixel grid symmetric about o."""
    if half is None:
        if isinstance(K, ConvexPolygon):
            half = float(np.abs(K.vertices).max())
        else:
            ang = np.arange(4) * 0.5 * math.pi
            half = float(K.support(ang).max())
        half *= 1.01
    pix = 2.0 * half / n
    c = (np.arange(n) - 0.5 * (n - 1)) * pix
    X, Y = np.meshgrid(c, c, indexing="ij")
    mask = K.contains(np.stack([X.ravel(), Y.ravel()], axis=1)).reshape(n, n)
    return mask, pix


def direct_autocorrelation(mask: np.ndarray) -> np.ndarray:
    """Count ``#(M ∩ (M + s))`` for every shift, exploiting one run per row.

    Entry ``[n - 1 + di, n - 1 + dj]`` holds the count for shift ``(di, dj)``.
    """
    n = mask.shape[0]
    rows = np.flatnonzero(mask.any(axis=1))
    if len(rows) == 0:
        return np.zeros((2 * n - 1, 2 * n - 1))
    lo = np.full(n, 0, dtype=np.int64)
    hi = np.full(n, -1, dtype=np.int64)
    for i in rows:
        cols = np.flatnonzero(mask[i])
        if len(cols) != cols[-1] - cols[0] + 1:
            raise PreconditionError("direct autocorrelation needs one run per row (convex mask)")
        lo[i], hi[i] = cols[0], cols[-1]
    out = np.zeros((2 * n - 1, 2 * n - 1))
    dj = np.arange(-(n - 1), n)
    for di in range(-(n - 1), n):
        a = np.arange(max(0, di), min(n, n + di))
        b = a - di
        valid = (hi[a] >= lo[a]) & (hi[b] >= lo[b])
        if not valid.any():
            continue
        a, b = a[valid], b[valid]
        top = np.minimum(hi[a][:, None], hi[b][:, None] + dj)
        bot = np.maximum(lo[a][:, None], lo[b][:, None] + dj)
        out[n - 1 + di] = np.maximum(top - bot + 1, 0).sum(axis=0)
    return out


def spectral_autocorrelation(mask: np.ndarray) -> np.ndarray:
    """Autocorrelation as the inverse transform of ``|F(mask)|^2``."""
    n = mask.shape[0]
    F = np.fft.rfft2(mask.astype(float), s=(2 * n, 2 * n))
    ac = np.fft.irfft2(F * np.conj(F), s=(2 * n, 2 * n))
    ac = np.fft.fftshift(ac)
    return ac[1:, 1:]


def convolution_check(K: ConvexBody, n: int, n_exact: int = 41) -> ConvolutionReport:
    """Rasterised autocorrelation: direct vs spectral, and against the exact ``g``."""
    if n < 128 or n & (n - 1):
        raise PreconditionError("convolution_check needs n a power of two, n >= 128")
    mask, pix = rasterize(K, n)
    direct = direct_autocorrelation(mask)
    spectral = spectral_autocorrelation(mask)
    spec_err = float(np.abs(direct - spectral).max())
    # subsample shifts inside the support for the comparison with exact values
    shifts = np.linspace(-(n - 1), n - 1, n_exact).round().astype(int)
    I, J = np.meshgrid(shifts, shifts, indexing="ij")
    S = np.stack([I.ravel(), J.ravel()], axis=1)
    g = covariogram_values(K, S * pix)
    counts = direct[S[:, 0] + n - 1, S[:, 1] + n - 1] * pix * pix
    exact_err = float(np.abs(counts - g).max())
    perimeter = _perimeter(K)
    return ConvolutionReport(n, pix, spec_err, exact_err, 4.0 * perimeter * pix, direct)


def _perimeter(K: ConvexBody) -> float:
    if isinstance(K, ConvexPolygon):
        return float(np.linalg.norm(K.edges, axis=1).sum())
    theta = np.arange(4096) * (TWO_PI / 4096)
    return float(K.support(theta).mean() * TWO_PI)
