"""Covariogram oracles: the only view of a body that the uniqueness machinery gets.

An oracle answers ``g(x)`` for batches of points and knows the support of
``g`` (the difference body ``DK``).  Derivatives are always finite
differences over the oracle values so analytic and grid backings are
interchangeable.
"""

from __future__ import annotations

import logging
import math
from functools import cached_property

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.stats import qmc

from .covariogram import CovariogramGrid, covariogram_values, fd_gradient, fd_hessian
from .errors import PreconditionError
from .geometry import (
    R,
    ConvexBody,
    ConvexPolygon,
    as_vec,
    difference_body_cached,
    inner_signed_distance,
)

log = logging.getLogger(__name__)

SAMPLING_MARGIN = 0.02
RADIAL_WINDOW = 8


class CovariogramOracle:
    """Base class; subclasses set ``dk``, ``scale``, ``step`` and implement ``values``."""

    dk: ConvexBody
    scale: float
    step: float
    kind: str = "oracle"
    # extra radius excised around o on top of the sampling margin
    core_radius: float = 0.0

    def values(self, X) -> np.ndarray:
        raise NotImplementedError

    def value(self, x) -> float:
        return float(self.values(as_vec(x, "x")[None])[0])

    @property
    def area(self) -> float:
        return self.value(np.zeros(2))

    def dk_signed_distance(self, X) -> np.ndarray:
        """Signed distance to ``bd DK``; exact inside, sign-only outside."""
        return inner_signed_distance(self.dk, np.atleast_2d(X))

    def gradient(self, x) -> np.ndarray:
        return fd_gradient(self, x)

    def hessian(self, x) -> np.ndarray:
        return fd_hessian(self, x)

    def gradient_extrapolated(self, x) -> np.ndarray:
        """Fourth-order gradient from the step and double-step central differences."""
        return (4.0 * fd_gradient(self, x) - fd_gradient(self, x, 2.0 * self.step)) / 3.0

    def hessian_extrapolated(self, x) -> tuple[np.ndarray, float]:
        """Richardson combination of the step and double-step Hessians.

        Returns the extrapolated matrix and the size of the correction, an
        error estimate for the plain :meth:`hessian`.
        """
        H1 = fd_hessian(self, x)
        H2 = fd_hessian(self, x, 2.0 * self.step)
        H = (4.0 * H1 - H2) / 3.0
        return H, float(np.abs(H - H1).max())

    def D(self, x) -> np.ndarray:
        """``D(x) = R^{-1} grad g(x)``."""
        return -R @ self.gradient(x)

    def in_domain(self, X, margin: float = SAMPLING_MARGIN) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        m = margin * self.scale
        r = max(m, self.core_radius)
        return (self.dk_signed_distance(X) < -m) & (np.linalg.norm(X, axis=1) > r)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        ang = np.array([0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi])
        h = self.dk.support(ang)
        return np.array([-h[2], -h[3]]), np.array([h[0], h[1]])


class AnalyticOracle(CovariogramOracle):
    """Oracle backed by an exact body."""

    kind = "analytic"

    def __init__(self, body: ConvexBody, step: float | None = None):
        self.body = body
        self.dk = difference_body_cached(body)
        self.scale = self.dk.scale if isinstance(self.dk, ConvexPolygon) else self.dk.diameter
        self.step = 1e-4 * self.scale if step is None else float(step)

    def values(self, X) -> np.ndarray:
        return covariogram_values(self.body, np.atleast_2d(np.asarray(X, dtype=float)))


class GridOracle(CovariogramOracle):
    """Oracle backed by sampled values and a bicubic interpolating spline.

    The support of ``g`` is recovered from the samples alone (see
    :func:`grid_support_polygon`); the interpolant is clamped to zero outside
    it.
    """

    kind = "grid"

    def __init__(self, grid: CovariogramGrid, step: float | None = None):
        self.grid = grid
        self.spline = RectBivariateSpline(grid.axis, grid.yaxis, grid.values, kx=3, ky=3, s=0)
        self.dk = grid_support_polygon(grid)
        self.scale = self.dk.scale
        self.step = 2.0 * grid.spacing if step is None else float(step)
        # g has a cone at o that the spline rounds off over a few dozen cells
        self.core_radius = 32.0 * grid.spacing
        self.interpolation_error = self._interpolation_error()

    @cached_property
    def _radial_edges(self):
        v = self.dk.vertices
        ang = np.arctan2(v[:, 1], v[:, 0])
        start = int(np.argmin(ang))
        order = np.roll(np.arange(len(v)), -start)
        return ang[order], order

    def dk_signed_distance(self, X) -> np.ndarray:
        """Edge-line distance over the few edges facing ``X`` as seen from o.

        o lies inside ``DK``, so the edge crossed by the ray from o through a
        point is found by bisection on polar angle.  The sign is exact; inside,
        the value is the true distance unless the nearest edge is more than
        ``RADIAL_WINDOW`` edges away, which for the dense grid polygon only
        happens deep inside where the value is not used.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ang, order = self._radial_edges
        m = len(order)
        after = order[np.searchsorted(ang, np.arctan2(X[:, 1], X[:, 0])) % m]
        k = (after[:, None] - 1 + np.arange(-RADIAL_WINDOW, RADIAL_WINDOW + 1)) % m
        n, c = self.dk._edge_lines
        return (np.einsum("nkj,nj->nk", n[k], X) - c[k]).max(axis=1)

    def values(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        v = self.spline.ev(X[:, 0], X[:, 1])
        inside = self.dk_signed_distance(X) < 0.0
        return np.where(inside, np.maximum(v, 0.0), 0.0)

    def _interpolation_error(self) -> float:
        """Leave-one-out style estimate: spline on the even subgrid vs the odd samples."""
        g = self.grid
        if g.n < 64:
            return float("nan")
        sub = RectBivariateSpline(g.axis[::2], g.yaxis[::2], g.values[::2, ::2], kx=3, ky=3, s=0)
        # every other odd sample is plenty for a maximum over a smooth error
        pts = g.points().reshape(g.n, g.n, 2)[1:-1:4, 1:-1:4].reshape(-1, 2)
        vals = g.values[1:-1:4, 1:-1:4].ravel()
        keep = self.in_domain(pts)
        if not keep.any():
            return float("nan")
        est = sub.ev(pts[keep, 0], pts[keep, 1])
        # the subgrid spacing is doubled, so scale the cubic error down by 2^4
        return float(np.abs(est - vals[keep]).max() / 16.0)


_EXPONENTS = np.linspace(1.0, 2.0, 41)


def _fit_crossing(t: np.ndarray, g: np.ndarray, lo: float, hi: float) -> float:
    """Zero of ``g ~ c (t* - t)^a`` fitted to the samples, clipped to ``[lo, hi]``."""
    # for each exponent, s = g^(1/a) is linear in t; fit all lines at once
    s = g[None, :] ** (1.0 / _EXPONENTS[:, None])
    tc = t - t.mean()
    sm = s.mean(axis=1)
    slope = (s - sm[:, None]) @ tc / (tc @ tc)
    resid = np.linalg.norm(s - sm[:, None] - slope[:, None] * tc, axis=1) / np.linalg.norm(s, axis=1)
    resid = np.where(slope < 0, resid, np.inf)
    k = int(np.argmin(resid))
    if not np.isfinite(resid[k]):
        return lo
    root = t.mean() - sm[k] / slope[k]
    return float(np.clip(root, lo, hi))


def _line_crossings(axis: np.ndarray, values: np.ndarray, fit: int = 4) -> list[tuple[int, float]]:
    """Outer crossings of each row of ``values``: list of (row, coordinate)."""
    out = []
    for j, row in enumerate(values):
        pos = np.flatnonzero(row > 0)
        if len(pos) < fit + 1:
            continue
        k = pos[-1]
        if k + 1 < len(row):
            sl = slice(k - fit + 1, k + 1)
            out.append((j, _fit_crossing(axis[sl], row[sl], axis[k], axis[k + 1]), +1))
        k = pos[0]
        if k > 0:
            sl = slice(k, k + fit)
            # mirror the coordinate so the fitted profile again decreases towards the edge
            out.append((j, -_fit_crossing(-axis[sl][::-1], row[sl][::-1], -axis[k], -axis[k - 1]), -1))
    return out


def _steep(crossings, spacing):
    """Keep crossings where the boundary meets the scan lines at less than 45 degrees."""
    by_side = {}
    for j, c, side in crossings:
        by_side.setdefault(side, {})[j] = c
    keep = []
    for side, d in by_side.items():
        for j, c in d.items():
            nbrs = [d[k] for k in (j - 1, j + 1) if k in d]
            if len(nbrs) == 2 and all(abs(c - v) <= spacing for v in nbrs):
                keep.append((j, c))
    return keep


def grid_support_polygon(grid: CovariogramGrid) -> ConvexPolygon:
    """Polygon approximating ``supp g`` from grid samples.

    Along every row and column the last positive samples are fitted with a
    power law that vanishes at the boundary; crossings met at a shallow angle
    are discarded and the convex hull of the rest is returned.
    """
    v = grid.values
    ax, ay = grid.axis, grid.yaxis
    pts = []
    for j, c in _steep(_line_crossings(ax, v.T), grid.spacing):
        pts.append((c, ay[j]))
    for i, c in _steep(_line_crossings(ay, v), grid.spacing):
        pts.append((ax[i], c))
    if len(pts) < 8:
        raise PreconditionError("grid has too few boundary crossings to recover the support")
    return ConvexPolygon.from_points(np.array(pts))


def sample_domain(o: CovariogramOracle, n: int, seed: int = 0,
                  margin: float = SAMPLING_MARGIN) -> np.ndarray:
    """``n`` quasi-random points of ``int DK`` shrunk by ``margin * diam`` minus a disk at o."""
    if n <= 0:
        return np.empty((0, 2))
    lo, hi = o.bbox()
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    out = []
    count = 0
    while count < n:
        batch = qmc.scale(sampler.random(max(4 * n, 64)), lo, hi)
        keep = batch[o.in_domain(batch, margin)]
        out.append(keep)
        count += len(keep)
    return np.vstack(out)[:n]


def make_oracle(source, **kw) -> CovariogramOracle:
    if isinstance(source, CovariogramOracle):
        return source
    if isinstance(source, CovariogramGrid):
        return GridOracle(source, **kw)
    return AnalyticOracle(source, **kw)
