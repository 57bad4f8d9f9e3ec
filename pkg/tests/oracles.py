"""Independent reference computations used by the tests.

Nothing here calls into the package's covariogram or parallelogram code; the
bodies are handled through their vertex lists, support coefficients or
closed-form descriptions.
"""

from __future__ import annotations

import math

import numpy as np


# closed forms -------------------------------------------------------------


def square_cov(x):
    """Covariogram of the unit square."""
    x = np.atleast_2d(x)
    return np.clip(1 - np.abs(x[:, 0]), 0, None) * np.clip(1 - np.abs(x[:, 1]), 0, None)


def disk_cov(r, radius=1.0):
    """Covariogram of a disk at distance ``r``: lens area of two overlapping disks."""
    r = np.abs(np.asarray(r, dtype=float))
    d = np.minimum(r / (2 * radius), 1.0)
    return 2 * radius**2 * (np.arccos(d) - d * np.sqrt(1 - d * d))


def disk_cov_grad(x):
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    # d/dr [2 acos(r/2) - r sqrt(1 - r^2/4)] = -2 sqrt(1 - r^2/4)
    return -2 * math.sqrt(1 - r * r / 4) * x / r


def ellipse_cov(x, a, b):
    """An ellipse is a linear image of the unit disk: ``g(x) = ab g_disk(|A^-1 x|)``."""
    x = np.atleast_2d(x)
    return a * b * disk_cov(np.hypot(x[:, 0] / a, x[:, 1] / b))


def trig_area(a0, cos=(), sin=()):
    """``(1/2) int (h^2 - h'^2)`` by Parseval."""
    s = sum((1 - k * k) * (a * a + b * b)
            for k, (a, b) in enumerate(zip(_pad(cos, sin), _pad(sin, cos)), start=1))
    return math.pi * (a0 * a0 + 0.5 * s)


def _pad(a, b):
    return list(a) + [0.0] * (max(len(a), len(b)) - len(a))


def trig_point(theta, a0, cos=(), sin=()):
    """Boundary point with outward normal angle ``theta`` from the support series."""
    theta = np.asarray(theta, dtype=float)
    h = np.full(theta.shape, float(a0))
    dh = np.zeros(theta.shape)
    for k, c in enumerate(cos, start=1):
        h += c * np.cos(k * theta)
        dh -= k * c * np.sin(k * theta)
    for k, s in enumerate(sin, start=1):
        h += s * np.sin(k * theta)
        dh += k * s * np.cos(k * theta)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    ru = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    return h[..., None] * u + dh[..., None] * ru


# rasterization ------------------------------------------------------------


def inside_polygon(vertices, pts):
    """Points strictly left of every CCW edge."""
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    rel = pts[:, None, :] - v[None, :, :]
    cross = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
    return np.all(cross >= 0, axis=1)


def raster_overlap_area(vertices, x, n=2048):
    """Area of ``P ∩ (P + x)`` by counting pixel centres on an ``n x n`` grid."""
    v = np.asarray(vertices, dtype=float)
    lo = np.minimum(v.min(axis=0), v.min(axis=0) + x)
    hi = np.maximum(v.max(axis=0), v.max(axis=0) + x)
    side = float((hi - lo).max())
    px = side / n
    c = lo[None, :] + (np.arange(n)[:, None] + 0.5) * px
    total = 0
    for row in range(0, n, 256):
        X, Y = np.meshgrid(c[:, 0], c[row:row + 256, 1], indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        total += int(np.count_nonzero(inside_polygon(v, pts) & inside_polygon(v, pts - x)))
    return total * px * px


def raster_square_disk(n=2048):
    """Area of ``[0,1]^2`` intersected with the unit disk at the origin."""
    c = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(c, c, indexing="ij")
    return np.count_nonzero(X * X + Y * Y <= 1.0) / n**2


def monte_carlo_disk_overlap(x, n=10**7, seed=1):
    """Overlap of the unit disk with its translate by ``x``; returns (estimate, sigma)."""
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    box = 4.0  # sample the square [-1, 1]^2 of area 4 containing the disk
    while done < n:
        m = min(10**6, n - done)
        p = rng.uniform(-1, 1, size=(m, 2))
        q = p - x
        hits += np.count_nonzero((np.einsum("ij,ij->i", p, p) <= 1) & (np.einsum("ij,ij->i", q, q) <= 1))
        done += m
    p_hat = hits / n
    return box * p_hat, box * math.sqrt(p_hat * (1 - p_hat) / n)


# chord sweeps -------------------------------------------------------------


def chord_lengths_polygon(vertices, u, n_lines=10_000):
    """Chord lengths of the lines parallel to ``u`` through an even sweep; returns (offsets spacing, lengths)."""
    v = np.asarray(vertices, dtype=float)
    u = np.asarray(u, dtype=float) / np.linalg.norm(u)
    w = np.array([-u[1], u[0]])
    s = v @ w
    offs = s.min() + (np.arange(n_lines) + 0.5) * (s.max() - s.min()) / n_lines
    e0, e1 = v, np.roll(v, -1, axis=0)
    lengths = np.empty(n_lines)
    for i, c in enumerate(offs):
        a0, a1 = e0 @ w - c, e1 @ w - c
        cross = (a0 <= 0) != (a1 <= 0)
        t = a0[cross] / (a0[cross] - a1[cross])
        p = e0[cross] + t[:, None] * (e1[cross] - e0[cross])
        proj = p @ u
        lengths[i] = proj.max() - proj.min() if len(proj) >= 2 else 0.0
    return (s.max() - s.min()) / n_lines, lengths


def chord_lengths_disk(radius=1.0, n_lines=10_000):
    offs = -radius + (np.arange(n_lines) + 0.5) * 2 * radius / n_lines
    return 2 * radius / n_lines, 2 * np.sqrt(np.clip(radius**2 - offs**2, 0, None))


def sweep_tail(spacing, lengths, rs):
    """``F(r)`` = measure of swept lines whose chord is longer than ``r``."""
    lengths = np.sort(lengths)
    rs = np.asarray(rs, dtype=float)
    return spacing * (len(lengths) - np.searchsorted(lengths, rs, side="right"))


# geometry helpers ---------------------------------------------------------


def hausdorff_points(A, B):
    from scipy.spatial import cKDTree

    return max(cKDTree(B).query(A)[0].max(), cKDTree(A).query(B)[0].max())


def dense_support_boundary(a0, cos=(), sin=(), n=20000):
    theta = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return trig_point(theta, a0, cos, sin)
