"""Planar primitives and the two convex body representations.

Vectors are plain ``numpy`` arrays of shape ``(2,)`` (or ``(..., 2)`` for
batches) and 2x2 matrices are ``(2, 2)`` arrays.  ``R`` is the fixed
counterclockwise quarter-turn.

Bodies come in two flavours:

* :class:`ConvexPolygon`: counterclockwise vertex list, used for exact
  covariogram evaluation and as a harness fixture.
* :class:`SupportBody`: a strictly convex C^1 body given by its support
  function ``h(theta)``.  The boundary point with outward normal
  ``u(theta) = (cos theta, sin theta)`` is ``h u + h' R u``.  Concrete
  subclasses are :class:`TrigSupportBody` (finite trigonometric series) and
  :class:`EllipseBody`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .errors import PreconditionError

R = np.array([[0.0, -1.0], [1.0, 0.0]])
R.setflags(write=False)
TWO_PI = 2.0 * math.pi

# h + h'' must stay above this on the validation grid.
CURVATURE_RADIUS_FLOOR = 1e-6
VALIDATION_GRID = 4096
COLLINEAR_TOL = 1e-12


def as_vec(v, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a finite float array of shape ``(2,)``."""
    arr = np.asarray(v, dtype=float)
    if arr.shape != (2,):
        raise PreconditionError(f"{name} must have two components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} has non-finite components: {arr}")
    return arr


def det2(a, b):
    """``det [a b] = a.x b.y - a.y b.x``; broadcasts over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def rot90(v):
    """Apply ``R`` to a vector or a stack of vectors."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def unit(theta):
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def canonical_angle(theta):
    """Map angles to ``[0, 2 pi)``."""
    return np.mod(theta, TWO_PI)


def angle_of(v) -> float:
    v = np.asarray(v, dtype=float)
    return math.atan2(v[1], v[0])


def ccw_span(start, end):
    """Counterclockwise angular distance from ``start`` to ``end`` in ``[0, 2 pi)``."""
    return np.mod(np.asarray(end) - np.asarray(start), TWO_PI)


def polygon_signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _coalesce(vertices: np.ndarray, tol: float = COLLINEAR_TOL) -> np.ndarray:
    """Drop repeated and collinear vertices from a closed CCW polyline."""
    v = np.asarray(vertices, dtype=float)
    if len(v) == 0:
        return v.reshape(0, 2)
    scale = max(float(np.abs(v).max()), 1.0)
    changed = True
    while changed and len(v) >= 3:
        changed = False
        step = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        keep = step > tol * scale
        if not keep.all():
            v = v[keep]
            changed = True
            continue
        e_in = v - np.roll(v, 1, axis=0)
        e_out = np.roll(v, -1, axis=0) - v
        turn = det2(e_in, e_out)
        norms = np.linalg.norm(e_in, axis=1) * np.linalg.norm(e_out, axis=1)
        keep = turn > tol * norms
        if not keep.all():
            # drop one offender at a time so a thin sliver is not erased wholesale
            bad = np.flatnonzero(~keep)[0]
            v = np.delete(v, bad, axis=0)
            changed = True
    return v


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex polygon with counterclockwise, strictly convex vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise PreconditionError("polygon vertices must be an (n, 2) array")
        if len(v) < 3:
            raise PreconditionError("a polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise PreconditionError("polygon vertices must be finite")
        edges = np.roll(v, -1, axis=0) - v
        if np.any(np.linalg.norm(edges, axis=1) == 0.0):
            raise PreconditionError("polygon has repeated vertices")
        turns = det2(edges, np.roll(edges, -1, axis=0))
        if np.any(turns <= 0.0):
            raise PreconditionError("polygon is not strictly convex and counterclockwise")
        if polygon_signed_area(v) <= 0.0:
            raise PreconditionError("polygon area must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, points) -> "ConvexPolygon":
        """Convex hull of a point cloud, collinear points removed."""
        from scipy.spatial import ConvexHull

        pts = np.asarray(points, dtype=float)
        hull = ConvexHull(pts)
        return cls(_coalesce(pts[hull.vertices]))

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def area(self) -> float:
        return polygon_signed_area(self.vertices)

    @cached_property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = det2(v, w)
        return ((v + w) * cross[:, None]).sum(axis=0) / (6.0 * self.area)

    @property
    def scale(self) -> float:
        return float(np.ptp(self.vertices, axis=0).max())

    def support(self, theta):
        """Support function at normal angle(s) ``theta``."""
        return np.max(unit(theta) @ self.vertices.T, axis=-1)

    def translate(self, t) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + as_vec(t, "translation"))

    def reflect(self, c=(0.0, 0.0)) -> "ConvexPolygon":
        # a point reflection is a half turn, so the vertex order stays CCW
        return ConvexPolygon(2.0 * as_vec(c, "center") - self.vertices)

    def scaled(self, s: float) -> "ConvexPolygon":
        if not s > 0:
            raise PreconditionError("scale factor must be positive")
        return ConvexPolygon(self.vertices * float(s))

    def difference_body(self) -> "ConvexPolygon":
        return minkowski_sum(self, self.reflect())

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        return self.signed_distance(points, exact_outside=tol > 0) <= tol

    @cached_property
    def _edge_lines(self):
        e = self.edges
        n = -rot90(e) / np.linalg.norm(e, axis=1)[:, None]
        return n, np.einsum("ij,ij->i", n, self.vertices)

    def signed_distance(self, points, exact_outside: bool = True) -> np.ndarray:
        """Euclidean distance to the boundary, negative inside.

        With ``exact_outside=False`` points outside get a cheap lower bound
        (the largest edge-line distance) that keeps the sign.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n, c = self._edge_lines
        out = np.empty(len(pts))
        for lo in range(0, len(pts), 4096):
            # inside a convex polygon the distance to the nearest edge line is exact
            out[lo:lo + 4096] = (pts[lo:lo + 4096] @ n.T - c).max(axis=1)
        outside = np.flatnonzero(out > 0)
        if len(outside) and exact_outside:
            out[outside] = self._outside_distance(pts[outside])
        return out

    def _outside_distance(self, pts):
        v, e = self.vertices, self.edges
        elen2 = np.einsum("ij,ij->i", e, e)
        out = np.empty(len(pts))
        for lo in range(0, len(pts), 1024):
            rel = pts[lo:lo + 1024, None, :] - v[None, :, :]
            t = np.clip(np.einsum("nij,ij->ni", rel, e) / elen2, 0.0, 1.0)
            out[lo:lo + 1024] = np.linalg.norm(rel - t[..., None] * e[None], axis=2).min(axis=1)
        return out

    def to_json(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


def minkowski_sum(A: ConvexPolygon, B: ConvexPolygon) -> ConvexPolygon:
    """Minkowski sum by merging the edge sequences in angular order."""

    def lowest_first(v):
        i = np.lexsort((v[:, 0], v[:, 1]))[0]
        return np.roll(v, -i, axis=0)

    a = lowest_first(A.vertices)
    b = lowest_first(B.vertices)
    edges = np.vstack([np.roll(a, -1, axis=0) - a, np.roll(b, -1, axis=0) - b])
    ang = np.mod(np.arctan2(edges[:, 1], edges[:, 0]), TWO_PI)
    # a bottom-left start means every edge angle lies in [0, 2 pi); tiny negative
    # angles from round-off would otherwise wrap to the end
    ang[ang > TWO_PI - 1e-12] = 0.0
    order = np.argsort(ang, kind="stable")
    pts = a[0] + b[0] + np.vstack([np.zeros(2), np.cumsum(edges[order], axis=0)[:-1]])
    return ConvexPolygon(_coalesce(pts))


def _clip_halfplane(poly: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Keep the part of ``poly`` on the left of the directed line a -> b."""
    d = b - a
    s = d[0] * (poly[:, 1] - a[1]) - d[1] * (poly[:, 0] - a[0])
    inside = s >= 0.0
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    prev = np.roll(poly, 1, axis=0)
    s_prev = np.roll(s, 1)
    crossing = inside != np.roll(inside, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(crossing, s_prev / (s_prev - s), 0.0)
    hits = prev + t[:, None] * (poly - prev)
    pts = np.stack([hits, poly], axis=1)
    mask = np.stack([crossing, inside], axis=1)
    return pts[mask]


def convex_intersection(A: ConvexPolygon, B: ConvexPolygon) -> ConvexPolygon | None:
    """Intersection of two convex polygons, ``None`` when it has no interior."""
    poly = A.vertices
    bv = B.vertices
    nb = len(bv)
    # cheap rejection on bounding boxes
    if (poly[:, 0].max() <= bv[:, 0].min() or bv[:, 0].max() <= poly[:, 0].min()
            or poly[:, 1].max() <= bv[:, 1].min() or bv[:, 1].max() <= poly[:, 1].min()):
        return None
    for i in range(nb):
        poly = _clip_halfplane(poly, bv[i], bv[(i + 1) % nb])
        if len(poly) < 3:
            return None
    poly = _coalesce(poly)
    if len(poly) < 3:
        return None
    scale = max(A.scale, B.scale)
    if polygon_signed_area(poly) <= 1e-14 * scale * scale:
        return None
    return ConvexPolygon(poly)


def polygon_area(P: ConvexPolygon) -> float:
    return P.area


class SupportBody(ABC):
    """Strictly convex C^1 body parametrised by its support function.

    Subclasses provide ``h_derivs`` and ``arc_integral``; everything else is
    derived here.
    """

    precision: float = 1e-9

    @abstractmethod
    def h_derivs(self, theta) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(h, h', h'')`` at ``theta``."""

    @abstractmethod
    def arc_integral(self, theta_a, theta_b):
        """``int det(p, p') dtheta`` from ``theta_a`` to ``theta_b`` (twice the swept area)."""

    @abstractmethod
    def translate(self, t) -> "SupportBody": ...

    @abstractmethod
    def reflect(self, c=(0.0, 0.0)) -> "SupportBody": ...

    @abstractmethod
    def scaled(self, s: float) -> "SupportBody": ...

    @abstractmethod
    def difference_body(self) -> "SupportBody": ...

    @abstractmethod
    def to_json(self) -> dict: ...

    def _validate(self):
        theta = np.arange(VALIDATION_GRID) * (TWO_PI / VALIDATION_GRID)
        h, _, h2 = self.h_derivs(theta)
        if not np.all(np.isfinite(h)):
            raise PreconditionError("support function is not finite")
        rho = h + h2
        if rho.min() < CURVATURE_RADIUS_FLOOR:
            i = int(np.argmin(rho))
            raise PreconditionError(
                f"h + h'' = {rho[i]:.3g} at theta = {theta[i]:.4f}; body is not strictly convex"
            )

    def support(self, theta):
        return self.h_derivs(theta)[0]

    def curvature_radius(self, theta):
        h, _, h2 = self.h_derivs(theta)
        return h + h2

    def point(self, theta):
        """Boundary point(s) with outward normal ``u(theta)``."""
        h, h1, _ = self.h_derivs(theta)
        u = unit(theta)
        return h[..., None] * u + h1[..., None] * rot90(u)

    def tangent(self, theta):
        """Derivative of :meth:`point` with respect to ``theta``."""
        return self.curvature_radius(theta)[..., None] * rot90(unit(theta))

    @cached_property
    def area(self) -> float:
        return 0.5 * float(self.arc_integral(0.0, TWO_PI))

    @cached_property
    def centroid(self) -> np.ndarray:
        n = 8192
        theta = np.arange(n) * (TWO_PI / n)
        p = self.point(theta)
        w = det2(p, self.tangent(theta))
        # periodic trapezoid rule: spectrally accurate for smooth integrands
        return (p * w[:, None]).sum(axis=0) * (TWO_PI / n) / (3.0 * self.area)

    @cached_property
    def diameter(self) -> float:
        """Width of the body maximised over directions."""
        theta = np.arange(2048) * (math.pi / 2048)
        return float(np.max(self.support(theta) + self.support(theta + math.pi)))

    def signed_distance(self, points, return_angle: bool = False):
        """Signed distance to the boundary, negative inside.

        Uses ``max_phi <w, u(phi)> - h(phi)``, exact for convex bodies.  With
        ``return_angle`` the maximising normal angle is returned too; for a
        boundary point that is the angle of its outward normal.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        phi, U, H = self._scan_table
        m = len(phi)
        dist = np.empty(len(pts))
        ang = np.empty(len(pts))
        for lo in range(0, len(pts), 4096):
            w = pts[lo:lo + 4096]
            vals = w @ U.T - H
            j = np.argmax(vals, axis=1)
            best = vals[np.arange(len(w)), j]
            th = phi[j]
            for _ in range(8):
                h, h1, h2 = self.h_derivs(th)
                u = unit(th)
                d1 = np.einsum("ij,ij->i", w, rot90(u)) - h1
                d2 = -np.einsum("ij,ij->i", w, u) - h2
                step = np.where(d2 < 0.0, -d1 / np.where(d2 < 0.0, d2, -1.0), 0.0)
                th = th + np.clip(step, -TWO_PI / m, TWO_PI / m)
                if np.abs(step).max() < 1e-15:
                    break
            refined = np.einsum("ij,ij->i", w, unit(th)) - self.support(th)
            use = refined >= best
            dist[lo:lo + 4096] = np.where(use, refined, best)
            ang[lo:lo + 4096] = canonical_angle(np.where(use, th, phi[j]))
        if return_angle:
            return dist, ang
        return dist

    @cached_property
    def _scan_table(self):
        phi = np.arange(720) * (TWO_PI / 720)
        return phi, unit(phi), self.support(phi)

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        return self.signed_distance(points) <= tol

    def normal_angle_at(self, point) -> float:
        """Outward normal angle at a (near-)boundary point."""
        _, ang = self.signed_distance(as_vec(point, "point"), return_angle=True)
        return float(ang[0])


def _trig_tuple(values) -> tuple[float, ...]:
    return tuple(float(x) for x in values)


@dataclass(frozen=True)
class TrigSupportBody(SupportBody):
    """``h(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta)``.

    ``cos[k-1]`` and ``sin[k-1]`` hold ``a_k`` and ``b_k``.
    """

    a0: float
    cos: tuple = ()
    sin: tuple = ()
    precision: float = 1e-9

    def __post_init__(self):
        a = list(_trig_tuple(self.cos))
        b = list(_trig_tuple(self.sin))
        n = max(len(a), len(b))
        a += [0.0] * (n - len(a))
        b += [0.0] * (n - len(b))
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "cos", tuple(a))
        object.__setattr__(self, "sin", tuple(b))
        if not all(math.isfinite(c) for c in (self.a0, *a, *b)):
            raise PreconditionError("support coefficients must be finite")
        if not self.precision > 0:
            raise PreconditionError("evaluation precision must be positive")
        self._validate()

    @property
    def degree(self) -> int:
        return len(self.cos)

    @cached_property
    def _arrays(self):
        k = np.arange(1, self.degree + 1, dtype=float)
        return k, np.array(self.cos), np.array(self.sin)

    @cached_property
    def _deriv_matrix(self):
        # h^(j) = Re sum_k (ik)^j c_k e^{ik theta} with c_k = a_k - i b_k
        k, a, b = self._arrays
        c = a - 1j * b
        return np.stack([c, 1j * k * c, -k * k * c], axis=1)

    def h_derivs(self, theta):
        return self.h_derivs_unit(theta)[:3]

    def h_derivs_unit(self, theta):
        """``(h, h', h'', u(theta))`` sharing one complex exponential."""
        theta = np.asarray(theta, dtype=float)
        e = np.exp(1j * theta)
        u = np.stack([e.real, e.imag], axis=-1)
        n = self.degree
        if n == 0:
            h = np.full(theta.shape, self.a0)
            return h, np.zeros(theta.shape), np.zeros(theta.shape), u
        # powers of e^{i theta} by repeated products instead of 2n trig calls
        E = np.cumprod(np.broadcast_to(e[..., None], theta.shape + (n,)), axis=-1)
        M = (E @ self._deriv_matrix).real
        return self.a0 + M[..., 0], M[..., 1], M[..., 2], u

    @cached_property
    def _antiderivative_coeffs(self):
        # complex form h = sum c_k e^{ik theta}; h^2 - h'^2 = sum_m d_m e^{im theta}
        n = self.degree
        ks = np.arange(-n, n + 1)
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n] = self.a0
        for k in range(1, n + 1):
            c[n + k] = 0.5 * (self.cos[k - 1] - 1j * self.sin[k - 1])
            c[n - k] = np.conj(c[n + k])
        ms = np.arange(-2 * n, 2 * n + 1)
        d = np.zeros(len(ms), dtype=complex)
        for i, j in enumerate(ks):
            for l, k in enumerate(ks):
                d[j + k + 2 * n] += c[i] * c[l] * (1.0 + j * k)
        return ms, d

    def _antiderivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        ms, d = self._antiderivative_coeffs
        n = self.degree
        val = d[2 * n].real * theta
        nz = ms != 0
        if nz.any():
            e = np.exp(1j * theta[..., None] * ms[nz])
            val = val + (e @ (d[nz] / (1j * ms[nz]))).real
        h, h1, _ = self.h_derivs(theta)
        return val + h * h1

    def arc_integral(self, theta_a, theta_b):
        return self._antiderivative(theta_b) - self._antiderivative(theta_a)

    def _with(self, a0, a, b) -> "TrigSupportBody":
        return TrigSupportBody(a0, tuple(a), tuple(b), self.precision)

    def translate(self, t) -> "TrigSupportBody":
        t = as_vec(t, "translation")
        a = list(self.cos) or [0.0]
        b = list(self.sin) or [0.0]
        a[0] += t[0]
        b[0] += t[1]
        return self._with(self.a0, a, b)

    def reflect(self, c=(0.0, 0.0)) -> "TrigSupportBody":
        c = as_vec(c, "center")
        sign = [(-1.0) ** k for k in range(1, self.degree + 1)]
        a = [s * v for s, v in zip(sign, self.cos)] or [0.0]
        b = [s * v for s, v in zip(sign, self.sin)] or [0.0]
        a[0] += 2.0 * c[0]
        b[0] += 2.0 * c[1]
        return self._with(self.a0, a, b)

    def scaled(self, s: float) -> "TrigSupportBody":
        if not s > 0:
            raise PreconditionError("scale factor must be positive")
        return self._with(self.a0 * s, [s * v for v in self.cos], [s * v for v in self.sin])

    def difference_body(self) -> "TrigSupportBody":
        even = [(1.0 + (-1.0) ** k) for k in range(1, self.degree + 1)]
        return self._with(2.0 * self.a0, [e * v for e, v in zip(even, self.cos)],
                          [e * v for e, v in zip(even, self.sin)])

    def to_json(self) -> dict:
        return {"type": "support", "a0": self.a0, "cos": list(self.cos), "sin": list(self.sin)}


@dataclass(frozen=True)
class EllipseBody(SupportBody):
    """Ellipse with semi-axes ``a`` (along ``angle``) and ``b``, centred at ``center``."""

    a: float
    b: float
    angle: float = 0.0
    center: tuple = (0.0, 0.0)
    precision: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "center", tuple(float(c) for c in as_vec(self.center, "center")))
        if not (self.a > 0 and self.b > 0):
            raise PreconditionError("ellipse semi-axes must be positive")
        self._validate()

    def h_derivs(self, theta):
        theta = np.asarray(theta, dtype=float)
        s = theta - self.angle
        a2, b2 = self.a ** 2, self.b ** 2
        q = 0.5 * (a2 + b2) + 0.5 * (a2 - b2) * np.cos(2 * s)
        q1 = -(a2 - b2) * np.sin(2 * s)
        q2 = -2.0 * (a2 - b2) * np.cos(2 * s)
        root = np.sqrt(q)
        h = root
        h1 = q1 / (2 * root)
        h2 = q2 / (2 * root) - q1 * q1 / (4 * q * root)
        cx, cy = self.center
        cs, sn = np.cos(theta), np.sin(theta)
        return h + cx * cs + cy * sn, h1 - cx * sn + cy * cs, h2 - cx * cs - cy * sn

    def _anomaly(self, theta):
        s = np.asarray(theta, dtype=float) - self.angle
        raw = np.arctan2(self.b * np.sin(s), self.a * np.cos(s))
        return s + (np.mod(raw - s + math.pi, TWO_PI) - math.pi)

    def arc_integral(self, theta_a, theta_b):
        ta, tb = self._anomaly(theta_a), self._anomaly(theta_b)
        c = np.array(self.center)
        ca, sa = math.cos(self.angle), math.sin(self.angle)

        def local(t):
            x, y = self.a * np.cos(t), self.b * np.sin(t)
            return np.stack([ca * x - sa * y, sa * x + ca * y], axis=-1)

        return det2(c, local(tb) - local(ta)) + self.a * self.b * (tb - ta)

    def translate(self, t) -> "EllipseBody":
        c = np.array(self.center) + as_vec(t, "translation")
        return EllipseBody(self.a, self.b, self.angle, tuple(c), self.precision)

    def reflect(self, c=(0.0, 0.0)) -> "EllipseBody":
        center = 2.0 * as_vec(c, "center") - np.array(self.center)
        return EllipseBody(self.a, self.b, self.angle, tuple(center), self.precision)

    def scaled(self, s: float) -> "EllipseBody":
        if not s > 0:
            raise PreconditionError("scale factor must be positive")
        return EllipseBody(self.a * s, self.b * s, self.angle,
                           tuple(np.array(self.center) * s), self.precision)

    def difference_body(self) -> "EllipseBody":
        return EllipseBody(2 * self.a, 2 * self.b, self.angle, (0.0, 0.0), self.precision)

    def to_json(self) -> dict:
        return {"type": "ellipse", "a": self.a, "b": self.b, "angle": self.angle,
                "center": list(self.center)}


ConvexBody = Union[ConvexPolygon, SupportBody]


def support_eval(K: SupportBody, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Boundary point and outward unit normal at normal angle ``theta``."""
    theta = float(theta)
    return K.point(theta), unit(theta)


def polygonize(K: SupportBody, n: int = 4096) -> ConvexPolygon:
    """Inscribed polygon through the boundary points at ``n`` uniform normal angles."""
    if n < 16:
        raise PreconditionError("polygonize needs n >= 16")
    theta = np.arange(n) * (TWO_PI / n)
    return ConvexPolygon(K.point(theta))


def reflect_about(K: ConvexBody, c=(0.0, 0.0)) -> ConvexBody:
    return K.reflect(c)


def difference_body(K: ConvexBody) -> ConvexBody:
    return K.difference_body()


def signed_distance(K: ConvexBody, points) -> np.ndarray:
    return K.signed_distance(points)


def support_function(K: ConvexBody, theta) -> np.ndarray:
    return K.support(theta)


def inner_signed_distance(K: ConvexBody, points) -> np.ndarray:
    """Signed distance that is exact inside ``K`` and only sign-correct outside."""
    if isinstance(K, ConvexPolygon):
        return K.signed_distance(points, exact_outside=False)
    return K.signed_distance(points)


def body_scale(K: ConvexBody) -> float:
    return K.scale if isinstance(K, ConvexPolygon) else K.diameter


def is_affine_diameter(K: ConvexBody, q1, q2, tol: float = 1e-9) -> bool:
    """True when ``q1 - q2`` lies on the boundary of the difference body."""
    q1 = as_vec(q1, "q1")
    q2 = as_vec(q2, "q2")
    on_bd = np.abs(K.signed_distance(np.vstack([q1, q2])))
    if np.any(on_bd > tol):
        raise PreconditionError(f"points are not on the boundary (distances {on_bd.tolist()})")
    dk = difference_body_cached(K)
    return bool(abs(dk.signed_distance(q1 - q2)[0]) <= tol)


_DK_CACHE: dict = {}


def difference_body_cached(K: ConvexBody) -> ConvexBody:
    """``difference_body`` memoised per body object (bodies are immutable)."""
    key = id(K)
    hit = _DK_CACHE.get(key)
    if hit is not None and hit[0] is K:
        return hit[1]
    dk = K.difference_body()
    if len(_DK_CACHE) > 256:
        _DK_CACHE.clear()
    _DK_CACHE[key] = (K, dk)
    return dk
