"""Inscribed parallelograms, the analytic gradient and the quadrilateral Q(x, h).

For ``x`` in the punctured interior of ``DK`` the curves ``bd K`` and
``bd K + x`` cross at exactly two points ``p1`` and ``p4``.  Setting
``p2 = p1 - x`` and ``p3 = p4 - x`` gives a parallelogram inscribed in ``K``
with edge vectors ``x`` and ``D = p1 - p4``, and ``grad g_K(x) = R D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NumericalError, PreconditionError
from .geometry import (
    R,
    TWO_PI,
    SupportBody,
    as_vec,
    canonical_angle,
    ccw_span,
    det2,
    difference_body_cached,
    rot90,
    unit,
)

SCAN_SAMPLES = 256
DOMAIN_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class InscribedParallelogram:
    """Vertices ``p1..p4`` (CCW on ``bd K``) with outward normals ``u1..u4``."""

    x: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    u4: np.ndarray
    angles: tuple

    @property
    def D(self) -> np.ndarray:
        return self.p1 - self.p4

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack([self.p1, self.p2, self.p3, self.p4])

    @property
    def normals(self) -> np.ndarray:
        return np.vstack([self.u1, self.u2, self.u3, self.u4])

    @property
    def diagonal(self) -> np.ndarray:
        """``p1 - p3 = x + D``, the quantity shared by conjugate arguments."""
        return self.p1 - self.p3

    def residuals(self) -> tuple[float, float]:
        return (float(np.linalg.norm(self.p1 - self.p2 - self.x)),
                float(np.linalg.norm(self.p4 - self.p3 - self.x)))

    def positivity(self) -> np.ndarray:
        """``det(u_i, u_{i+1})`` for ``i = 1..4``; all positive for a valid labeling."""
        u = self.normals
        return det2(u, np.roll(u, -1, axis=0))

    def translate(self, t) -> "InscribedParallelogram":
        t = as_vec(t, "translation")
        return InscribedParallelogram(self.x, self.p1 + t, self.p2 + t, self.p3 + t, self.p4 + t,
                                      self.u1, self.u2, self.u3, self.u4, self.angles)

    def to_json(self) -> dict:
        return {
            "x": self.x.tolist(),
            "vertices": self.vertices.tolist(),
            "normals": self.normals.tolist(),
            "D": self.D.tolist(),
        }


@dataclass(frozen=True, eq=False)
class NormalFanQuadrilateral:
    """Quadrilateral with ``q1 = h``, ``q3 = o`` and side normals ``u1..u4``."""

    h: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray
    q4: np.ndarray

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack([self.q1, self.q2, self.q3, self.q4])

    def side_normal_residual(self, normals: np.ndarray) -> float:
        """Largest ``|<q_{i+1} - q_i, u_i>|``, zero when each side is orthogonal to its normal."""
        q = self.vertices
        sides = np.roll(q, -1, axis=0) - q
        return float(np.abs(np.einsum("ij,ij->i", sides, normals)).max())


def check_domain(K: SupportBody, x: np.ndarray, margin: float = DOMAIN_MARGIN) -> None:
    """Raise unless ``x`` is at least ``margin * diam DK`` away from ``o`` and ``bd DK``."""
    DK = difference_body_cached(K)
    scale = DK.diameter
    if np.linalg.norm(x) <= margin * scale:
        raise PreconditionError(f"x = {x.tolist()} is too close to the origin")
    sd = float(DK.signed_distance(x)[0])
    if sd >= -margin * scale:
        where = "outside" if sd > 0 else "too close to the boundary of"
        raise PreconditionError(f"x = {x.tolist()} is {where} the difference body")


def _offset(K: SupportBody, x: np.ndarray):
    def f(theta):
        return float(K.signed_distance(K.point(theta) - x)[0])
    return f


def _crossings(K: SupportBody, x: np.ndarray) -> tuple[float, float]:
    """Angles of the two crossings: ``theta4`` (f: + to -) and ``theta1`` (f: - to +)."""
    f = _offset(K, x)
    grid = np.arange(SCAN_SAMPLES) * (TWO_PI / SCAN_SAMPLES)
    vals = K.signed_distance(K.point(grid) - x)
    nxt = np.roll(vals, -1)
    down = np.flatnonzero((vals > 0) & (nxt <= 0))
    up = np.flatnonzero((vals <= 0) & (nxt > 0))
    step = TWO_PI / SCAN_SAMPLES
    if len(down) == 1 and len(up) == 1:
        i4, i1 = down[0], up[0]
        brackets = ((grid[i4], grid[i4] + step), (grid[i1], grid[i1] + step))
    elif len(down) == 0 and len(up) == 0 and vals.min() > 0:
        # the negative arc is shorter than the scan spacing: localise its minimum
        j = int(np.argmin(vals))
        lo, hi = grid[j] - step, grid[j] + step
        best = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                               options={"xatol": 1e-15})
        if not best.fun < 0:
            raise NumericalError("no crossing of bd K and bd K + x found",
                                 x=x.tolist(), min_offset=float(best.fun))
        brackets = ((lo, best.x), (best.x, hi))
    else:
        raise NumericalError("crossing scan found an unexpected sign pattern",
                             x=x.tolist(), downs=len(down), ups=len(up))
    roots = []
    for a, b in brackets:
        fa, fb = f(a), f(b)
        if fa == 0.0:
            roots.append(a)
            continue
        if fb == 0.0:
            roots.append(b)
            continue
        if fa * fb > 0:
            raise NumericalError("crossing bracket lost its sign change", x=x.tolist(),
                                 bracket=[a, b], values=[fa, fb])
        roots.append(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    return roots[0], roots[1]


def _polish_pair(K: SupportBody, ta: float, tb: float, x: np.ndarray) -> tuple[float, float]:
    """Newton on ``p(ta) - p(tb) = x`` in both angles."""
    scale = K.diameter
    for _ in range(20):
        F = K.point(ta) - K.point(tb) - x
        if np.linalg.norm(F) <= 1e-15 * scale:
            break
        J = np.column_stack([K.tangent(ta), -K.tangent(tb)])
        try:
            da, db = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        if max(abs(da), abs(db)) > 1e-3:
            break
        ta, tb = ta + da, tb + db
    return ta, tb


def inscribed_parallelogram(K: SupportBody, x) -> InscribedParallelogram:
    """Parallelogram ``P(K, x)`` inscribed in ``K`` with sides ``x`` and ``D(K, x)``."""
    if not isinstance(K, SupportBody):
        raise PreconditionError("inscribed parallelograms need a strictly convex support body")
    x = as_vec(x, "x")
    check_domain(K, x)
    t4, t1 = _crossings(K, x)
    # the partners p2 = p1 - x and p3 = p4 - x lie on bd K; read off their normals
    _, (t2, t3) = K.signed_distance(np.vstack([K.point(t1) - x, K.point(t4) - x]),
                                    return_angle=True)
    t2 = t1 + ccw_span(t1, t2)
    t3 = t4 - ccw_span(t3, t4)
    t1, t2 = _polish_pair(K, t1, t2, x)
    t4, t3 = _polish_pair(K, t4, t3, x)
    angles = tuple(float(canonical_angle(t)) for t in (t1, t2, t3, t4))
    p = K.point(np.array(angles))
    u = unit(np.array(angles))
    P = InscribedParallelogram(x, p[0], p[1], p[2], p[3], u[0], u[1], u[2], u[3], angles)
    if det2(x, P.D) <= 0 or np.any(P.positivity() <= 0):
        raise NumericalError("inscribed parallelogram has the wrong orientation",
                             x=x.tolist(), angles=list(angles))
    return P


def gradient_analytic(K: SupportBody, x) -> np.ndarray:
    """``grad g_K(x) = R D(K, x)``."""
    return R @ inscribed_parallelogram(K, x).D


def oblique_project(v1, v2, y) -> np.ndarray:
    """Component of ``y`` along ``v1`` in the basis ``(v1, v2)``."""
    v1, v2, y = as_vec(v1, "v1"), as_vec(v2, "v2"), as_vec(y, "y")
    d = det2(v2, v1)
    if abs(d) <= 1e-12 * np.linalg.norm(v1) * np.linalg.norm(v2):
        raise PreconditionError("projection directions are (nearly) parallel")
    return det2(v2, y) / d * v1


def projector(v1, v2) -> np.ndarray:
    """Matrix of :func:`oblique_project`: ``-v1 v2^T R / det(v2, v1)``."""
    v1, v2 = as_vec(v1, "v1"), as_vec(v2, "v2")
    d = det2(v2, v1)
    if abs(d) <= 1e-12 * np.linalg.norm(v1) * np.linalg.norm(v2):
        raise PreconditionError("projection directions are (nearly) parallel")
    return -np.outer(v1, v2) @ R / d


def _meet(n1, c1, n2, c2) -> np.ndarray:
    """Intersection of the lines ``<z, n1> = c1`` and ``<z, n2> = c2``."""
    return np.linalg.solve(np.vstack([n1, n2]), np.array([c1, c2]))


def fan_order_ok(P: InscribedParallelogram, h: np.ndarray) -> bool:
    """Cyclic order ``u1, u2, -h, u3, u4, h`` on the unit circle."""
    a = math.atan2(h[1], h[0])
    start = P.angles[0]
    seq = [P.angles[1], a + math.pi, P.angles[2], P.angles[3], a]
    spans = [float(ccw_span(start, t)) for t in seq]
    return all(0 < s for s in spans) and all(s1 < s2 for s1, s2 in zip(spans, spans[1:]))


def quadrilateral_Q(K: SupportBody, x, h, P: InscribedParallelogram | None = None) -> NormalFanQuadrilateral:
    """Quadrilateral ``Q(x, h)`` whose side ``[q_i, q_{i+1}]`` has outward normal ``u_i``."""
    h = as_vec(h, "h")
    if not np.linalg.norm(h) > 0:
        raise PreconditionError("h must be non-zero")
    if P is None:
        P = inscribed_parallelogram(K, x)
    if not fan_order_ok(P, h):
        raise PreconditionError("h violates the cyclic order u1, u2, -h, u3, u4, h")
    q1 = h
    q3 = np.zeros(2)
    q2 = _meet(P.u1, h @ P.u1, P.u2, 0.0)
    q4 = _meet(P.u3, 0.0, P.u4, h @ P.u4)
    return NormalFanQuadrilateral(h, q1, q2, q3, q4)


def admissible_h(P: InscribedParallelogram, scale: float = 1.0) -> np.ndarray:
    """A direction satisfying the fan order: the normal of the side ``[p4, p1]``."""
    d = P.p1 - P.p4
    n = -rot90(d)
    n = n / np.linalg.norm(n)
    return scale * n
