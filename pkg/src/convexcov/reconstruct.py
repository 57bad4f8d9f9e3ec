"""Recovering boundary information from covariogram data alone.

The pipeline follows the uniqueness argument for planar convex bodies:

1. :func:`find_conjugate` finds ``y`` whose inscribed parallelogram shares
   the diagonal ``[p1, p3]`` with that of ``x``.
2. :func:`normal_pair` reads the unordered pair ``{u1(x), -u3(x)}`` off the
   eigenvectors of ``G(x) G(y)^{-1}``.
3. :func:`trace_arc` follows the curve on which ``u3`` stays fixed; along it
   ``x(t) = p4(t) - p3`` sweeps a translate of a boundary arc.

Centrally symmetric bodies are recovered directly as ``DK / 2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq, linprog

from .covariogram import _stencil_ok, covariogram_values
from .errors import NumericalError, PreconditionError
from .geometry import (
    R,
    TWO_PI,
    ConvexBody,
    ConvexPolygon,
    SupportBody,
    as_vec,
    ccw_span,
    det2,
    difference_body_cached,
    rot90,
    unit,
)
from .identities import det_sym
from .oracle import SAMPLING_MARGIN, CovariogramOracle, GridOracle, make_oracle
from .parallelogram import inscribed_parallelogram

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# conjugate points


def _phi_batch(o: CovariogramOracle, Z: np.ndarray):
    """``z + D(z)`` with a fourth-order gradient, plus the plain Hessian, for many ``z``."""
    s = o.step
    # one oracle call: the 9-point stencil at s plus the axis points at 2s
    offs = np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1],
                     [1, 1], [1, -1], [-1, 1], [-1, -1],
                     [2, 0], [-2, 0], [0, 2], [0, -2]], dtype=float) * s
    # DK is convex, so a valid stencil at 2s is valid at s as well
    ok = _stencil_ok(o, Z, 2.0 * s)
    grad = np.full((len(Z), 2), np.nan)
    H = np.full((len(Z), 2, 2), np.nan)
    if ok.any():
        Y = Z[ok]
        v = o.values((Y[:, None, :] + offs[None]).reshape(-1, 2)).reshape(len(Y), len(offs))
        g1 = np.stack([v[:, 1] - v[:, 2], v[:, 3] - v[:, 4]], axis=1) / (2 * s)
        g2 = np.stack([v[:, 9] - v[:, 10], v[:, 11] - v[:, 12]], axis=1) / (4 * s)
        grad[ok] = (4.0 * g1 - g2) / 3.0
        gxx = (v[:, 1] - 2 * v[:, 0] + v[:, 2]) / s**2
        gyy = (v[:, 3] - 2 * v[:, 0] + v[:, 4]) / s**2
        gxy = (v[:, 5] - v[:, 6] - v[:, 7] + v[:, 8]) / (4 * s**2)
        H[ok] = np.stack([np.stack([gxx, gxy], -1), np.stack([gxy, gyy], -1)], -2)
    return Z - rot90(grad), H, ok


def _newton_batch(o, Z, target, tol, max_iter=30, halvings=5):
    """Vectorised damped Newton for ``z + D(z) = target`` with Jacobian ``I - R G(z)``.

    ``det J = 1 + det G(z)`` can be small near the conjugate, so each step is
    halved until the residual drops.  Seeds that cannot reduce it are
    stalled at a local minimum of ``|F|`` and are dropped.
    """
    Z = np.array(Z, dtype=float)
    phi, H, alive = _phi_batch(o, Z)
    F = phi - target
    nF = np.linalg.norm(F, axis=1)
    conv = alive & (nF <= tol)
    lim = 0.05 * o.scale
    for _ in range(max_iter):
        idx = np.flatnonzero(alive & ~conv)
        if len(idx) == 0:
            break
        Hi, Fi = H[idx], F[idx]
        a, b = 1.0 + Hi[:, 1, 0], Hi[:, 1, 1]
        c, d = -Hi[:, 0, 0], 1.0 - Hi[:, 0, 1]
        det = a * d - b * c
        good = np.abs(det) > 1e-14
        alive[idx[~good]] = False
        idx, Fi, a, b, c, d, det = idx[good], Fi[good], a[good], b[good], c[good], d[good], det[good]
        dz = np.stack([-(d * Fi[:, 0] - b * Fi[:, 1]), -(-c * Fi[:, 0] + a * Fi[:, 1])], axis=1) / det[:, None]
        dz *= np.minimum(1.0, lim / np.maximum(np.linalg.norm(dz, axis=1), 1e-300))[:, None]
        pending = np.arange(len(idx))
        lam = 1.0
        for k in range(halvings + 1):
            rows = idx[pending]
            trial = Z[rows] + lam * dz[pending]
            p2, H2, ok2 = _phi_batch(o, trial)
            F2 = p2 - target
            n2 = np.linalg.norm(F2, axis=1)
            take = ok2 & (n2 < nF[rows])
            t_rows = rows[take]
            Z[t_rows], F[t_rows], H[t_rows], nF[t_rows] = trial[take], F2[take], H2[take], n2[take]
            pending = pending[~take]
            if len(pending) == 0:
                break
            lam *= 0.5
        alive[idx[pending]] = False
        conv |= alive & (nF <= tol)
    res = np.where(alive | conv, nF, np.inf)
    return Z, conv, res


@dataclass
class ConjugateResult:
    x: np.ndarray
    y: np.ndarray
    residual: float
    branch: str
    one_plus_det: float
    hexagon_residual: float = 0.0
    candidates: int = 0


def _validate_conjugate(o, x, Dx, y, Gx, hex_tol):
    """Check that ``P(x)`` and ``P(y)`` really share ``p1`` and ``p3``.

    Another root of ``z + D(z) = x + D(x)`` comes from the translated chord
    of the same length and direction.  Assuming a shared ``p1`` builds a
    hexagon; only for a genuine conjugate does it satisfy ``D(x_i) =
    h_{2i+2} - h_{2i+1}``.  The eigenvalues of ``G(x) G(y)^{-1}`` must also
    be real and distinct.
    """
    from .symmetry import SymmetricHexagon

    Gy, _ = o.hessian_extrapolated(y)
    M = Gx @ _adj_inverse(Gy)
    tr, dt = np.trace(M), np.linalg.det(M)
    if tr * tr - 4.0 * dt <= 1e-12 * tr * tr:
        return None
    Dy = -R @ o.gradient_extrapolated(y)
    pts = np.vstack([np.zeros(2), -x, -x - Dx, -Dx, -y, -Dy])
    try:
        hull = ConvexPolygon.from_points(pts)
        if len(hull) != 6:
            return None
        v = np.roll(hull.vertices, -int(np.argmin(np.linalg.norm(hull.vertices, axis=1))), axis=0)
        H = SymmetricHexagon(_symmetrize(v))
    except (PreconditionError, NumericalError, ValueError):
        return None
    # the diagonals +-x and +-y hold by construction; only the third carries information
    k = int(np.argmax([min(np.linalg.norm(w - s * u) for u in (x, y) for s in (1, -1))
                       for w in H.xs]))
    Dz = _safe_D(o, H.xs[k])
    if Dz is None:
        # too close to bd DK or o for a trustworthy derivative; the eigenvalue test stands alone
        return float("nan")
    r = float(np.linalg.norm(Dz - H.targets[k]))
    return r if r <= hex_tol else None


def _safe_D(o, z):
    """``D(z)`` by the best finite difference whose stencil fits, or None."""
    margin = SAMPLING_MARGIN if o.kind == "grid" else 0.0
    if not o.in_domain(z[None], margin)[0]:
        return None
    try:
        return -R @ o.gradient_extrapolated(z)
    except PreconditionError:
        pass
    try:
        return -R @ o.gradient(z)
    except PreconditionError:
        return None


def _symmetrize(v):
    c = 0.5 * (v[0] + v[3])
    v = v.copy()
    v[4:6] = 2 * c - v[1:3]
    return v


def find_conjugate_full(o, x, tol: float | None = None, n_path: int = 24,
                        n_cover: int = 96, hint=None) -> ConjugateResult:
    """Find ``y != x`` with ``y + D(y) = x + D(x)``, using oracle data only.

    The level set of ``z + D(z)`` through ``x`` is generically a few isolated
    points.  Newton is started from seeds along the path on which the
    conjugate lies (``[x, o]`` when ``1 + det G(x) > 0``, ``[x, x + D(x)]``
    otherwise), marching away from ``x``, then from a quasi-random cover of
    the domain.  The first root farther than ``2 * step`` from ``x`` that
    passes :func:`_validate_conjugate` is returned.  A ``hint`` (say the
    conjugate of a nearby point) is tried before everything else; a root
    reached from it that passes the eigenvalue test is accepted even where
    the hexagon check cannot be evaluated.
    """
    from .oracle import sample_domain

    o = make_oracle(o)
    x = as_vec(x, "x")
    if not o.in_domain(x[None], 0.0)[0]:
        raise PreconditionError(f"x = {x.tolist()} is outside the oracle's domain")
    Gx, _ = o.hessian_extrapolated(x)
    opd = 1.0 + det_sym(Gx)
    gap_tol = 1e-3 if o.kind == "grid" else 1e-6
    if abs(opd) <= gap_tol:
        raise PreconditionError(f"1 + det G(x) = {opd:.3g} is too close to 0 for a conjugate")
    Dx = -R @ o.gradient_extrapolated(x)
    target = x + Dx
    tol = 1e-10 * o.scale if tol is None else tol
    hex_tol = (1e-3 if o.kind == "grid" else 1e-4) * o.scale
    branch = "+" if opd > 0 else "-"
    end = np.zeros(2) if opd > 0 else target
    ts = np.linspace(0.0, 1.0, n_path + 2)[1:-1]
    # path seeds in small groups, nearest to x first: usually one group suffices
    stages = [lambda c=c: x + c[:, None] * (end - x) for c in np.array_split(ts, max(1, n_path // 6))]
    stages.append(lambda: sample_domain(o, n_cover, seed=7, margin=0.01))
    if hint is not None:
        hint = as_vec(hint, "hint")
        stages.insert(0, lambda: hint[None])
    sep = 2.0 * o.step
    seen: list[np.ndarray] = []
    unchecked = None
    for k, stage in enumerate(stages):
        from_hint = hint is not None and k == 0
        seeds = stage()
        seeds = seeds[o.in_domain(seeds, 0.005)]
        Z, conv, res = _newton_batch(o, seeds, target, tol)
        for z, r in zip(Z[conv], res[conv]):
            if np.linalg.norm(z - x) <= sep:
                continue
            if any(np.linalg.norm(z - w) <= 1e-6 * o.scale for w in seen):
                continue
            seen.append(z)
            hr = _validate_conjugate(o, x, Dx, z, Gx, hex_tol)
            if hr is None:
                continue
            if math.isnan(hr):
                found = ConjugateResult(x, z, float(r), branch, opd, hr, len(seen))
                if from_hint and np.linalg.norm(z - hint) <= 0.05 * o.scale:
                    # continuation from a conjugate of a nearby point vouches for it
                    return found
                unchecked = unchecked or found
                continue
            return ConjugateResult(x, z, float(r), branch, opd, hr, len(seen))
    if unchecked is not None:
        return unchecked
    raise NumericalError("no conjugate point found", x=x.tolist(), branch=branch,
                         one_plus_det=opd, rejected=[w.tolist() for w in seen])


def find_conjugate(o, x) -> np.ndarray:
    return find_conjugate_full(o, x).y


def find_conjugate_geometric(K: SupportBody, x) -> np.ndarray:
    """Conjugate point from the body itself, by intersecting ``bd K`` with its mirror.

    ``K_c`` is ``K`` reflected about the midpoint ``c`` of ``[p1, p3]``.  When
    ``1 + det G > 0`` the arc from ``p1`` to ``p2`` meets ``bd K_c`` at an
    interior point ``q`` and ``y = p1 - q``; otherwise the arc from ``p4`` to
    ``p1`` does and ``y = q - p3``.
    """
    from .identities import hessian_from_parallelogram

    x = as_vec(x, "x")
    P = inscribed_parallelogram(K, x)
    opd = 1.0 + det_sym(hessian_from_parallelogram(P))
    c = 0.5 * (P.p1 + P.p3)
    t1, t2, t3, t4 = P.angles
    if opd > 0:
        a, span = t1, float(ccw_span(t1, t2))
    else:
        a, span = t4, float(ccw_span(t4, t1))

    def f(t):
        return float(K.signed_distance(2 * c - K.point(t))[0])

    # skip the endpoints, which are trivial crossings
    edge = 1e-6 * span
    ts = a + edge + (span - 2 * edge) * np.linspace(0.0, 1.0, 401)
    vals = K.signed_distance(2 * c - K.point(ts))
    sgn = np.sign(vals)
    idx = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
    if len(idx) == 0:
        raise NumericalError("mirror arcs do not cross", x=x.tolist(), one_plus_det=opd)
    i = idx[0]
    t = brentq(f, ts[i], ts[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    q = K.point(t)
    return P.p1 - q if opd > 0 else q - P.p3


# ---------------------------------------------------------------------------
# normal pairs


@dataclass
class NormalPair:
    x: np.ndarray
    v1: np.ndarray
    v3: np.ndarray
    eigen_gap: float
    y: np.ndarray
    eigenvalues: tuple = ()

    def to_json(self) -> dict:
        return {
            "x": self.x.tolist(),
            "v1": self.v1.tolist(),
            "v3": self.v3.tolist(),
            "eigen_gap": self.eigen_gap,
            "y": self.y.tolist(),
            "eigenvalues": list(self.eigenvalues),
        }


def _adj_inverse(G):
    d = det_sym(G)
    return np.array([[G[1, 1], -G[0, 1]], [-G[1, 0], G[0, 0]]]) / d


def normal_pair(o, x, y=None, gap_tol: float = 1e-6, hint=None) -> NormalPair:
    """The unordered pair ``{u1(x), -u3(x)}`` from eigenvectors of ``G(x) G(y)^{-1}``.

    Both vectors are flipped to satisfy ``<x, v> >= 0``.  ``v1`` is the one
    met first when turning counterclockwise from the direction of ``x``
    rotated back by a quarter turn.
    """
    o = make_oracle(o)
    x = as_vec(x, "x")
    if y is None:
        y = find_conjugate_full(o, x, hint=hint).y
    Gx, _ = o.hessian_extrapolated(x)
    Gy, _ = o.hessian_extrapolated(y)
    M = Gx @ _adj_inverse(Gy)
    lam, vec = np.linalg.eig(M)
    if np.any(np.abs(lam.imag) > 1e-9 * np.abs(lam).max()):
        raise NumericalError("G(x) G(y)^-1 has complex eigenvalues", x=x.tolist(),
                             y=np.asarray(y).tolist(), eigenvalues=[str(v) for v in lam])
    lam = lam.real
    vec = vec.real
    gap = float(abs(lam[0] - lam[1]) / max(np.abs(lam).max(), 1e-300))
    if gap <= gap_tol:
        raise NumericalError("eigenvalues of G(x) G(y)^-1 coincide", x=x.tolist(),
                             eigenvalues=lam.tolist(), gap=gap)
    vs = []
    for k in range(2):
        v = vec[:, k] / np.linalg.norm(vec[:, k])
        if v @ x < 0:
            v = -v
        vs.append(v)
    # order by angle measured counterclockwise from -R x, the start of the half-plane <x, v> >= 0
    base = math.atan2(-x[0], x[1])
    ang = [float(ccw_span(base, math.atan2(v[1], v[0]))) for v in vs]
    if ang[0] > ang[1]:
        vs.reverse()
        lam = lam[::-1]
    return NormalPair(x, vs[0], vs[1], gap, np.asarray(y, dtype=float), tuple(float(v) for v in lam))


def pair_angle_error(pair: NormalPair, a: np.ndarray, b: np.ndarray) -> float:
    """Angular distance between ``{v1, v3}`` and ``{a, b}`` as unordered sets."""

    def ang(p, q):
        return math.acos(max(-1.0, min(1.0, float(p @ q) / (np.linalg.norm(p) * np.linalg.norm(q)))))

    direct = max(ang(pair.v1, a), ang(pair.v3, b))
    swapped = max(ang(pair.v1, b), ang(pair.v3, a))
    return min(direct, swapped)


# ---------------------------------------------------------------------------
# arc tracing


@dataclass
class ArcTrace:
    x0: np.ndarray
    curve: np.ndarray
    arc: np.ndarray
    N1: tuple
    N3: tuple
    step: float
    status: str
    reason: str = ""
    swap_violations: int = 0
    n1_exits: int = 0
    angle_residual: float = 0.0
    t: np.ndarray = field(default=None, repr=False)

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    def to_json(self) -> dict:
        return {
            "x0": self.x0.tolist(),
            "points": len(self.curve),
            "N1": list(self.N1),
            "N3": list(self.N3),
            "step": self.step,
            "status": self.status,
            "reason": self.reason,
            "swap_violations": self.swap_violations,
            "n1_exits": self.n1_exits,
            "angle_residual": self.angle_residual,
        }


def _angle_between(a, b) -> float:
    return abs(float(np.angle(complex(*a) / complex(*b))))


def _select(pair: NormalPair, c3: np.ndarray, radius: float):
    """Split a pair into (u1, v3) by membership of ``N3`` around ``c3``."""
    d1 = _angle_between(pair.v1, c3)
    d3 = _angle_between(pair.v3, c3)
    if d3 <= d1:
        sel, other, ds, do = pair.v3, pair.v1, d3, d1
    else:
        sel, other, ds, do = pair.v1, pair.v3, d1, d3
    ok = ds < radius and do >= radius
    return other, sel, ok


def trace_arc(o, x0, arclen: float, step: float | None = None,
              swap: bool = False) -> ArcTrace:
    """Follow the curve on which ``u3(x)`` is constant, starting at ``x0``.

    Along it ``p3`` is pinned and ``x(t) = p4(t) - p3``, so the curve is a
    translate of the boundary arc swept by ``p4``.  Which member of the
    normal pair is ``-u3`` cannot be told from the covariogram; by default
    it is ``v3`` of :func:`normal_pair` (``swap=True`` picks ``v1``).  The
    wrong choice traces an arc of ``-K``.
    """
    o = make_oracle(o)
    x0 = as_vec(x0, "x0")
    h = 1e-3 * o.scale if step is None else float(step)
    pair0 = normal_pair(o, x0)
    c1, c3 = (pair0.v3, pair0.v1) if swap else (pair0.v1, pair0.v3)
    gap_angle = _angle_between(c1, c3)
    gap_angle = min(gap_angle, math.pi - gap_angle)
    radius = min(gap_angle / 4.0, 0.2)
    a1 = math.atan2(c1[1], c1[0])
    a3 = math.atan2(c3[1], c3[0])
    N1 = (a1 - radius, a1 + radius)
    N3 = (a3 - radius, a3 + radius)
    H0, _ = o.hessian_extrapolated(x0)
    sign0 = np.sign(1.0 + det_sym(H0))

    last_y = [pair0.y]

    def state(x):
        pair = normal_pair(o, x, hint=last_y[0])
        u1, v3, ok = _select(pair, c3, radius)
        return pair, u1, v3, ok

    def u3_angle(x):
        _, _, v3, _ = state(x)
        return float(np.angle(complex(*v3) / complex(*c3)))

    curve = [x0.copy()]
    x = x0.copy()
    travelled = 0.0
    status, reason = "complete", ""
    violations = 0
    n1_exits = 0
    worst = 0.0
    u1, v3 = c1, c3
    while travelled < arclen - 1e-12:
        G, _ = o.hessian_extrapolated(x)
        u3 = -v3
        w = G @ R @ u1 + u1
        s = det2(u3, u1)
        if np.linalg.norm(w) == 0 or s == 0:
            status, reason = "numerical_failure", "degenerate tangent"
            break
        u4 = w / np.linalg.norm(w) * np.sign(s)
        hh = min(h, arclen - travelled)
        pred = x + hh * (R @ u4)
        try:
            # one Newton step along u4 on the angle of the pinned normal
            eps = 0.1 * hh
            f0 = u3_angle(pred)
            f1 = u3_angle(pred + eps * u4)
            slope = (f1 - f0) / eps
            corr = -f0 / slope if slope != 0 else 0.0
            if abs(corr) > hh:
                corr = math.copysign(hh, corr)
            xn = pred + corr * u4
            if not o.in_domain(xn[None])[0]:
                status, reason = "left_domain", f"x = {xn.tolist()} left the sampling domain"
                break
            Hn, _ = o.hessian_extrapolated(xn)
            if np.sign(1.0 + det_sym(Hn)) != sign0:
                status, reason = "detG_crossing", "1 + det G changed sign"
                break
            pair, u1n, v3n, ok = state(xn)
        except (NumericalError, PreconditionError) as exc:
            if isinstance(exc, PreconditionError):
                status = "left_domain"
            else:
                status = "numerical_failure"
            reason = str(exc)
            break
        if not ok:
            status, reason = "swap_ambiguity", "normal candidates no longer separated by N3"
            break
        # independent check: continuity from the previous step must pick the same candidate
        if _angle_between(v3n, v3) > _angle_between(u1n, v3):
            violations += 1
        if _angle_between(u1n, c1) >= radius:
            n1_exits += 1
        worst = max(worst, _angle_between(v3n, c3))
        travelled += float(np.linalg.norm(xn - x))
        x, u1, v3 = xn, u1n, v3n
        last_y[0] = pair.y
        curve.append(x.copy())
    curve = np.array(curve)
    t = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(curve, axis=0), axis=1))])
    return ArcTrace(x0, curve, curve.copy(), N1, N3, h, status, reason, violations, n1_exits,
                    worst, t)


def true_arc(K: SupportBody, curve: np.ndarray) -> np.ndarray:
    """Ground truth: ``p4(K, x)`` for each traced ``x``."""
    return np.array([inscribed_parallelogram(K, x).p4 for x in curve])


def arc_hausdorff(A: np.ndarray, B: np.ndarray, translate: bool = True) -> tuple[float, np.ndarray]:
    """Hausdorff distance between two polylines after optimal translation."""
    from scipy.optimize import minimize
    from scipy.spatial import cKDTree

    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)

    def dense(P, k=8):
        seg = np.diff(P, axis=0)
        s = np.linspace(0, 1, k, endpoint=False)
        pts = (P[:-1, None, :] + s[None, :, None] * seg[:, None, :]).reshape(-1, 2)
        return np.vstack([pts, P[-1]])

    Ad, Bd = dense(A), dense(B)
    ta, tb = cKDTree(Ad), cKDTree(Bd)

    def hd(t):
        return max(tb.query(Ad - t)[0].max(), ta.query(Bd + t)[0].max())

    if not translate:
        return float(hd(np.zeros(2))), np.zeros(2)
    t0 = A.mean(axis=0) - B.mean(axis=0)
    res = minimize(hd, t0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
    t = res.x if res.fun <= hd(t0) else t0
    return float(hd(t)), t


# ---------------------------------------------------------------------------
# symmetric reconstruction and comparison


def reconstruct_symmetric(o, verdict=None) -> ConvexBody:
    """``DK / 2`` for an oracle whose covariogram passes the symmetry test."""
    from .symmetry import central_symmetry_test

    o = make_oracle(o)
    if verdict is None:
        verdict = central_symmetry_test(o)
    if not verdict.is_symmetric:
        raise PreconditionError(
            f"covariogram is not centrally symmetric (max |det G + 1| = "
            f"{verdict.max_monge_ampere_residual:.3g} > tol {verdict.tol:.3g})")
    return o.dk.scaled(0.5)


def _support(B: ConvexBody, theta):
    return B.support(theta)


def _best_translation(hA, hB, U):
    """Chebyshev fit of ``hA - hB`` by ``<t, u>``: returns (sup error, t)."""
    diff = hA - hB
    m = len(diff)
    # variables (t1, t2, s): minimise s with |diff - U t| <= s
    c = np.array([0.0, 0.0, 1.0])
    A = np.vstack([np.column_stack([-U, -np.ones(m)]), np.column_stack([U, -np.ones(m)])])
    b = np.concatenate([-diff, diff])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None), (None, None), (0, None)], method="highs")
    if not res.success:
        return math.inf, np.zeros(2)
    return float(res.x[2]), res.x[:2]


@dataclass
class Comparison:
    hausdorff: float
    reflected: bool
    translation: np.ndarray

    def to_json(self) -> dict:
        return {"hausdorff": self.hausdorff, "reflected": self.reflected,
                "translation": self.translation.tolist()}


def _centroid(B: ConvexBody) -> np.ndarray:
    return B.centroid


def compare_bodies(A: ConvexBody, B: ConvexBody, n: int = 4096) -> Comparison:
    """Hausdorff distance between ``A`` and ``B + t`` or ``-B + t``, minimised over ``t``.

    For convex bodies the Hausdorff distance is the sup-norm of the
    difference of support functions.  Centroid alignment gives a first
    translation; a linear program over sampled directions refines it.
    """
    theta = np.arange(n) * (TWO_PI / n)
    U = unit(theta)
    fine = np.arange(4 * n) * (TWO_PI / (4 * n))
    Uf = unit(fine)
    hA = _support(A, theta)
    hAf = _support(A, fine)
    best = None
    for reflected, Bc in ((False, B), (True, B.reflect())):
        hB = _support(Bc, theta)
        cands = [_centroid(A) - _centroid(Bc)]
        _, t = _best_translation(hA, hB, U)
        cands.append(t)
        for t in cands:
            d = float(np.abs(hAf - _support(Bc, fine) - Uf @ t).max())
            if best is None or d < best.hausdorff - 1e-12:
                best = Comparison(d, reflected, np.asarray(t, dtype=float))
    return best


def equality_harness(K: ConvexBody, L: ConvexBody, n: int = 64) -> float:
    """``max |g_K - g_L|`` over an ``n x n`` grid covering both difference bodies."""
    ang = np.array([0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi])
    hk = difference_body_cached(K).support(ang)
    hl = difference_body_cached(L).support(ang)
    half = float(max(hk.max(), hl.max())) * 1.02
    ax = np.linspace(-half, half, n)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    return float(np.abs(covariogram_values(K, pts) - covariogram_values(L, pts)).max())


@dataclass
class ReconstructionReport:
    mode: str
    body: dict
    comparison: dict | None
    diagnostics: dict

    def to_json(self) -> dict:
        return asdict(self)
