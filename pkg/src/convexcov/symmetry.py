"""Central symmetry from covariogram data and the inscribed-hexagon criterion.

A body is centrally symmetric exactly when ``det G = -1`` on the punctured
interior of ``DK``, which is also when every inscribed parallelogram has a
diagonal that is an affine diameter.  Inscribed symmetric hexagons can be
detected from ``D`` and ``det G`` at three arguments.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .covariogram import fd_gradient, fd_hessian
from .errors import PreconditionError
from .geometry import R, ConvexPolygon, SupportBody, as_vec, is_affine_diameter, unit
from .identities import det_sym, hessian_from_parallelogram
from .oracle import AnalyticOracle, CovariogramOracle, make_oracle, sample_domain
from .parallelogram import InscribedParallelogram, inscribed_parallelogram

log = logging.getLogger(__name__)

ANALYTIC_TOL = 1e-6
# dist(p1 - p3, bd DK) is quadratic in the angle between u1 and -u3 while
# 1 + det G is linear in it, so the matching tolerance is the square
AFFINE_TOL = ANALYTIC_TOL**2
GRID_TOL_FLOOR = 1e-3


@dataclass
class SymmetryVerdict:
    is_symmetric: bool
    max_monge_ampere_residual: float
    witness: list
    samples: int
    tol: float
    seed: int
    source: str
    error_estimate: float = 0.0
    geometric_residual: float | None = None
    geometric_agrees: bool | None = None
    residuals: list = field(default_factory=list, repr=False)
    points: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("residuals")
        d.pop("points")
        return d


def _det_errors(o: CovariogramOracle, X: np.ndarray):
    """Extrapolated ``det G`` and a per-point estimate of the plain-step error."""
    dets = np.empty(len(X))
    errs = np.empty(len(X))
    for k, x in enumerate(X):
        H1 = fd_hessian(o, x)
        H2 = fd_hessian(o, x, 2.0 * o.step)
        H = (4.0 * H1 - H2) / 3.0
        dets[k] = det_sym(H)
        errs[k] = abs(det_sym(H) - det_sym(H1))
    return dets, errs


def reflection_residual(K: SupportBody, n: int = 2048) -> float:
    """``max |h_K - h_{K'}|`` where ``K'`` is ``K`` reflected about its centroid."""
    theta = np.arange(n) * (2 * np.pi / n)
    c = K.centroid
    h = K.support(theta)
    h_ref = 2.0 * unit(theta) @ c + K.support(theta + np.pi)
    return float(np.abs(h - h_ref).max())


def central_symmetry_test(source, n_samples: int = 256, tol: float | None = None,
                          seed: int = 0) -> SymmetryVerdict:
    """Decide central symmetry from ``max |det G(x) + 1|`` over quasi-random samples.

    ``source`` is a support body (exact Hessian from inscribed
    parallelograms, plus a direct reflection check) or any oracle (Hessian by
    Richardson-extrapolated finite differences).  On grid oracles each sample
    gets its own tolerance, ten times its extrapolation correction, since the
    finite-difference error grows sharply near ``bd DK`` and near o.
    """
    if n_samples < 64:
        raise PreconditionError("central_symmetry_test needs at least 64 samples")
    geometric = None
    if isinstance(source, SupportBody):
        o = AnalyticOracle(source)
        X = sample_domain(o, n_samples, seed)
        dets = np.array([det_sym(hessian_from_parallelogram(inscribed_parallelogram(source, x)))
                         for x in X])
        err = 0.0
        kind = "body"
        geometric = reflection_residual(source)
    else:
        o = make_oracle(source)
        X = sample_domain(o, n_samples, seed)
        dets, errs = _det_errors(o, X)
        err = float(errs.max())
        kind = o.kind
    res = np.abs(dets + 1.0)
    if tol is not None:
        tols = np.full(len(X), float(tol))
    elif kind == "grid":
        # each point is judged against its own finite-difference error
        tols = np.maximum(10.0 * errs, GRID_TOL_FLOOR)
    else:
        tols = np.full(len(X), ANALYTIC_TOL)
    k = int(np.argmax(res / tols))
    verdict = SymmetryVerdict(
        is_symmetric=bool(np.all(res <= tols)),
        max_monge_ampere_residual=float(res.max()),
        witness=X[k].tolist(),
        samples=len(X),
        tol=float(tols[k]),
        seed=seed,
        source=kind,
        error_estimate=err,
        residuals=res.tolist(),
        points=X.tolist(),
    )
    if geometric is not None:
        verdict.geometric_residual = geometric
        verdict.geometric_agrees = (geometric <= 1e-6 * o.scale) == verdict.is_symmetric
    return verdict


def affine_diameter_diagonals(K: SupportBody, x, tol: float = AFFINE_TOL,
                              P: InscribedParallelogram | None = None) -> tuple[bool, bool]:
    """Whether ``[p1, p3]`` and ``[p2, p4]`` of ``P(K, x)`` are affine diameters."""
    if P is None:
        P = inscribed_parallelogram(K, x)
    scale = K.diameter
    return (is_affine_diameter(K, P.p1, P.p3, tol * scale),
            is_affine_diameter(K, P.p2, P.p4, tol * scale))


def diagonal_equivalence(K: SupportBody, X, det_tol: float = ANALYTIC_TOL,
                         affine_tol: float = AFFINE_TOL) -> np.ndarray:
    """Per point: does "some diagonal is an affine diameter" match ``|det G + 1| <= det_tol``?"""
    out = []
    for x in np.atleast_2d(X):
        P = inscribed_parallelogram(K, x)
        d13, d24 = affine_diameter_diagonals(K, x, affine_tol, P)
        flat = abs(det_sym(hessian_from_parallelogram(P)) + 1.0) <= det_tol
        out.append((d13 or d24) == flat)
    return np.array(out)


# ---------------------------------------------------------------------------
# hexagons


@dataclass(frozen=True, eq=False)
class SymmetricHexagon:
    """Centrally symmetric convex hexagon with CCW vertices ``h1..h6``."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.shape != (6, 2):
            raise PreconditionError("a hexagon needs exactly six vertices")
        ConvexPolygon(v)  # convex and counterclockwise
        c = v.mean(axis=0)
        scale = float(np.ptp(v, axis=0).max())
        asym = np.abs((v[3:] - c) + (v[:3] - c)).max()
        if asym > 1e-9 * scale:
            raise PreconditionError(f"hexagon is not centrally symmetric (defect {asym:.3g})")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def center(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def xs(self) -> np.ndarray:
        """``x_i = h_{2i+1} - h_{2i-1}`` for ``i = 1, 2, 3``."""
        h = self.vertices
        return np.vstack([h[2] - h[0], h[4] - h[2], h[0] - h[4]])

    @property
    def targets(self) -> np.ndarray:
        """``h_{2i+2} - h_{2i+1}``, the values ``D(x_i)`` must take."""
        h = self.vertices
        return np.vstack([h[3] - h[2], h[5] - h[4], h[1] - h[0]])

    def translate(self, t) -> "SymmetricHexagon":
        return SymmetricHexagon(self.vertices + as_vec(t, "translation"))

    def perturb_pair(self, k: int, delta: float) -> "SymmetricHexagon":
        """Push ``h_k`` and its opposite vertex ``delta`` further from the centre."""
        v = self.vertices.copy()
        c = self.center
        for j in (k % 6, (k + 3) % 6):
            d = v[j] - c
            v[j] = v[j] + delta * d / np.linalg.norm(d)
        return SymmetricHexagon(v)

    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist()}


def hexagon_from_parallelograms(P: InscribedParallelogram, Q: InscribedParallelogram,
                                tol: float = 1e-8) -> SymmetricHexagon:
    """``conv(P ∪ Q)`` for two parallelograms sharing the diagonal ``[p1, p3]``."""
    scale = max(float(np.ptp(P.vertices, axis=0).max()), 1e-300)
    if (np.linalg.norm(P.p1 - Q.p1) > tol * scale or np.linalg.norm(P.p3 - Q.p3) > tol * scale):
        raise PreconditionError("parallelograms do not share the diagonal [p1, p3]")
    if np.linalg.norm(P.x - Q.x) <= tol * scale:
        raise PreconditionError("parallelograms coincide; the hull is not a hexagon")
    pts = np.vstack([P.vertices, Q.p2, Q.p4])
    try:
        hull = ConvexPolygon.from_points(pts)
    except Exception as exc:
        raise PreconditionError(f"hexagon hull degenerates: {exc}") from exc
    if len(hull) != 6:
        raise PreconditionError(f"hull has {len(hull)} vertices, expected 6")
    v = hull.vertices
    start = int(np.argmin(np.linalg.norm(v - P.p1, axis=1)))
    v = np.roll(v, -start, axis=0)
    # put the shared diagonal's endpoints exactly opposite each other
    v[0], v[3] = P.p1, P.p3
    c = 0.5 * (P.p1 + P.p3)
    v[4:6] = 2 * c - v[1:3]
    return SymmetricHexagon(v)


@dataclass
class HexagonTestResult:
    passed: bool
    d_residuals: list
    det_factors: list
    product: float
    tol: float

    def to_json(self) -> dict:
        return asdict(self)


def hexagon_inscription_test(o, H: SymmetricHexagon, tol: float | None = None) -> HexagonTestResult:
    """Is a translate of ``H`` inscribed in the body behind the oracle ``o``?

    Checks ``D(x_i) = h_{2i+2} - h_{2i+1}`` for the three ``x_i`` and
    ``prod (1 + det G(x_i)) >= 0``.
    """
    o = make_oracle(o)
    xs, targets = H.xs, H.targets
    ok = o.dk_signed_distance(xs) < 0
    if not ok.all() or np.any(np.linalg.norm(xs, axis=1) <= 1e-9 * o.scale):
        raise PreconditionError("hexagon diagonals leave int DK \\ {o}")
    D1 = np.array([-R @ fd_gradient(o, x) for x in xs])
    D2 = np.array([-R @ fd_gradient(o, x, 2.0 * o.step) for x in xs])
    resid = np.linalg.norm(D1 - targets, axis=1)
    if tol is None:
        est = float(np.linalg.norm(D1 - D2, axis=1).max()) / 3.0
        tol = max(1e-5 * o.scale, 10.0 * est)
    factors = []
    for x in xs:
        Hx, _ = o.hessian_extrapolated(x)
        factors.append(1.0 + det_sym(Hx))
    product = float(np.prod(factors))
    passed = bool(np.all(resid <= tol) and product >= -tol)
    return HexagonTestResult(passed, resid.tolist(), factors, product, float(tol))


def hexagon_sign_chain(K: SupportBody, H: SymmetricHexagon) -> float:
    """Largest ``|det(u1,u3)(x_{i+1}) - det(u2,u4)(x_i)|`` around the hexagon."""
    from .geometry import det2

    Ps = [inscribed_parallelogram(K, x) for x in H.xs]
    res = 0.0
    for i in range(3):
        a, b = Ps[(i + 1) % 3], Ps[i]
        res = max(res, abs(det2(a.u1, a.u3) - det2(b.u2, b.u4)))
    return float(res)
