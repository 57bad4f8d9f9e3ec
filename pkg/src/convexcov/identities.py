"""The Hessian of the covariogram and the identities it satisfies.

``G(K, x)`` is written in terms of the four normals of the inscribed
parallelogram.  Every function here returns plain residuals so that callers
can apply their own tolerance.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NumericalError
from .geometry import R, SupportBody, as_vec, det2
from .parallelogram import InscribedParallelogram, inscribed_parallelogram, projector


def hessian_forms(P: InscribedParallelogram) -> tuple[np.ndarray, np.ndarray]:
    """The two displayed expressions for ``G``; they are transposes of each other."""
    u1, u2, u3, u4 = P.u1, P.u2, P.u3, P.u4
    d21 = det2(u2, u1)
    d34 = det2(u3, u4)
    if d21 == 0 or d34 == 0:
        raise NumericalError("degenerate normals in the inscribed parallelogram",
                             x=P.x.tolist(), angles=list(P.angles))
    A = np.outer(u2, u1) / d21 - np.outer(u3, u4) / d34
    B = np.outer(u1, u2) / d21 - np.outer(u4, u3) / d34
    return A, B


def hessian_from_parallelogram(P: InscribedParallelogram) -> np.ndarray:
    A, B = hessian_forms(P)
    return 0.5 * (A + B)


def hessian_analytic(K: SupportBody, x) -> np.ndarray:
    return hessian_from_parallelogram(inscribed_parallelogram(K, x))


def det_sym(G: np.ndarray) -> float:
    return float(G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0])


def inverse_adjugate(G: np.ndarray) -> np.ndarray:
    """``G^{-1}`` from the 2x2 adjugate."""
    d = det_sym(G)
    return np.array([[G[1, 1], -G[0, 1]], [-G[1, 0], G[0, 0]]]) / d


def _dets(P: InscribedParallelogram):
    u1, u2, u3, u4 = P.u1, P.u2, P.u3, P.u4
    return {
        "12": det2(u1, u2), "23": det2(u2, u3), "34": det2(u3, u4), "41": det2(u4, u1),
        "13": det2(u1, u3), "24": det2(u2, u4),
    }


def det_relations_from(P: InscribedParallelogram, G: np.ndarray | None = None) -> tuple[float, float, float]:
    G = hessian_from_parallelogram(P) if G is None else G
    d = _dets(P)
    detG = det_sym(G)
    rhs42 = -d["23"] * d["41"] / (d["34"] * d["12"])
    rhs43 = d["24"] * d["13"] / (d["34"] * d["12"])
    return detG, abs(detG - rhs42), abs(1.0 + detG - rhs43)


def det_relations(K: SupportBody, x) -> tuple[float, float, float]:
    """``(detG, res42, res43)``; raises if ``detG`` is not negative."""
    detG, r42, r43 = det_relations_from(inscribed_parallelogram(K, x))
    if not detG < 0:
        raise NumericalError("Hessian determinant is not negative", x=list(map(float, x)), detG=detG)
    return detG, r42, r43


def orthogonality_residual_from(P: InscribedParallelogram, G: np.ndarray | None = None) -> float:
    """``|u1^T G^{-1} u3|`` relative to ``|G^{-1}|``, with ``G^{-1} = -R G R / det G``."""
    G = hessian_from_parallelogram(P) if G is None else G
    Ginv = -(R @ G @ R) / det_sym(G)
    return float(abs(P.u1 @ Ginv @ P.u3) / np.linalg.norm(Ginv, 2))


def orthogonality_residual(K: SupportBody, x) -> float:
    return orthogonality_residual_from(inscribed_parallelogram(K, x))


def plucker(v1, v2, v3, v4) -> float:
    """``det(v1,v3)det(v2,v4) - det(v2,v3)det(v1,v4) - det(v4,v3)det(v2,v1)``."""
    v1, v2, v3, v4 = (np.asarray(v, dtype=float) for v in (v1, v2, v3, v4))
    lhs = det2(v1, v3) * det2(v2, v4)
    rhs = det2(v2, v3) * det2(v1, v4) + det2(v4, v3) * det2(v2, v1)
    return lhs - rhs


def rgr_residual(G: np.ndarray) -> float:
    return float(np.linalg.norm(R @ G @ R + det_sym(G) * inverse_adjugate(G), 2) / np.linalg.norm(G, 2))


def projection_form_residual(P: InscribedParallelogram, G: np.ndarray | None = None) -> float:
    """``|G - (Pi_{u1}^{u2} R - Pi_{u4}^{u3} R)|`` relative to ``|G|``."""
    G = hessian_from_parallelogram(P) if G is None else G
    alt = projector(P.u1, P.u2) @ R - projector(P.u4, P.u3) @ R
    return float(np.linalg.norm(G - alt, 2) / np.linalg.norm(G, 2))


@dataclass
class HessianReport:
    x: list
    G: list
    detG: float
    residual_eq41: float
    residual_eq42: float
    residual_eq43: float
    residual_eq44: float
    forms_discrepancy: float
    rgr_residual: float
    projection_residual: float
    min_positivity: float

    def to_json(self) -> dict:
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v)
                for k, v in asdict(self).items()}


def hessian_report(K: SupportBody, x, oracle=None) -> HessianReport:
    """All Hessian identities at ``x``; ``residual_eq41`` compares against finite differences."""
    from .covariogram import fd_hessian
    from .oracle import AnalyticOracle

    x = as_vec(x, "x")
    P = inscribed_parallelogram(K, x)
    A, B = hessian_forms(P)
    G = 0.5 * (A + B)
    o = AnalyticOracle(K) if oracle is None else oracle
    H = fd_hessian(o, x)
    nG = np.linalg.norm(G, 2)
    detG, r42, r43 = det_relations_from(P, G)
    return HessianReport(
        x=x.tolist(),
        G=G.tolist(),
        detG=detG,
        residual_eq41=float(np.linalg.norm(G - H, 2) / nG),
        residual_eq42=r42,
        residual_eq43=r43,
        residual_eq44=orthogonality_residual_from(P, G),
        forms_discrepancy=float(np.abs(A - B).max()),
        rgr_residual=rgr_residual(G),
        projection_residual=projection_form_residual(P, G),
        min_positivity=float(P.positivity().min()),
    )
