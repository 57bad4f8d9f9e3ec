"""Standard test bodies.

The two three-fold bodies are the asymmetric fixtures.  A sine coefficient of
0.05 on ``sin 4θ`` (next to ``0.08 cos 3θ``) gives ``h + h'' < 0`` near a few
angles, so the mixed fixture uses 0.015, which keeps the curvature radius
above 0.15.
"""

from __future__ import annotations

import numpy as np

from .geometry import ConvexPolygon, EllipseBody, TrigSupportBody


def unit_square() -> ConvexPolygon:
    return ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def unit_triangle() -> ConvexPolygon:
    return ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))


def unit_disk() -> TrigSupportBody:
    return TrigSupportBody(1.0)


def ellipse() -> EllipseBody:
    return EllipseBody(1.0, 0.6)


def trefoil() -> TrigSupportBody:
    """``h = 1 + 0.1 cos 3θ``."""
    return TrigSupportBody(1.0, (0.0, 0.0, 0.1))


def trefoil_mixed() -> TrigSupportBody:
    """``h = 1 + 0.08 cos 3θ + 0.015 sin 4θ``."""
    return TrigSupportBody(1.0, (0.0, 0.0, 0.08), (0.0, 0.0, 0.0, 0.015))


POLYGONS = {"square": unit_square, "triangle": unit_triangle}
SUPPORT_BODIES = {"disk": unit_disk, "ellipse": ellipse, "trefoil": trefoil,
                  "trefoil_mixed": trefoil_mixed}
SYMMETRIC = ("disk", "ellipse")
ASYMMETRIC = ("trefoil", "trefoil_mixed")

# a sampled |det G + 1| above this certifies asymmetry of the fixture; each is
# about half the maximum over a 1000-point analytic scan of the sampling domain
ASYMMETRY_THRESHOLD = {"trefoil": 0.5, "trefoil_mixed": 0.39}


def get(name: str):
    table = {**POLYGONS, **SUPPORT_BODIES}
    return table[name]()
