"""Reading and writing bodies, covariogram grids, arcs and hexagons."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .covariogram import CovariogramGrid
from .errors import PreconditionError
from .geometry import ConvexBody, ConvexPolygon, EllipseBody, TrigSupportBody


def body_from_json(data: dict) -> ConvexBody:
    """Build a body from its JSON mapping (types ``polygon``, ``support``, ``ellipse``)."""
    try:
        kind = data["type"]
        if kind == "polygon":
            return ConvexPolygon(np.asarray(data["vertices"], dtype=float))
        if kind == "support":
            return TrigSupportBody(float(data["a0"]), tuple(data.get("cos", ())),
                                   tuple(data.get("sin", ())))
        if kind == "ellipse":
            return EllipseBody(float(data["a"]), float(data["b"]), float(data.get("angle", 0.0)),
                               tuple(data.get("center", (0.0, 0.0))))
    except (KeyError, TypeError) as exc:
        raise PreconditionError(f"malformed body JSON: {exc}") from exc
    raise PreconditionError(f"unknown body type {kind!r}")


def load_body(path) -> ConvexBody:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"{path}: {exc}") from exc
    return body_from_json(data)


def save_body(K: ConvexBody, path) -> None:
    Path(path).write_text(json.dumps(K.to_json(), indent=2) + "\n")


def save_grid(grid: CovariogramGrid, path) -> None:
    """CSV with header ``x,y,g``; x varies slowest."""
    data = np.column_stack([grid.points(), grid.values.ravel()])
    np.savetxt(path, data, delimiter=",", header="x,y,g", comments="", fmt="%.17g")


def load_grid(path, body_id: str = "") -> CovariogramGrid:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise PreconditionError(f"{path}: {exc}") from exc
    if data.shape[1] != 3:
        raise PreconditionError(f"{path}: expected columns x,y,g")
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    n = len(xs)
    if len(ys) != n or len(data) != n * n:
        raise PreconditionError(f"{path}: samples do not form a square grid")
    order = np.lexsort((data[:, 1], data[:, 0]))
    values = data[order, 2].reshape(n, n)
    dx = np.diff(xs)
    spacing = float(dx.mean())
    if np.abs(dx - spacing).max() > 1e-9 * spacing or abs(np.diff(ys).mean() - spacing) > 1e-9 * spacing:
        raise PreconditionError(f"{path}: grid is not uniform with equal spacing")
    return CovariogramGrid(np.array([xs[0], ys[0]]), spacing, values, body_id or str(path))


def save_arc(t, points, path) -> None:
    data = np.column_stack([np.asarray(t, dtype=float), np.asarray(points, dtype=float)])
    np.savetxt(path, data, delimiter=",", header="t,x,y", comments="", fmt="%.17g")


def load_arc(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:3]


def load_hexagon(path):
    from .symmetry import SymmetricHexagon

    with open(path) as fh:
        data = json.load(fh)
    try:
        return SymmetricHexagon(np.asarray(data["vertices"], dtype=float))
    except KeyError as exc:
        raise PreconditionError(f"{path}: hexagon JSON needs 'vertices'") from exc


def save_hexagon(H, path) -> None:
    Path(path).write_text(json.dumps(H.to_json(), indent=2) + "\n")


def parse_vec(text: str) -> np.ndarray:
    """``"0.5,0"`` -> ``array([0.5, 0.])``."""
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise PreconditionError(f"cannot parse vector {text!r}") from exc
    if len(parts) != 2 or not np.all(np.isfinite(parts)):
        raise PreconditionError(f"expected two finite numbers, got {text!r}")
    return np.array(parts)
