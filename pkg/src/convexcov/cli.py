"""Command-line front end.

Exit status is 0 on success, 2 when an input violates a precondition and 3
when a solver fails; in the last case a JSON object with diagnostics is
written to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io
from .covariogram import chord_length_cdf, covariogram_grid, covariogram_value
from .errors import NumericalError, PreconditionError
from .geometry import ConvexPolygon, SupportBody
from .identities import hessian_report
from .oracle import AnalyticOracle, GridOracle, sample_domain
from .reconstruct import (
    ReconstructionReport,
    compare_bodies,
    normal_pair,
    reconstruct_symmetric,
    trace_arc,
)
from .symmetry import central_symmetry_test, hexagon_inscription_test

log = logging.getLogger("convexcov")


def _emit(obj) -> None:
    print(json.dumps(obj, default=_jsonable))


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _oracle(args):
    if getattr(args, "grid", None):
        return GridOracle(io.load_grid(args.grid))
    if getattr(args, "body", None):
        return AnalyticOracle(io.load_body(args.body))
    raise PreconditionError("give --grid or --body")


def cmd_cov_eval(args):
    K = io.load_body(args.body)
    print(repr(covariogram_value(K, io.parse_vec(args.x), method=args.method)))


def cmd_cov_grid(args):
    K = io.load_body(args.body)
    grid = covariogram_grid(K, args.n, body_id=args.body)
    io.save_grid(grid, args.out)
    log.info("wrote %d x %d grid to %s", grid.n, grid.n, args.out)


def cmd_chordlen(args):
    K = io.load_body(args.body)
    u = io.parse_vec(args.dir)
    u = u / np.linalg.norm(u)
    a = float(np.arctan2(u[1], u[0]))
    # no chord along u is longer than the width of K in direction u
    top = 1.05 * float(K.support(a) + K.support(a + np.pi))
    rs = np.linspace(0.0, top, args.points)
    dist = chord_length_cdf(K, u, rs)
    data = np.column_stack([dist.r, dist.F])
    if args.out:
        np.savetxt(args.out, data, delimiter=",", header="r,F", comments="", fmt="%.17g")
    else:
        np.savetxt(sys.stdout, data, delimiter=",", header="r,F", comments="", fmt="%.17g")


def cmd_identities(args):
    K = io.load_body(args.body)
    if not isinstance(K, SupportBody):
        raise PreconditionError("the Hessian identities need a support body")
    o = AnalyticOracle(K)
    for x in sample_domain(o, args.samples, seed=args.seed):
        _emit(hessian_report(K, x, o).to_json())


def cmd_symmetry(args):
    if args.grid:
        source = GridOracle(io.load_grid(args.grid))
    else:
        K = io.load_body(args.body)
        source = K if isinstance(K, SupportBody) else AnalyticOracle(K)
    v = central_symmetry_test(source, n_samples=args.samples, tol=args.tol, seed=args.seed)
    _emit(v.to_json())


def cmd_hexagon(args):
    H = io.load_hexagon(args.hex)
    res = hexagon_inscription_test(_oracle(args), H, args.tol)
    _emit(res.to_json())


def cmd_normals(args):
    pair = normal_pair(_oracle(args), io.parse_vec(args.x))
    _emit(pair.to_json())


def cmd_trace_arc(args):
    tr = trace_arc(_oracle(args), io.parse_vec(args.x0), args.arclen, args.step, swap=args.swap)
    if args.out:
        io.save_arc(tr.t, tr.arc, args.out)
    _emit(tr.to_json())


def cmd_reconstruct(args):
    o = _oracle(args)
    verdict = central_symmetry_test(o, n_samples=args.samples, seed=args.seed)
    body = reconstruct_symmetric(o, verdict)
    comparison = None
    if args.truth:
        comparison = compare_bodies(io.load_body(args.truth), body).to_json()
    if args.out:
        io.save_body(body, args.out)
    report = ReconstructionReport("symmetric", body.to_json(), comparison,
                                  {"verdict": verdict.to_json(),
                                   "vertices": len(body) if isinstance(body, ConvexPolygon) else None})
    if not args.full:
        report.body = {"type": report.body["type"]}
    _emit(report.to_json())


def cmd_compare(args):
    _emit(compare_bodies(io.load_body(args.a), io.load_body(args.b)).to_json())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convexcov",
                                description="Covariograms of planar convex bodies.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("cov-eval", help="evaluate g_K at one point")
    s.add_argument("--body", required=True)
    s.add_argument("--x", required=True, help='point as "x,y"')
    s.add_argument("--method", choices=["auto", "exact", "polygon"], default="auto")
    s.set_defaults(func=cmd_cov_eval)

    s = sub.add_parser("cov-grid", help="sample g_K on a square grid")
    s.add_argument("--body", required=True)
    s.add_argument("--n", type=int, default=512)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cov_grid)

    s = sub.add_parser("chordlen", help="chord-length tail measure along a direction")
    s.add_argument("--body", required=True)
    s.add_argument("--dir", required=True, help='direction as "x,y"')
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--out")
    s.set_defaults(func=cmd_chordlen)

    s = sub.add_parser("identities", help="Hessian identity residuals as JSON lines")
    s.add_argument("--body", required=True)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_identities)

    s = sub.add_parser("symmetry", help="central symmetry verdict")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--body")
    src.add_argument("--grid")
    s.add_argument("--samples", type=int, default=256)
    s.add_argument("--tol", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_symmetry)

    def oracle_args(s):
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--grid")
        src.add_argument("--body")

    s = sub.add_parser("hexagon", help="test whether a symmetric hexagon is inscribable")
    oracle_args(s)
    s.add_argument("--hex", required=True)
    s.add_argument("--tol", type=float)
    s.set_defaults(func=cmd_hexagon)

    s = sub.add_parser("normals", help="normal pair at x from covariogram data")
    oracle_args(s)
    s.add_argument("--x", required=True)
    s.set_defaults(func=cmd_normals)

    s = sub.add_parser("trace-arc", help="trace a boundary arc from covariogram data")
    oracle_args(s)
    s.add_argument("--x0", required=True)
    s.add_argument("--arclen", type=float, default=0.5)
    s.add_argument("--step", type=float)
    s.add_argument("--swap", action="store_true", help="take the other member of the normal pair")
    s.add_argument("--out")
    s.set_defaults(func=cmd_trace_arc)

    s = sub.add_parser("reconstruct", help="recover a centrally symmetric body")
    oracle_args(s)
    s.add_argument("--out")
    s.add_argument("--truth", help="body JSON to compare against")
    s.add_argument("--samples", type=int, default=256)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--full", action="store_true", help="include the body in the report")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("compare", help="Hausdorff distance up to translation and reflection")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(json.dumps({"error": str(exc), "diagnostics": exc.diagnostics}, default=_jsonable),
              file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
