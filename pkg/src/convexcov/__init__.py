"""Covariograms of planar convex bodies and the geometry that determines a body from them."""

from .covariogram import (
    ChordLengthDistribution,
    CovariogramGrid,
    chord_length_cdf,
    convolution_check,
    covariogram_grid,
    covariogram_value,
    covariogram_values,
    cross_covariogram,
    fd_gradient,
    fd_hessian,
)
from .errors import NumericalError, PreconditionError
from .geometry import (
    R,
    ConvexPolygon,
    EllipseBody,
    SupportBody,
    TrigSupportBody,
    convex_intersection,
    det2,
    difference_body,
    is_affine_diameter,
    minkowski_sum,
    polygon_area,
    polygonize,
    support_eval,
)
from .identities import HessianReport, hessian_analytic, hessian_report
from .oracle import AnalyticOracle, CovariogramOracle, GridOracle, sample_domain
from .parallelogram import InscribedParallelogram, gradient_analytic, inscribed_parallelogram
from .reconstruct import (
    ArcTrace,
    NormalPair,
    ReconstructionReport,
    compare_bodies,
    equality_harness,
    find_conjugate,
    normal_pair,
    reconstruct_symmetric,
    trace_arc,
)
from .symmetry import (
    SymmetricHexagon,
    SymmetryVerdict,
    central_symmetry_test,
    hexagon_from_parallelograms,
    hexagon_inscription_test,
)

__version__ = "0.1.0"
