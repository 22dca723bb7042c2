"""Poincaré-Reeb trees of small level curves around a strict local minimum of a plane polynomial."""

__version__ = "0.1.0"

from .config import TraceConfig
from .errors import CurveTreeError, GeometryError, UsageError
from .pipeline import LevelAnalysis, analyze_level
from .polar import (
    HalfBranch,
    TangencyPoint,
    check_monotone_along_branch,
    polar_curve,
    polar_half_branches,
    vertical_tangencies,
)
from .poly import (
    Polynomial,
    SymMatrix2,
    UniPolyOverPoly,
    evaluate,
    format_polynomial,
    hessian_at,
    parse_polynomial,
    partial_derivative,
    sylvester_resultant,
)
from .reeb import (
    CodeOptions,
    ReebTree,
    ReebVertex,
    build_reeb,
    canonical_code,
    check_geodesic_monotonicity,
    root_tree,
    validate_tree,
)
from .shape import classify_minimum, convexity_defect, midpoint_witness, star_kernel
from .stabilize import EpsilonLadder, StabilisationResult, asymptotic_tree, epsilon_ladder
from .trace import LevelCurve, Neighbourhood, good_neighbourhood, trace_level, verify_jordan

__all__ = [
    "CodeOptions", "CurveTreeError", "EpsilonLadder", "GeometryError", "HalfBranch", "LevelAnalysis",
    "LevelCurve", "Neighbourhood", "Polynomial", "ReebTree", "ReebVertex", "StabilisationResult",
    "SymMatrix2", "TangencyPoint", "TraceConfig", "UniPolyOverPoly", "UsageError",
    "analyze_level", "asymptotic_tree", "build_reeb", "canonical_code", "check_geodesic_monotonicity",
    "check_monotone_along_branch", "classify_minimum", "convexity_defect", "epsilon_ladder", "evaluate",
    "format_polynomial", "good_neighbourhood", "hessian_at", "midpoint_witness", "parse_polynomial",
    "partial_derivative", "polar_curve", "polar_half_branches", "root_tree", "star_kernel",
    "sylvester_resultant", "trace_level", "validate_tree", "verify_jordan", "vertical_tangencies",
]
