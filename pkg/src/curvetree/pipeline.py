"""One level, end to end: trace, tangencies, tree, root, code, and shape reports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import TraceConfig
from .polar import HalfBranch, TangencyPoint, polar_half_branches, vertical_tangencies
from .poly import Polynomial
from .reeb import CodeOptions, ReebTree, ValidationReport, build_reeb, canonical_code, root_tree, validate_tree
from .shape import ConvexityReport, StarReport, convexity_defect, star_kernel
from .trace import LevelCurve, Neighbourhood, good_neighbourhood, trace_level


@dataclass
class LevelAnalysis:
    epsilon: float
    curve: LevelCurve
    branches: list
    tangencies: list
    tree: ReebTree
    rooted: ReebTree
    code: str
    validation: ValidationReport
    convexity: Optional[ConvexityReport] = None
    star: Optional[StarReport] = None


def analyze_level(f: Polynomial, epsilon: float, cfg: TraceConfig | None = None,
                  nbhd: Neighbourhood | None = None, branches: list[HalfBranch] | None = None,
                  shape: bool = True, drop_odd: bool = False) -> LevelAnalysis:
    cfg = cfg or TraceConfig()
    nbhd = nbhd or good_neighbourhood(f, cfg)
    if branches is None:
        branches = polar_half_branches(f, nbhd, cfg)
    curve = trace_level(f, epsilon, nbhd, cfg)
    tangencies: list[TangencyPoint] = vertical_tangencies(curve, f, branches, cfg)
    tree = build_reeb(curve, tangencies, cfg)
    rooted = root_tree(tree, curve)
    code = canonical_code(rooted, CodeOptions(drop_odd=drop_odd))
    out = LevelAnalysis(epsilon, curve, branches, tangencies, tree, rooted, code, validate_tree(rooted))
    if shape:
        out.convexity = convexity_defect(curve, tree, tangencies, cfg)
        out.star = star_kernel(curve)
    return out
