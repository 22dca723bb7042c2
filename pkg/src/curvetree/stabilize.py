"""Run the pipeline down a geometric ladder of levels and detect when the tree settles."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .config import EPS_FLOOR, TraceConfig
from .errors import BelowNumericFloor, GeometryError, UsageError
from .pipeline import analyze_level
from .poly import Polynomial
from .reeb import ReebTree, check_geodesic_monotonicity
from .trace import Neighbourhood, good_neighbourhood
from .polar import polar_half_branches


@dataclass(frozen=True)
class EpsilonLadder:
    eps0: float
    ratio: float
    steps: int

    @property
    def values(self) -> list[float]:
        return [self.eps0 * self.ratio**k for k in range(self.steps)]

    def denser(self) -> "EpsilonLadder":
        """Same range with twice the resolution (ratio square-rooted)."""
        return EpsilonLadder(self.eps0, self.ratio**0.5, 2 * self.steps - 1)


@dataclass
class LevelOutcome:
    epsilon: float
    code: Optional[str]
    tree: Optional[ReebTree] = None
    error: Optional[str] = None


@dataclass
class StabilisationResult:
    ladder: EpsilonLadder
    codes: list
    stable_from: Optional[int]
    asymptotic_tree: Optional[ReebTree]
    monotone_geodesics: Optional[bool]
    levels: list = field(default_factory=list)

    @property
    def asymptotic_code(self) -> Optional[str]:
        return self.codes[-1] if self.stable_from is not None else None


def epsilon_ladder(eps0: float, ratio: float, steps: int) -> EpsilonLadder:
    if not eps0 > 0:
        raise UsageError("eps0 must be positive")
    if not 0 < ratio < 1:
        raise UsageError("ratio must lie strictly between 0 and 1")
    if int(steps) != steps or steps < 2:
        raise UsageError("steps must be an integer >= 2")
    lad = EpsilonLadder(float(eps0), float(ratio), int(steps))
    if lad.values[-1] < EPS_FLOOR:
        raise BelowNumericFloor(f"last level {lad.values[-1]:.3g} is below the numeric floor {EPS_FLOOR:g}")
    return lad


def thread_count() -> int:
    raw = os.environ.get("CURVETREE_THREADS", "")
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        raise UsageError(f"CURVETREE_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def stable_index(codes: list, window: int) -> Optional[int]:
    """First index from which every code is the same, if that tail is long enough."""
    if not codes or codes[-1] is None:
        return None
    k = len(codes) - 1
    while k > 0 and codes[k - 1] == codes[-1]:
        k -= 1
    return k if len(codes) - k >= window else None


def asymptotic_tree(f: Polynomial, ladder: EpsilonLadder, cfg: TraceConfig | None = None,
                    nbhd: Neighbourhood | None = None, drop_odd: bool = False) -> StabilisationResult:
    cfg = cfg or TraceConfig()
    nbhd = nbhd or good_neighbourhood(f, cfg)
    branches = polar_half_branches(f, nbhd, cfg)

    def one(eps):
        try:
            a = analyze_level(f, eps, cfg, nbhd, branches, shape=False, drop_odd=drop_odd)
        except GeometryError as exc:
            return LevelOutcome(eps, None, None, f"{type(exc).__name__}: {exc}")
        return LevelOutcome(eps, a.code, a.rooted)

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        levels = list(pool.map(one, ladder.values))
    codes = [lv.code for lv in levels]
    k = stable_index(codes, cfg.stability_window)
    tree = levels[-1].tree
    mono = check_geodesic_monotonicity(tree).ok if tree is not None else None
    return StabilisationResult(ladder, codes, k, tree, mono, levels)
