"""Good neighbourhoods of a strict minimum and tracing of the level curve around it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import ndimage
from skimage import measure

from ._numeric import compile_scalar
from .config import TraceConfig
from .errors import (
    BranchSelfCrossing,
    DegenerateInput,
    LevelEscapesNeighbourhood,
    NoComponentAroundOrigin,
    NotAStrictMinimum,
    NoValidRadius,
    RefinementDiverged,
)
from .geometry import find_self_intersection, signed_area, winding_number
from .poly import Polynomial

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass
class Neighbourhood:
    radius: float
    checks: dict = field(default_factory=dict)
    accepted: bool = True

    def __post_init__(self):
        if not self.radius > 0:
            raise DegenerateInput("neighbourhood radius must be positive")


@dataclass
class LevelCurve:
    epsilon: float
    points: np.ndarray
    residuals: np.ndarray
    nbhd: Neighbourhood
    poly: Polynomial
    grid_n: int = 0
    window: tuple = ()

    @property
    def cell(self) -> float:
        """Largest grid cell side used by the final trace."""
        if not self.window or not self.grid_n:
            return 0.0
        x0, x1, y0, y1 = self.window
        return max(x1 - x0, y1 - y0) / self.grid_n

    @property
    def diameter(self) -> float:
        p = self.points
        span = p.max(axis=0) - p.min(axis=0)
        return float(np.hypot(*span))

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class JordanReport:
    closed: bool
    simple: bool
    crossing: Optional[tuple]
    winding: int
    orientation: str
    max_residual: float
    passed: bool


def abs_poly(f: Polynomial) -> Polynomial:
    return Polynomial({k: abs(c) for k, c in f.terms.items()})


def _check_critical(f: Polynomial):
    if f.coefficient(0, 0) != 0:
        raise NotAStrictMinimum("f(0, 0) must vanish")
    if f.coefficient(1, 0) != 0 or f.coefficient(0, 1) != 0:
        raise NotAStrictMinimum("the gradient of f does not vanish at the origin")


def _positivity(f: Polynomial, r: float, n_rad: int = 160, n_ang: int = 720) -> dict:
    """Sample f on a polar grid of the punctured disk; all values must be > 0."""
    radii = r * np.geomspace(1e-3, 1.0, n_rad)
    angles = np.linspace(0.0, 2 * np.pi, n_ang, endpoint=False)
    R, A = np.meshgrid(radii, angles, indexing="ij")
    X, Y = R * np.cos(A), R * np.sin(A)
    # axis-aligned angles must hit the axes exactly
    for k, (c, s) in {0: (1, 0), n_ang // 4: (0, 1), n_ang // 2: (-1, 0), 3 * n_ang // 4: (0, -1)}.items():
        X[:, k], Y[:, k] = c * radii, s * radii
    V = f(X, Y)
    bad = np.argwhere(V <= 0)
    for i, j in bad:
        if f.evaluate_exact((X[i, j], Y[i, j])) <= 0:
            return {"passed": False, "samples": int(V.size), "witness": [float(X[i, j]), float(Y[i, j])]}
    # f must also increase from the origin on every ray's first samples
    return {"passed": True, "samples": int(V.size)}


def good_neighbourhood(f: Polynomial, cfg: TraceConfig | None = None) -> Neighbourhood:
    """Largest candidate radius whose disk passes the sampled neighbourhood checks."""
    from . import polar  # polar needs Neighbourhood, import lazily

    cfg = cfg or TraceConfig()
    _check_critical(f)
    if f.degree_in("y") < 1:
        raise NotAStrictMinimum("f does not depend on y, the minimum is not isolated")
    history = []
    any_positive = False
    for r in sorted(cfg.nbhd_candidates, reverse=True):
        checks = {"radius": r, "positivity": _positivity(f, r)}
        history.append(checks)
        if not checks["positivity"]["passed"]:
            continue
        any_positive = True
        trial = Neighbourhood(r, checks, accepted=False)
        try:
            branches = polar.polar_half_branches(f, trial, cfg)
        except BranchSelfCrossing as exc:
            checks["polar_smooth"] = {"passed": False, "reason": str(exc)}
            continue
        checks["polar_smooth"] = {"passed": True, "half_branches": len(branches)}
        issues = []
        for b in branches:
            for g in ("coordinate_x", "function_f", "squared_distance"):
                rep = polar.check_monotone_along_branch(b, g)
                if not rep.ok:
                    issues.append(f"branch {b.id}: {g} not monotone at sample {rep.violation}")
            if b.exit_point is None:
                issues.append(f"branch {b.id}: does not reach the boundary")
        checks["branch_monotone"] = {"passed": not issues, "issues": issues}
        if issues:
            continue
        return Neighbourhood(r, checks, accepted=True)
    if not any_positive:
        w = history[-1]["positivity"].get("witness")
        raise NotAStrictMinimum(f"f takes non-positive values near the origin, e.g. at {w}")
    raise NoValidRadius(f"no candidate radius in {list(cfg.nbhd_candidates)} passed: {history}")


# -- tracing ----------------------------------------------------------------

def _grid(f, eps, window, n, ysym):
    x0, x1, y0, y1 = window
    k = np.arange(n + 1)
    xs = x0 + (x1 - x0) * k / n
    if ysym:
        ys = y1 * (2 * k - n) / n
    else:
        ys = y0 + (y1 - y0) * k / n
    F = f(xs[:, None], ys[None, :]) - eps
    return xs, ys, F


def _origin_component(F, xs, ys):
    mask = F <= 0
    labels, _ = ndimage.label(mask, structure=_EIGHT)
    i = int(np.clip(np.searchsorted(xs, 0.0), 1, len(xs) - 1))
    j = int(np.clip(np.searchsorted(ys, 0.0), 1, len(ys) - 1))
    # the origin node, or the nearest sub-level node of its cell
    cands = [(a, b) for a in (i - 1, i) for b in (j - 1, j) if mask[a, b]]
    if not cands:
        return None
    a, b = min(cands, key=lambda ab: xs[ab[0]] ** 2 + ys[ab[1]] ** 2)
    return labels == labels[a, b]


def _select_window(f, eps, r, n, ysym):
    window = (-r, r, -r, r)
    for _ in range(12):
        xs, ys, F = _grid(f, eps, window, n, ysym)
        comp = _origin_component(F, xs, ys)
        if comp is None:
            raise NoComponentAroundOrigin(f"no sub-level node near the origin at eps={eps}")
        I, J = np.nonzero(comp)
        X, Y = xs[I], ys[J]
        if np.any(np.hypot(X, Y) >= r) or I.min() == 0 or J.min() == 0 or I.max() == n or J.max() == n:
            if window[1] - window[0] >= 2 * r:
                raise LevelEscapesNeighbourhood(f"level {eps} reaches the boundary of the disk of radius {r}")
            window = _grow(window, 2.0, r, ysym)
            continue
        hx = (window[1] - window[0]) / n
        hy = (window[3] - window[2]) / n
        px = 0.25 * (X.max() - X.min()) + 3 * hx
        py = 0.25 * (Y.max() - Y.min()) + 3 * hy
        new = (max(X.min() - px, -r), min(X.max() + px, r), max(Y.min() - py, -r), min(Y.max() + py, r))
        if ysym:
            h = max(abs(new[2]), abs(new[3]))
            new = (new[0], new[1], -h, h)
        shrink = max((window[1] - window[0]) / (new[1] - new[0]), (window[3] - window[2]) / (new[3] - new[2]))
        if shrink < 1.5:
            return window, xs, ys, F
        window = new
    return window, xs, ys, F


def _grow(window, factor, r, ysym):
    x0, x1, y0, y1 = window
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    hx, hy = (x1 - x0) * factor / 2, (y1 - y0) * factor / 2
    out = (max(cx - hx, -r), min(cx + hx, r), max(cy - hy, -r), min(cy + hy, r))
    if ysym:
        h = max(abs(out[2]), abs(out[3]))
        out = (out[0], out[1], -h, h)
    return out


def _loop_around_origin(F, xs, ys):
    best = None
    for c in measure.find_contours(F, 0.0, fully_connected="low"):
        if len(c) < 4 or not np.allclose(c[0], c[-1]):
            continue
        pts = np.column_stack([np.interp(c[:-1, 0], np.arange(len(xs)), xs),
                               np.interp(c[:-1, 1], np.arange(len(ys)), ys)])
        if winding_number(pts) == 0:
            continue
        area = abs(signed_area(pts))
        if best is None or area < best[0]:
            best = (area, pts)
    return None if best is None else best[1]


def _residual_scale(fa: Polynomial, pts: np.ndarray) -> np.ndarray:
    return fa(np.abs(pts[:, 0]), np.abs(pts[:, 1]))


def _newton(f, fx, fy, fa, eps, pts, cfg, step_cap):
    """Move each point along the gradient onto f = eps."""
    p = pts.copy()
    tol = cfg.refine_tol * eps
    for _ in range(cfg.newton_max_iter):
        r = f(p[:, 0], p[:, 1]) - eps
        if np.all(np.abs(r) <= 0.25 * tol):
            break
        gx, gy = fx(p[:, 0], p[:, 1]), fy(p[:, 0], p[:, 1])
        g2 = gx * gx + gy * gy
        g2 = np.where(g2 == 0, np.inf, g2)
        p[:, 0] -= r * gx / g2
        p[:, 1] -= r * gy / g2
    moved = np.hypot(*(p - pts).T)
    if not np.all(np.isfinite(p)) or np.any(moved > step_cap):
        raise RefinementDiverged(f"Newton refinement left its cell (max move {np.nanmax(moved):.3g})")
    res = np.abs(f(p[:, 0], p[:, 1]) - eps)
    # where double rounding cannot certify the residual, redo it exactly
    unsure = (4e-16 * _residual_scale(fa, p) > 0.1 * tol) | (res > tol)
    for k in np.nonzero(unsure)[0]:
        p[k], res[k] = _newton_exact(f, fx, fy, eps, p[k], tol)
    return p, res


def _newton_exact(f, fx, fy, eps, q, tol, iters=8):
    e = Fraction(eps)
    x, y = float(q[0]), float(q[1])
    r = f.evaluate_exact((x, y)) - e
    for _ in range(iters):
        if abs(r) <= tol:
            break
        gx, gy = fx.evaluate((x, y)), fy.evaluate((x, y))
        g2 = gx * gx + gy * gy
        if g2 == 0:
            break
        rf = float(r)
        nx, ny = x - rf * gx / g2, y - rf * gy / g2
        nr = f.evaluate_exact((nx, ny)) - e
        if abs(nr) >= abs(r):
            break
        x, y, r = nx, ny, nr
    return np.array([x, y]), float(abs(r))


def _continue(fg, eps, p0, hmax, r, max_turn=0.12, max_steps=400_000):
    """Follow f = eps counterclockwise from ``p0`` until the loop closes.

    Predictor along the tangent, corrector along the gradient.  Steps shrink
    when the corrector fails, the curve turns by more than ``max_turn`` or the
    normal flips (which means the step jumped across a thin band).
    """
    def correct(x, y):
        for _ in range(12):
            v, gx, gy = fg(x, y)
            g2 = gx * gx + gy * gy
            if g2 == 0.0:
                return None
            d = (v - eps) / g2
            x, y = x - d * gx, y - d * gy
            if abs(v - eps) <= 1e-13 * eps + 1e-300:
                break
        v, gx, gy = fg(x, y)
        g = math.hypot(gx, gy)
        if g == 0.0 or abs(v - eps) > 1e-6 * eps:
            return None
        return x, y, gx / g, gy / g

    start = correct(*p0)
    if start is None:
        raise RefinementDiverged(f"could not place a seed point on the level near {tuple(p0)}")
    x, y, nx, ny = start
    pts = [(x, y)]
    h = hmax
    travelled = 0.0
    hmin = 1e-13 * max(1.0, abs(x) + abs(y))
    for _ in range(max_steps):
        tx, ty = -ny, nx
        got = correct(x + h * tx, y + h * ty)
        ok = False
        if got is not None:
            x1, y1, nx1, ny1 = got
            step = math.hypot(x1 - x, y1 - y)
            turn = math.atan2(nx * ny1 - ny * nx1, nx * nx1 + ny * ny1)
            ok = 0.3 * h <= step <= 2.0 * h and abs(turn) <= max_turn
        if not ok:
            h *= 0.5
            if h < hmin:
                raise RefinementDiverged(f"continuation stalled near ({x:.6g}, {y:.6g})")
            continue
        # closing test: the next point passes the seed
        sx, sy = pts[0]
        if travelled > 4 * hmax and math.hypot(x1 - sx, y1 - sy) <= 1.5 * h:
            if (sx - x) * tx + (sy - y) * ty <= step:
                return np.array(pts)
        x, y, nx, ny = x1, y1, nx1, ny1
        if math.hypot(x, y) >= r:
            raise LevelEscapesNeighbourhood(f"level {eps} reaches the boundary of the disk of radius {r}")
        pts.append((x, y))
        travelled += step
        h = min(h * 1.5, hmax)
    raise RefinementDiverged("continuation did not close the loop")


def _mirror_upper_arc(f, fx, fy, fa, eps, pts, res, cfg, step_cap):
    """Replace the lower half of a loop seeded on the x-axis by the mirror of its upper half.

    A Jordan curve symmetric about the axis meets it exactly twice, so the
    upper arc runs from the seed to the second crossing.  Loops that do not
    look like that are returned unchanged.
    """
    y = pts[:, 1]
    if len(pts) < 4 or y[0] != 0.0 or y[1] <= 0.0:
        return pts, res
    k = int(np.argmax(y[1:] <= 0.0)) + 1
    if y[k] > 0.0 or np.any(y[k + 1:] > 0.0):
        return pts, res
    if y[k] == 0.0:
        q, rq = pts[k], res[k]
    else:
        a, b = pts[k - 1], pts[k]
        guess = np.array([[a[0] + a[1] / (a[1] - b[1]) * (b[0] - a[0]), 0.0]])
        qs, rs = _newton(f, fx, fy, fa, eps, guess, cfg, step_cap)
        q, rq = qs[0], rs[0]
        if q[1] != 0.0:
            return pts, res
    upper = np.vstack([pts[:k], q[None, :]])
    ures = np.concatenate([res[:k], [rq]])
    lower = upper[1:-1][::-1] * np.array([1.0, -1.0])
    return np.vstack([upper, lower]), np.concatenate([ures, ures[1:-1][::-1]])


def trace_level(f: Polynomial, epsilon: float, nbhd: Neighbourhood, cfg: TraceConfig | None = None) -> LevelCurve:
    """Trace the boundary of the sub-level component of the origin as a CCW polygon.

    Marching squares on a grid zoomed onto the component locates the loop;
    the polygon itself is produced by continuation from a loop point with
    steps no longer than one grid cell, then polished by Newton.
    """
    cfg = cfg or TraceConfig()
    if not epsilon > 0:
        raise DegenerateInput("epsilon must be positive")
    r = nbhd.radius
    ysym = f.is_y_symmetric()
    fx, fy, fa = f.derivative("x"), f.derivative("y"), abs_poly(f)
    fg = compile_scalar(f, fx, fy)
    n = cfg.grid_n
    last_err = None
    for _ in range(cfg.max_refine + 1):
        window, xs, ys, F = _select_window(f, epsilon, r, n, ysym)
        loop = _loop_around_origin(F, xs, ys)
        if loop is None:
            raise NoComponentAroundOrigin(f"no closed level loop encloses the origin at eps={epsilon}")
        cell = min(xs[1] - xs[0], ys[1] - ys[0])
        # seed on the positive x-axis crossing keeps traces of y-symmetric f symmetric
        k = int(np.argmax(loop[:, 0] - 1e3 * np.abs(loop[:, 1]) * (np.abs(loop[:, 1]) > 2 * cell)))
        seed = (loop[k, 0], 0.0) if ysym and abs(loop[k, 1]) <= 2 * cell else tuple(loop[k])
        try:
            raw = _continue(fg, epsilon, seed, cell, r)
        except RefinementDiverged as exc:
            last_err = str(exc)
            n *= 2
            continue
        pts, res = _newton(f, fx, fy, fa, epsilon, raw, cfg, step_cap=cell)
        if ysym:
            pts, res = _mirror_upper_arc(f, fx, fy, fa, epsilon, pts, res, cfg, cell)
        if signed_area(pts) < 0:
            pts, res = pts[::-1].copy(), res[::-1].copy()
        if np.any(np.hypot(pts[:, 0], pts[:, 1]) >= r):
            raise LevelEscapesNeighbourhood(f"level {epsilon} reaches the boundary of the disk of radius {r}")
        if winding_number(pts) != 1:
            raise NoComponentAroundOrigin(f"traced loop at eps={epsilon} does not wind once around the origin")
        if find_self_intersection(pts) is None:
            return LevelCurve(epsilon, pts, res, nbhd, f, n, window)
        last_err = "refined loop is not a simple curve"
        n *= 2
    raise RefinementDiverged(f"{last_err} after {cfg.max_refine} grid doublings")


def verify_jordan(curve: LevelCurve, refine_tol: float | None = None) -> JordanReport:
    pts = curve.points
    closed = len(pts) >= 3 and bool(np.all(np.isfinite(pts)))
    crossing = find_self_intersection(pts) if closed else None
    wn = winding_number(pts) if closed else 0
    area = signed_area(pts) if closed else 0.0
    orientation = "ccw" if area > 0 else "cw" if area < 0 else "degenerate"
    max_res = float(np.max(curve.residuals)) if len(curve.residuals) else float("inf")
    tol = (refine_tol if refine_tol is not None else TraceConfig().refine_tol) * curve.epsilon
    passed = closed and crossing is None and wn == 1 and orientation == "ccw" and max_res <= tol
    return JordanReport(closed, crossing is None, crossing, wn, orientation, max_res, passed)
