"""Polar curve f_y = 0: half-branches at the origin and vertical tangencies of level curves."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._numeric import polish_root, real_roots, solve2
from .config import TraceConfig
from .errors import BranchSelfCrossing, ConstantInY, NewtonDiverged, NotAStrictMinimum, TangencyTooClose
from .poly import Polynomial
from .trace import LevelCurve, Neighbourhood, abs_poly


def polar_curve(f: Polynomial) -> Polynomial:
    """Return df/dy, refusing inputs whose polar contains the line x = 0."""
    if f.degree_in("y") < 1:
        raise ConstantInY("f does not depend on y")
    fy = f.derivative("y")
    if fy.is_divisible_by_x():
        raise NotAStrictMinimum("df/dy is divisible by x, so the origin is not a strict minimum")
    return fy


@dataclass(eq=False)
class HalfBranch:
    id: int
    side: str
    samples: np.ndarray
    curve: Polynomial  # factor of df/dy vanishing on this branch
    source: Polynomial  # the function f itself
    exit_point: Optional[tuple] = None
    component: Optional[int] = None

    @property
    def tangent_angle(self) -> float:
        p = self.samples[1]
        return math.atan2(p[1], p[0]) % (2 * math.pi)

    def y_at(self, x: float) -> float:
        """Height of the branch above ``x``, by Newton from the sampled polyline."""
        s = self.samples
        order = np.argsort(s[:, 0])
        guess = float(np.interp(x, s[order, 0], s[order, 1]))
        if self.curve.degree_in("y") == 1 and self.curve.degree_in("x") == 0:
            return guess
        return polish_root(self.curve.coefficients_in_y(x), guess)

    def distance_to(self, point) -> float:
        x, y = float(point[0]), float(point[1])
        lo, hi = sorted((self.samples[0, 0], self.samples[-1, 0]))
        if not lo - 1e-12 <= x <= hi + 1e-12:
            return float("inf")
        return abs(self.y_at(x) - y)


@dataclass
class MonotonicityReport:
    ok: bool
    direction: Optional[str]
    violation: Optional[int]
    checked: int


@dataclass
class TangencyPoint:
    position: tuple
    parity: str
    branch_id: Optional[int] = None
    residual: float = 0.0
    merged: int = 1

    @property
    def x(self) -> float:
        return self.position[0]

    @property
    def y(self) -> float:
        return self.position[1]


# -- half-branches ------------------------------------------------------------

def _align(prev_pred: np.ndarray, roots: np.ndarray, gate: np.ndarray):
    """Order-preserving matching of predicted track heights to roots.

    Returns ``match[i]`` = root index or -1.  Dynamic programming over the two
    sorted lists minimising total displacement, with unmatched items costing
    their gate.
    """
    n, m = len(prev_pred), len(roots)
    if n == m and n:
        return np.arange(n)
    INF = float("inf")
    cost = np.full((n + 1, m + 1), INF)
    back = np.zeros((n + 1, m + 1), dtype=int)
    cost[0, :] = np.arange(m + 1) * 0.0
    for i in range(1, n + 1):
        cost[i, 0] = cost[i - 1, 0] + gate[i - 1]
        back[i, 0] = 1
        for j in range(1, m + 1):
            options = (
                cost[i - 1, j - 1] + abs(prev_pred[i - 1] - roots[j - 1]),
                cost[i - 1, j] + gate[i - 1],
                cost[i, j - 1],
            )
            k = int(np.argmin(options))
            cost[i, j] = options[k]
            back[i, j] = k
    match = -np.ones(n, dtype=int)
    i, j = n, m
    while i > 0:
        if j == 0 or back[i, j] == 1:
            i -= 1
        elif back[i, j] == 0:
            match[i - 1] = j - 1
            i -= 1
            j -= 1
        else:
            j -= 1
    return match


def _track_side(core: Polynomial, sign: int, r: float, cfg: TraceConfig):
    xs = sign * r * np.geomspace(1e-4, 1.0, cfg.polar_slices)
    tracks: list[list] = []
    alive: list[int] = []
    for k, x0 in enumerate(xs):
        roots = real_roots(core.coefficients_in_y(x0), lo=-4 * r, hi=4 * r)
        if alive:
            pred, gate = [], []
            for t in alive:
                s = tracks[t]
                if len(s) >= 2:
                    (xa, ya), (xb, yb) = s[-2], s[-1]
                    pred.append(yb + (yb - ya) * (x0 - xb) / (xb - xa))
                else:
                    pred.append(s[-1][1])
                gate.append(max(abs(pred[-1] - s[-1][1]), abs(x0 - s[-1][0])) * 4 + 1e-12 * r)
            pred = np.array(pred)
            if len(alive) == len(roots) and len(roots) > 1:
                gaps = np.diff(pred)
                last = np.diff([tracks[t][-1][1] for t in alive])
                bad = np.nonzero((gaps <= 0) & (last > 0))[0]
                if bad.size and np.hypot(x0, roots[bad[0]]) > 0.01 * r:
                    raise BranchSelfCrossing(
                        f"polar branches cross near ({x0:.6g}, {roots[bad[0]]:.6g})")
            match = _align(pred, roots, np.array(gate))
        else:
            match = np.zeros(0, dtype=int)
        used = set()
        still = []
        for t, j in zip(alive, match):
            if j >= 0:
                tracks[t].append((x0, float(roots[j])))
                used.add(int(j))
                still.append(t)
        for j, y in enumerate(roots):
            if j not in used:
                tracks.append([(x0, float(y))])
                still.append(len(tracks) - 1)
        alive = sorted(still, key=lambda t: tracks[t][-1][1])
    first_x = xs[0]
    out = []
    for s in tracks:
        born_at_origin = s[0][0] == first_x and math.hypot(*s[0]) < 0.1 * r
        out.append((np.array(s), born_at_origin))
    return out


def _bisect_exit(branch: HalfBranch, a, b, r: float, iters: int = 60):
    xa, xb = a[0], b[0]
    for _ in range(iters):
        xm = 0.5 * (xa + xb)
        ym = branch.y_at(xm)
        if math.hypot(xm, ym) < r:
            xa = xm
        else:
            xb = xm
    x = 0.5 * (xa + xb)
    return (x, branch.y_at(x))


def _finish_branch(branch: HalfBranch, raw: np.ndarray, r: float):
    norms = np.hypot(raw[:, 0], raw[:, 1])
    outside = np.nonzero(norms >= r)[0]
    if outside.size:
        k = int(outside[0])
        inside = raw[:k]
        branch.samples = np.vstack([[0.0, 0.0], inside])
        branch.exit_point = _bisect_exit(branch, inside[-1], raw[k], r) if k else None
        if branch.exit_point is not None:
            branch.samples = np.vstack([branch.samples, branch.exit_point])
    else:
        branch.samples = np.vstack([[0.0, 0.0], raw])
        # slices reach |x| = r, so a branch staying inside ended early
        if abs(raw[-1, 0]) >= r * (1 - 1e-12):
            branch.exit_point = (float(raw[-1, 0]), float(raw[-1, 1]))
        else:
            branch.exit_point = None


def polar_half_branches(f: Polynomial, nbhd: Neighbourhood, cfg: TraceConfig | None = None) -> list[HalfBranch]:
    """Trace the half-branches of the polar curve inside the neighbourhood.

    The polar curve is sliced by vertical lines at geometrically spaced
    abscissae on each side of the origin; the real roots on consecutive
    slices are chained into tracks.  A factor ``y**b`` of df/dy contributes
    the two half-axes directly.
    """
    cfg = cfg or TraceConfig()
    r = nbhd.radius
    fy = polar_curve(f)
    a, b = fy.monomial_content()
    core = fy.divide_monomial(a, b)
    branches: list[HalfBranch] = []
    Y = Polynomial.y()
    if b > 0:
        line = np.geomspace(1e-4, 1.0, cfg.polar_slices) * r
        for sign, side in ((-1, "left"), (1, "right")):
            pts = np.column_stack([sign * line, np.zeros_like(line)])
            hb = HalfBranch(0, side, np.vstack([[0.0, 0.0], pts]), Y, f, exit_point=(sign * r, 0.0))
            branches.append(hb)
    if core.degree_in("y") >= 1:
        for sign, side in ((-1, "left"), (1, "right")):
            for raw, at_origin in _track_side(core, sign, r, cfg):
                if not at_origin:
                    continue
                hb = HalfBranch(0, side, raw, core, f)
                _finish_branch(hb, raw, r)
                branches.append(hb)
    branches.sort(key=lambda hb: (hb.tangent_angle, float(np.hypot(*hb.samples[-1]))))
    for k, hb in enumerate(branches):
        hb.id = k
    _pair_components(branches)
    return branches


def _pair_components(branches: list[HalfBranch]):
    """Pair half-branches with opposite tangent directions into components.

    Vertical-tangent half-branches on one side are paired by their rank in
    |y| at a common abscissa; the remaining ones by opposite angles, only
    when the match is unique.
    """
    comp = 0
    groups: dict = {}
    for hb in branches:
        ang = hb.tangent_angle
        vertical = abs(math.cos(ang)) < 0.2
        if vertical:
            groups.setdefault((hb.side, ang < math.pi), []).append(hb)
    for side in ("left", "right"):
        up = groups.get((side, True), [])
        down = groups.get((side, False), [])
        if up and len(up) == len(down):
            xr = min(min(abs(h.samples[-1, 0]) for h in up + down), 1e-2 * max(abs(h.samples[-1, 0]) for h in up + down))
            xr = xr if side == "right" else -xr
            up = sorted(up, key=lambda h: abs(h.y_at(xr)))
            down = sorted(down, key=lambda h: abs(h.y_at(xr)))
            for u, d in zip(up, down):
                u.component = d.component = comp
                comp += 1
    rest = [h for h in branches if h.component is None]
    for h in rest:
        if h.component is not None:
            continue
        target = (h.tangent_angle + math.pi) % (2 * math.pi)
        cands = [g for g in rest if g is not h and g.component is None
                 and abs((g.tangent_angle - target + math.pi) % (2 * math.pi) - math.pi) < 0.05]
        if len(cands) == 1:
            h.component = cands[0].component = comp
            comp += 1


def _resolvable(f: Polynomial, pts: np.ndarray) -> np.ndarray:
    vals = f(pts[:, 0], pts[:, 1])
    scale = abs_poly(f)(np.abs(pts[:, 0]), np.abs(pts[:, 1]))
    return vals, vals > 1e-9 * scale


def check_monotone_along_branch(branch, g: str = "coordinate_x", f: Polynomial | None = None) -> MonotonicityReport:
    """Check that ``g`` is strictly monotone along the samples of a half-branch.

    ``branch`` may be a :class:`HalfBranch` or a raw ``(n, 2)`` sample array
    (then ``f`` is needed for ``g="function_f"``).  For ``function_f`` only
    samples where the value is resolvable above rounding noise take part.
    """
    if isinstance(branch, HalfBranch):
        pts = np.asarray(branch.samples, dtype=float)
        f = f or branch.source
    else:
        pts = np.asarray(branch, dtype=float)
    idx = np.arange(len(pts))
    if g == "coordinate_x":
        vals = pts[:, 0]
    elif g == "squared_distance":
        vals = pts[:, 0] ** 2 + pts[:, 1] ** 2
    elif g == "function_f":
        if f is None:
            raise ValueError("function_f needs the polynomial")
        vals, ok = _resolvable(f, pts)
        ok[0] = True  # the origin, f = 0
        vals, idx = vals[ok], idx[ok]
    else:
        raise ValueError(f"unknown monotonicity target {g!r}")
    if len(vals) < 2:
        return MonotonicityReport(True, None, None, len(vals))
    d = np.diff(vals)
    if np.all(d > 0):
        return MonotonicityReport(True, "increasing", None, len(vals))
    if np.all(d < 0):
        return MonotonicityReport(True, "decreasing", None, len(vals))
    sign = 1 if d[0] > 0 else -1
    bad = int(np.nonzero(sign * d <= 0)[0][0])
    return MonotonicityReport(False, None, int(idx[bad + 1]), len(vals))


# -- vertical tangencies --------------------------------------------------------

def _newton2(f, fx, fy, fyx, fyy, eps, x, y, iters=60):
    """Solve f = eps, df/dy = 0 from (x, y)."""
    e = Fraction(eps)
    for _ in range(iters):
        r1 = float(f.evaluate_exact((x, y)) - e)
        r2 = fy.evaluate((x, y))
        sol = solve2(fx.evaluate((x, y)), fy.evaluate((x, y)), fyx.evaluate((x, y)), fyy.evaluate((x, y)), r1, r2)
        if sol is None:
            break
        dx, dy = sol
        x, y = x - dx, y - dy
        if not (math.isfinite(x) and math.isfinite(y)):
            return None
        if abs(dx) + abs(dy) <= 1e-15 * (1 + abs(x) + abs(y)):
            break
    return x, y


def _parity(f: Polynomial, eps: float, x: float, y: float, scale: float) -> str:
    """Even when the vertical line through the point stays on one side of the level near it."""
    e = Fraction(eps)
    g0 = abs(f.evaluate_exact((x, y)) - e)
    verdict = "even"
    for k in range(3, 10):
        d = scale * 10.0 ** (-k)
        up = f.evaluate_exact((x, y + d)) - e
        dn = f.evaluate_exact((x, y - d)) - e
        if min(abs(up), abs(dn)) <= 100 * g0:
            break
        verdict = "even" if (up > 0) == (dn > 0) else "odd"
    return verdict


def _polygon_candidates(curve: LevelCurve, fy: Polynomial):
    p = curve.points
    v = fy(p[:, 0], p[:, 1])
    w = np.roll(v, -1)
    q = np.roll(p, -1, axis=0)
    out = []
    for k in np.nonzero((np.sign(v) != np.sign(w)) | (v == 0))[0]:
        t = 0.0 if v[k] == w[k] else v[k] / (v[k] - w[k])
        out.append(p[k] + t * (q[k] - p[k]))
    return out


def _branch_candidates(branch: HalfBranch, f: Polynomial, eps: float):
    pts = branch.samples
    vals = f(pts[:, 0], pts[:, 1]) - eps
    vals[0] = -eps
    out = []
    for k in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        xa, xb = pts[k, 0], pts[k + 1, 0]
        for _ in range(80):
            xm = 0.5 * (xa + xb)
            if f.evaluate((xm, branch.y_at(xm))) <= eps:
                xa = xm
            else:
                xb = xm
        x = 0.5 * (xa + xb)
        out.append(np.array([x, branch.y_at(x)]))
    return out


def vertical_tangencies(curve: LevelCurve, f: Polynomial, branches: Sequence[HalfBranch] | None = None,
                        cfg: TraceConfig | None = None) -> list[TangencyPoint]:
    """Points of the level curve with a vertical tangent, sorted by x then y."""
    cfg = cfg or TraceConfig()
    eps = curve.epsilon
    r = curve.nbhd.radius
    fx, fy = f.derivative("x"), f.derivative("y")
    fyx, fyy = fy.derivative("x"), fy.derivative("y")
    cands = [(c, "polygon") for c in _polygon_candidates(curve, fy)]
    for hb in branches or ():
        cands += [(c, "branch") for c in _branch_candidates(hb, f, eps)]
    cell = curve.cell or 1e-3 * r
    found = []
    for c, origin in cands:
        sol = _newton2(f, fx, fy, fyx, fyy, eps, float(c[0]), float(c[1]))
        if sol is None or math.hypot(sol[0] - c[0], sol[1] - c[1]) > 8 * cell:
            if origin == "polygon":
                raise NewtonDiverged(f"tangency refinement from ({c[0]:.6g}, {c[1]:.6g}) diverged")
            continue
        found.append(sol)
    merge = cfg.merge_tol * r
    points: list[list] = []
    for p in found:
        for q in points:
            d = math.hypot(p[0] - q[0][0], p[1] - q[0][1])
            if d <= merge:
                if d > 1e-6 * merge:
                    warnings.warn(TangencyTooClose(f"tangencies {q[0]} and {p} merged"), stacklevel=2)
                    q[1] += 1
                break
        else:
            points.append([p, 1])
    out = []
    e = Fraction(eps)
    for (x, y), n in points:
        res = float(abs(f.evaluate_exact((x, y)) - e))
        par = _parity(f, eps, x, y, r)
        owner = None
        if branches:
            dists = [(hb.distance_to((x, y)), hb.id) for hb in branches]
            d, bid = min(dists)
            owner = bid if d <= 1e-6 else None
        out.append(TangencyPoint((x, y), par, owner, res, n))
    out.sort(key=lambda t: (t.x, t.y))
    return out
