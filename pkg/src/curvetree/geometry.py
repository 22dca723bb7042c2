"""Planar polygon primitives used by tracing and shape analysis.

Polygons are ``(n, 2)`` float arrays listing vertices once (the closing edge
from the last vertex back to the first is implicit).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def winding_number(pts: np.ndarray, point=(0.0, 0.0)) -> int:
    """Winding number of the closed polygon about ``point``."""
    px, py = float(point[0]), float(point[1])
    a = pts - (px, py)
    b = np.roll(a, -1, axis=0)
    cross = a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]
    up = (a[:, 1] <= 0) & (b[:, 1] > 0) & (cross > 0)
    down = (a[:, 1] > 0) & (b[:, 1] <= 0) & (cross < 0)
    return int(np.sum(up) - np.sum(down))


def contains(pts: np.ndarray, point) -> bool:
    return winding_number(pts, point) != 0


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (ax, ay, bx, by, cx, cy))
    d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (d > 0) - (d < 0)


def _orient(a, b, c) -> np.ndarray:
    """Sign of the orientation of triangles (a, b, c), rows broadcast.

    Near-degenerate cases are re-decided in exact rational arithmetic.
    """
    d = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
    mag = (np.abs(b[..., 0] - a[..., 0]) * np.abs(c[..., 1] - a[..., 1])
           + np.abs(b[..., 1] - a[..., 1]) * np.abs(c[..., 0] - a[..., 0]))
    s = np.sign(d).astype(int)
    unsure = np.abs(d) <= 1e-12 * mag
    if np.any(unsure):
        a_, b_, c_ = np.broadcast_arrays(a, b, c)
        for idx in zip(*np.nonzero(unsure)) if s.ndim else [()]:
            s[idx] = _orient_exact(*a_[idx], *b_[idx], *c_[idx])
    return s


def find_self_intersection(pts: np.ndarray):
    """Return an intersecting pair of non-adjacent edge indices, or ``None``.

    Edge ``i`` joins vertex ``i`` to vertex ``i + 1 (mod n)``.  Candidate pairs
    are pruned by sorting edges on their x-extent.
    """
    n = len(pts)
    if n < 4:
        return None
    a = pts
    b = np.roll(pts, -1, axis=0)
    xmin = np.minimum(a[:, 0], b[:, 0])
    xmax = np.maximum(a[:, 0], b[:, 0])
    ymin = np.minimum(a[:, 1], b[:, 1])
    ymax = np.maximum(a[:, 1], b[:, 1])
    order = np.argsort(xmin, kind="stable")
    sorted_xmin = xmin[order]
    for k, i in enumerate(order):
        stop = np.searchsorted(sorted_xmin, xmax[i], side="right")
        cand = order[k + 1:stop]
        if cand.size == 0:
            continue
        cand = cand[(ymin[cand] <= ymax[i]) & (ymax[cand] >= ymin[i])]
        # adjacent edges share a vertex by construction
        cand = cand[(cand != (i + 1) % n) & (cand != (i - 1) % n)]
        if cand.size == 0:
            continue
        p1, p2 = a[i], b[i]
        q1, q2 = a[cand], b[cand]
        o1 = _orient(p1[None, :], p2[None, :], q1)
        o2 = _orient(p1[None, :], p2[None, :], q2)
        o3 = _orient(q1, q2, p1[None, :])
        o4 = _orient(q1, q2, p2[None, :])
        hit = (o1 * o2 <= 0) & (o3 * o4 <= 0)
        # collinear disjoint segments produce all-zero orientations
        collinear = (o1 == 0) & (o2 == 0)
        if np.any(collinear & hit):
            for j in cand[collinear & hit]:
                if not _collinear_overlap(p1, p2, a[j], b[j]):
                    hit[np.nonzero(cand == j)[0]] = False
        if np.any(hit):
            j = int(cand[np.nonzero(hit)[0][0]])
            return (int(min(i, j)), int(max(i, j)))
    return None


def _collinear_overlap(p1, p2, q1, q2) -> bool:
    axis = 0 if abs(p2[0] - p1[0]) >= abs(p2[1] - p1[1]) else 1
    lo1, hi1 = sorted((p1[axis], p2[axis]))
    lo2, hi2 = sorted((q1[axis], q2[axis]))
    return lo1 <= hi2 and lo2 <= hi1


def fiber_intervals(pts: np.ndarray, x0: float) -> list[tuple[float, float]]:
    """Intervals of ``{y : (x0, y) inside polygon}`` sorted by height."""
    a = pts
    b = np.roll(pts, -1, axis=0)
    crosses = (a[:, 0] <= x0) != (b[:, 0] <= x0)
    if not np.any(crosses):
        return []
    a, b = a[crosses], b[crosses]
    t = (x0 - a[:, 0]) / (b[:, 0] - a[:, 0])
    ys = np.sort(a[:, 1] + t * (b[:, 1] - a[:, 1]))
    return [(float(ys[k]), float(ys[k + 1])) for k in range(0, len(ys) - 1, 2)]


def convex_hull_indices(pts: np.ndarray) -> list[int]:
    """Indices of the convex hull vertices in counterclockwise order.

    Andrew's monotone chain; collinear boundary points are dropped.
    """
    n = len(pts)
    if n < 3:
        return list(range(n))
    order = sorted(range(n), key=lambda k: (pts[k, 0], pts[k, 1]))

    def cross(o, a, b):
        return (pts[a, 0] - pts[o, 0]) * (pts[b, 1] - pts[o, 1]) - (pts[a, 1] - pts[o, 1]) * (pts[b, 0] - pts[o, 0])

    lower: list[int] = []
    for k in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], k) <= 0:
            lower.pop()
        lower.append(k)
    upper: list[int] = []
    for k in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], k) <= 0:
            upper.pop()
        upper.append(k)
    return lower[:-1] + upper[:-1]


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from points ``p`` (rows) to the segment ``[a, b]``."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(*(p - a).T)
    t = np.clip(((p - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(*(p - proj).T)


def polyline_distance(point, polyline: np.ndarray) -> float:
    """Distance from one point to an open polyline."""
    p = np.asarray(point, dtype=float)
    a = polyline[:-1]
    b = polyline[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom == 0, 1.0, denom)
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return float(np.min(np.hypot(*(p - proj).T)))
