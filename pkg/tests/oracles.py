"""Independent reference computations used to check the library.

Nothing here imports the library: the oracles work from a sympy
expansion and a dense grid, a brute-force graph walk, a linear program, or
sympy.
"""

from __future__ import annotations

import random

import networkx as nx
import numpy as np
import sympy
from scipy.optimize import linprog

X, Y = sympy.symbols("x y")


def sympy_poly(text: str):
    """Expand the polynomial text with sympy (juxtaposition made explicit)."""
    import re

    t = text.replace("^", "**")
    t = re.sub(r"(?<=[0-9xy)])\s*(?=[xy(])", "*", t)
    return sympy.expand(sympy.sympify(t, locals={"x": X, "y": Y}))


def sympy_terms(expr) -> dict:
    poly = sympy.Poly(expr, X, Y)
    return {k: sympy.Rational(v) for k, v in poly.terms()}


def coefficient_matrix(text: str) -> np.ndarray:
    """Dense ``c[i, j]`` (coefficient of x^i y^j) from the sympy expansion."""
    p = sympy.Poly(sympy_poly(text), X, Y)
    dx, dy = p.degree(X), p.degree(Y)
    c = np.zeros((dx + 1, dy + 1))
    for (i, j), v in p.terms():
        c[i, j] = float(v)
    return c


def _runs(mask_col: np.ndarray):
    """(start, stop) row indices of the True runs in a boolean column."""
    d = np.diff(np.concatenate([[False], mask_col, [False]]).astype(np.int8))
    return list(zip(np.nonzero(d == 1)[0], np.nonzero(d == -1)[0]))


def grid_column_counts(text, eps, xlim, ylim, columns=1024, sub=5, rows=8192, chunk=256):
    """Per-column number of vertical runs of the origin's component of {f <= eps}.

    The component is found by a scanline flood fill (8-connected) on a grid
    ``sub`` times finer in x than the reported columns; thin slanted bands
    stay connected that way.  Reported columns are cell centres of a
    ``columns``-wide partition of ``xlim``.  Returns ``(xs, counts)``.
    """
    assert sub % 2 == 1, "odd supersampling keeps the reported columns on fine columns"
    c = coefficient_matrix(text)
    nfine = columns * sub
    xf = xlim[0] + (np.arange(nfine) + 0.5) * (xlim[1] - xlim[0]) / nfine
    ys = np.linspace(ylim[0], ylim[1], rows)
    runs = []  # per fine column, list of (start, stop)
    for k0 in range(0, nfine, chunk):
        F = np.polynomial.polynomial.polygrid2d(xf[k0:k0 + chunk], ys, c)
        for col in F <= eps:
            runs.append(_runs(col))
    # union-find over runs
    ids, base = [], 0
    for r in runs:
        ids.append(base)
        base += len(r)
    parent = list(range(base))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for k in range(nfine - 1):
        a, b = runs[k], runs[k + 1]
        i = j = 0
        while i < len(a) and j < len(b):
            # 8-connectivity: rows may touch diagonally
            if a[i][0] <= b[j][1] and b[j][0] <= a[i][1]:
                ra, rb = find(ids[k] + i), find(ids[k + 1] + j)
                parent[ra] = rb
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
    k0 = int(np.argmin(np.abs(xf)))
    j0 = int(np.argmin(np.abs(ys)))
    home = [n for n, (s0, s1) in enumerate(runs[k0]) if s0 <= j0 < s1]
    assert home, "origin is not inside {f <= eps} on the oracle grid"
    root = find(ids[k0] + home[0])
    pick = np.arange(columns) * sub + sub // 2
    counts = np.array([sum(find(ids[k] + n) == root for n in range(len(runs[k]))) for k in pick])
    return xf[pick], counts


def random_plane_tree(rng: random.Random, n_max=14, monotone_bias=0.6):
    """A random rooted tree as (parent map, class map, side map), root = 0.

    Classes are integers; with probability ``monotone_bias`` each child moves
    away from the root (the monotone case), otherwise anywhere.
    """
    n = rng.randint(2, n_max)
    parent = {0: None}
    cls = {0: 0}
    side = {0: None}
    for v in range(1, n):
        p = rng.randrange(v)
        parent[v] = p
        s = side[p] if p else rng.choice("LR")
        side[v] = s
        step = 1 if s == "R" else -1
        if rng.random() < monotone_bias:
            cls[v] = cls[p] + step * rng.randint(1, 3)
        else:
            cls[v] = cls[p] + rng.randint(-3, 3)
    return parent, cls, side


def brute_force_monotone(parent, cls) -> bool:
    """Walk every root-to-leaf path with networkx and test strict monotonicity."""
    g = nx.Graph()
    g.add_nodes_from(parent)
    g.add_edges_from((v, p) for v, p in parent.items() if p is not None)
    leaves = [v for v in g if g.degree(v) == 1 and v != 0]
    for leaf in leaves:
        path = nx.shortest_path(g, 0, leaf)
        c = [cls[v] for v in path]
        diffs = np.diff(c)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            return False
    return True


def chebyshev_centre(poly: np.ndarray):
    """Centre and radius of the largest disk inside all inner half-planes of a CCW polygon.

    A positive radius means the half-plane intersection has interior.
    """
    a = poly
    b = np.roll(poly, -1, axis=0)
    d = b - a
    n = np.column_stack([d[:, 1], -d[:, 0]])  # outward normals for CCW order
    norm = np.hypot(n[:, 0], n[:, 1])
    keep = norm > 0
    n, a, norm = n[keep], a[keep], norm[keep]
    A = np.column_stack([n, norm])
    rhs = np.einsum("ij,ij->i", n, a)
    res = linprog(c=[0, 0, -1], A_ub=A, b_ub=rhs, bounds=[(None, None), (None, None), (0, None)], method="highs")
    if not res.success:
        return None, 0.0
    return res.x[:2], float(res.x[2])


def sees_whole_polygon(poly: np.ndarray, centre, samples: int = 400) -> bool:
    """Rejection test: no sampled boundary point is hidden from ``centre``."""
    idx = np.linspace(0, len(poly) - 1, samples).astype(int)
    for k in idx:
        for t in (0.25, 0.5, 0.75, 0.95):
            p = centre + t * (poly[k] - centre)
            if not point_in_polygon(poly, p):
                return False
    return True


def point_in_polygon(poly: np.ndarray, p) -> bool:
    """Even-odd ray casting."""
    x, y = p
    a = poly
    b = np.roll(poly, -1, axis=0)
    cond = (a[:, 1] > y) != (b[:, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
    return bool(np.count_nonzero(cond & (x < xc)) % 2)
