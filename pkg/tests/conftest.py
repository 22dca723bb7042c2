import functools

import numpy as np
import pytest

from curvetree import Polynomial, TraceConfig, analyze_level, good_neighbourhood

SUITE = {
    "circle": "x^2 + y^2",
    "banana": "x^2 + (y^2 - x)^2",
    "bone": "x^16 + (y^2 + x)^2 (y^2 - x)^2",
    "double_banana": "x^6 + (y^4 + y^2 - x)^2 (y^2 - x)^2",
    "deformed": "x^2 + (x - y^3 - y^2)^2 (x - y^2)^2",
    "acnode": "y^2 - x^3 + x^2",
}

# ten levels per function, all inside the chosen neighbourhood
LEVELS = {
    "circle": list(np.geomspace(0.1, 1e-6, 10)),
    "banana": list(np.geomspace(0.1, 1e-5, 10)),
    "bone": [1e-4 * 0.5**k for k in range(10)],
    "double_banana": [1e-3 * 0.5**k for k in range(10)],
    "deformed": list(np.geomspace(5e-4, 1e-5, 10)),
    "acnode": list(np.geomspace(0.05, 1e-5, 10)),
}


@functools.lru_cache(maxsize=None)
def poly(name):
    return Polynomial.parse(SUITE[name])


@functools.lru_cache(maxsize=None)
def nbhd(name, grid_n=512):
    return good_neighbourhood(poly(name), TraceConfig(grid_n=grid_n))


@functools.lru_cache(maxsize=None)
def analysis(name, eps, grid_n=512):
    cfg = TraceConfig(grid_n=grid_n)
    return analyze_level(poly(name), float(eps), cfg, nbhd(name))


@pytest.fixture
def cfg():
    return TraceConfig()


def plane_tree(xs, edges, root=None, spans=None):
    """Hand-built ReebTree: vertex abscissae, undirected edges, optional root.

    Heights are spread so straight edges do not cross; the embedding lists
    each vertex's edges by angle.
    """
    from curvetree.reeb import ReebTree, ReebVertex, _assign_classes

    n = len(xs)
    ys = [0.0] * n
    adj = {v: [] for v in range(n)}
    for e, (a, b) in enumerate(edges):
        adj[a].append(e)
        adj[b].append(e)
    # children fan out vertically, so each subtree gets its own height band
    start = root if root is not None else 0
    seen, stack = {start}, [(start, 0.0, 1.0)]
    while stack:
        u, y, h = stack.pop()
        ys[u] = y
        kids = [b if a == u else a for a, b in (edges[e] for e in adj[u])]
        kids = [w for w in kids if w not in seen]
        for k, w in enumerate(kids):
            seen.add(w)
            stack.append((w, y + h * (k - (len(kids) - 1) / 2), h / (len(kids) + 1)))
    verts = [ReebVertex(v, float(xs[v]), ys[v], "internal", 0, (spans or {}).get(v, ())) for v in range(n)]
    emb = {}
    for v in range(n):
        def angle(e, v=v):
            a, b = edges[e]
            w = b if a == v else a
            return np.arctan2(ys[w] - ys[v], xs[w] - xs[v])
        emb[v] = sorted(adj[v], key=angle)
    for v in verts:
        if len(adj[v.id]) == 1:
            v.kind = "leaf"
    t = ReebTree(verts, [tuple(e) for e in edges], emb, root, tau=1e-12)
    if root is not None:
        verts[root].kind = "root"
    _assign_classes(t)
    return t


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, TITLES
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(TITLES):
        status, detail = RESULTS.get(n, ("NOT RUN", ""))
        terminalreporter.write_line(f"criterion {n} {status}: {TITLES[n]}" + (f" ({detail})" if detail else ""))
