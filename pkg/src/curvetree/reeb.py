"""Poincaré-Reeb trees of the disk bounded by a level curve, for the projection (x, y) -> x."""

from __future__ import annotations

import copy
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._numeric import real_roots
from .config import TraceConfig
from .errors import EventMismatch, OriginOnCriticalFiber, Unrooted
from .geometry import fiber_intervals
from .polar import TangencyPoint
from .trace import LevelCurve

KINDS = ("leaf", "internal", "odd_flagged", "root")


@dataclass
class ReebVertex:
    id: int
    x: float
    y_repr: float
    kind: str
    preorder_class: int = 0
    y_span: tuple = ()
    parity: str = "even"


@dataclass
class ReebTree:
    vertices: list
    edges: list
    embedding: dict
    root_id: Optional[int] = None
    tau: float = 0.0
    # per edge, the (gap index, band index) pairs it occupies in the sweep
    bands: list = field(default_factory=list)
    epsilon: Optional[float] = None
    critical: list = field(default_factory=list)  # x-span of each critical class

    def vertex(self, vid: int) -> ReebVertex:
        return self.vertices[vid]

    def neighbours(self, vid: int) -> list[int]:
        out = []
        for e in self.embedding.get(vid, []):
            a, b = self.edges[e]
            out.append(b if a == vid else a)
        return out

    def degree(self, vid: int) -> int:
        return len(self.embedding.get(vid, []))

    def leaves(self) -> list[int]:
        return [v.id for v in self.vertices if self.degree(v.id) == 1 and v.id != self.root_id]

    def band_count(self, x: float) -> int:
        """Number of edges whose x-range strictly contains ``x``."""
        n = 0
        for a, b in self.edges:
            lo, hi = sorted((self.vertices[a].x, self.vertices[b].x))
            n += lo < x < hi
        return n


@dataclass
class ValidationReport:
    connected: bool
    acyclic: bool
    euler: int
    transverse: bool
    planar: bool
    leaves_even: bool
    odd_valency_two: bool
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class GeodesicReport:
    ok: bool
    geodesics: int
    violations: list  # (leaf id, index along the path of the first failure)

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None


@dataclass
class CodeOptions:
    drop_odd: bool = False


# -- preorder ----------------------------------------------------------------

def preorder_classes(xs: Sequence[float], tau: float) -> list[int]:
    """Dense ranks of ``xs`` (starting at 1) with chains closer than ``tau`` tied."""
    order = sorted(range(len(xs)), key=lambda k: xs[k])
    ranks = [0] * len(xs)
    rank, prev = 0, None
    for k in order:
        if prev is None or xs[k] - prev > tau:
            rank += 1
        ranks[k] = rank
        prev = xs[k]
    return ranks


def _group_classes(tangencies, tau):
    xs = [t.x for t in tangencies]
    ranks = preorder_classes(xs, tau)
    groups: dict = {}
    for t, k in zip(tangencies, ranks):
        groups.setdefault(k, []).append(t)
    return [groups[k] for k in sorted(groups)]


# -- fibres ------------------------------------------------------------------

class _Fibres:
    """Vertical fibres of the sub-level disk {f <= eps} bounded by a traced curve."""

    def __init__(self, curve: LevelCurve):
        self.f = curve.poly
        self.eps = curve.epsilon
        self.pts = curve.points
        self.slack = 4 * (curve.cell or 1e-3 * curve.nbhd.radius)

    def _below(self, x0, y) -> bool:
        v = self.f.evaluate((x0, y)) - self.eps
        if abs(v) < 1e-9 * self.eps:
            return self.f.evaluate_exact((x0, y)) <= Fraction(self.eps)
        return v <= 0

    def _near_curve(self, x0, y1, y2) -> bool:
        s = self.slack
        for a, b in fiber_intervals(self.pts, x0):
            if a - s <= y2 and y1 <= b + s:
                return True
        p = self.pts
        near = np.abs(p[:, 0] - x0) <= s
        if not np.any(near):
            return False
        ys = p[near, 1]
        return bool(np.any((ys >= y1 - s) & (ys <= y2 + s)))

    def __call__(self, x0: float) -> list[tuple[float, float]]:
        c = self.f.coefficients_in_y(x0)
        c[-1] -= self.eps
        ys = real_roots(c)
        out: list[list[float]] = []
        for a, b in zip(ys[:-1], ys[1:]):
            if not self._below(x0, 0.5 * (a + b)):
                continue
            if out and out[-1][1] == a:
                out[-1][1] = b  # a double root inside the fibre
            else:
                out.append([a, b])
        return [(a, b) for a, b in out if self._near_curve(x0, a, b)]


def _overlap(p, q) -> bool:
    return p[0] <= q[1] and q[0] <= p[1]


# -- construction ------------------------------------------------------------

def build_reeb(curve: LevelCurve, tangencies: Sequence[TangencyPoint], cfg: TraceConfig | None = None) -> ReebTree:
    """Sweep the critical abscissae and contract each vertical fibre segment.

    Between consecutive critical classes the fibres form bands, one edge each;
    at a class, fibres just left and right of it are matched by overlap and
    every connected group holding a tangency becomes a vertex.
    """
    cfg = cfg or TraceConfig()
    if not tangencies:
        raise EventMismatch("no vertical tangencies, the sweep has no events")
    tau = cfg.tau_x * curve.nbhd.radius
    fib = _Fibres(curve)
    classes = _group_classes(sorted(tangencies, key=lambda t: (t.x, t.y)), tau)
    spans = [(min(t.x for t in g), max(t.x for t in g)) for g in classes]
    m = len(classes)
    width = spans[-1][1] - spans[0][0]
    # gaps[k] sits between class k-1 and class k; gaps 0 and m are outside
    gap_w = [width] + [spans[k][0] - spans[k - 1][1] for k in range(1, m)] + [width]
    mids = [None] + [0.5 * (spans[k - 1][1] + spans[k][0]) for k in range(1, m)] + [None]
    counts = [0] + [len(fib(mids[k])) for k in range(1, m)] + [0]

    def sample(x_edge, direction, gap):
        for div in (4, 16, 64, 256, 2):
            d = min(gap_w[gap] / div, 1e-3 * curve.nbhd.radius)
            ivs = fib(x_edge + direction * d)
            if len(ivs) == counts[gap]:
                return ivs
        raise EventMismatch(
            f"fibre count next to x={x_edge:.12g} does not match the {counts[gap]} bands of the adjacent gap")

    vertices: list[ReebVertex] = []
    left_end: dict = {}   # (gap, j) -> vertex at the left end of that band
    right_end: dict = {}
    chain: dict = {}      # (gap, j) -> (gap-1, j') when a band passes through a class
    for k, group in enumerate(classes):
        lo, hi = spans[k]
        left = sample(lo, -1, k)
        right = sample(hi, +1, k + 1)
        comps = _overlap_components(left, right)
        cspan = [(min([left[i][0] for i in L] + [right[j][0] for j in R]),
                  max([left[i][1] for i in L] + [right[j][1] for j in R])) for L, R in comps]
        owned: list[list] = [[] for _ in comps]
        for t in group:
            d = [max(lo_ - t.y, t.y - hi_, 0.0) for lo_, hi_ in cspan]
            c = int(np.argmin(d)) if d else -1
            if c < 0 or d[c] > fib.slack:
                raise EventMismatch(f"tangency ({t.x:.12g}, {t.y:.12g}) is not on any event fibre")
            owned[c].append(t)
        for (L, R), inside in zip(comps, owned):
            if not inside:
                if len(L) == 1 and len(R) == 1:
                    chain[(k + 1, R[0])] = (k, L[0])
                    continue
                raise EventMismatch(f"fibres change near x={lo:.12g} without a tangency")
            vid = len(vertices)
            parity = "odd" if all(t.parity == "odd" for t in inside) else "even"
            x = sum(t.x for t in inside) / len(inside)
            seg = _event_segment(fib, x, inside)
            vertices.append(ReebVertex(vid, x, 0.5 * (seg[0] + seg[1]), "internal", 0, seg, parity))
            for i in L:
                right_end[(k, i)] = vid
            for j in R:
                left_end[(k + 1, j)] = vid
    # follow pass-through chains to assemble edges
    edges: list[tuple[int, int]] = []
    bands: list[list] = []
    for key, u in sorted(left_end.items()):
        path = [key]
        cur = key
        while cur not in right_end:
            nxt = [a for a, b in chain.items() if b == cur]
            if len(nxt) != 1:
                raise EventMismatch(f"band {cur} has no right end")
            cur = nxt[0]
            path.append(cur)
        edges.append((u, right_end[cur]))
        bands.append(path)
    emb = _embedding(vertices, edges, bands, fib)
    for v in vertices:
        deg = len(emb[v.id])
        v.kind = "leaf" if deg == 1 else ("odd_flagged" if v.parity == "odd" else "internal")
    tree = ReebTree(vertices, edges, emb, None, tau, bands, curve.epsilon, list(spans))
    _assign_classes(tree)
    return tree


def _overlap_components(left, right):
    n = len(left)
    parent = list(range(n + len(right)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, p in enumerate(left):
        for j, q in enumerate(right):
            if _overlap(p, q):
                parent[find(i)] = find(n + j)
    comps: dict = {}
    for i in range(n + len(right)):
        comps.setdefault(find(i), ([], []))
        if i < n:
            comps[find(i)][0].append(i)
        else:
            comps[find(i)][1].append(i - n)
    return sorted(comps.values(), key=lambda lr: (lr[0] + [-1])[0] * 1000 + (lr[1] + [-1])[0])


def _event_segment(fib: _Fibres, x: float, inside) -> tuple:
    ys = [t.y for t in inside]
    for a, b in fib(x):
        if a - fib.slack <= min(ys) and max(ys) <= b + fib.slack:
            return (a, b)
    return (min(ys), max(ys))


def _embedding(vertices, edges, bands, fib) -> dict:
    """Incident edges of each vertex, counterclockwise starting from south.

    Right-hand edges come first by increasing height, then left-hand edges by
    decreasing height.
    """
    emb: dict = {v.id: [] for v in vertices}
    for e, (a, b) in enumerate(edges):
        emb[a].append(e)
        emb[b].append(e)
    for v in vertices:
        def key(e):
            a, b = edges[e]
            if a == v.id:  # edge leaves to the right; its first band
                return (0, bands[e][0][1])
            return (1, -bands[e][-1][1])
        emb[v.id].sort(key=key)
    return emb


def _assign_classes(tree: ReebTree):
    ranks = preorder_classes([v.x for v in tree.vertices], tree.tau)
    for v, k in zip(tree.vertices, ranks):
        v.preorder_class = k


# -- validation --------------------------------------------------------------

def validate_tree(tree: ReebTree) -> ValidationReport:
    V, E = len(tree.vertices), len(tree.edges)
    failures = []
    adj: dict = {v.id: set() for v in tree.vertices}
    for a, b in tree.edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = set()
    if V:
        stack = [tree.vertices[0].id]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(adj[u] - seen)
    connected = len(seen) == V and V > 0
    euler = V - E
    acyclic = connected and euler == 1 and len({tuple(sorted(e)) for e in tree.edges}) == E
    if not connected:
        failures.append("graph is not connected")
    if euler != 1:
        failures.append(f"Euler characteristic V - E = {euler}, expected 1")
    if not acyclic:
        failures.append("graph has a cycle")
    cls = {v.id: v.preorder_class for v in tree.vertices}
    bad = [e for e in tree.edges if cls[e[0]] == cls[e[1]]]
    transverse = not bad
    if bad:
        failures.append(f"edges joining equal preorder classes: {bad}")
    planar = _planar(tree)
    if not planar:
        failures.append("embedding is not planar")
    deg = {v.id: len(adj[v.id]) for v in tree.vertices}
    leaves_even = all(v.parity == "even" for v in tree.vertices if deg[v.id] == 1 and v.kind != "root")
    if not leaves_even:
        failures.append("a leaf comes from an odd tangency")
    odd2 = all(deg[v.id] == 2 for v in tree.vertices if v.kind == "odd_flagged")
    if not odd2:
        failures.append("an odd vertex does not have valency 2")
    return ValidationReport(connected, acyclic, euler, transverse, planar, leaves_even, odd2, failures)


def _planar(tree: ReebTree) -> bool:
    """Check the stacking of edges is consistent with an x-monotone drawing."""
    if tree.bands and len(tree.bands) == len(tree.edges):
        per_gap: dict = {}
        for e, path in enumerate(tree.bands):
            for g, j in path:
                per_gap.setdefault(g, []).append((j, e))
        # consecutive gaps must keep the relative order of edges they share
        for g in per_gap:
            if g + 1 not in per_gap:
                continue
            a = {e: j for j, e in per_gap[g]}
            b = {e: j for j, e in per_gap[g + 1]}
            common = sorted(set(a) & set(b), key=lambda e: a[e])
            if [b[e] for e in common] != sorted(b[e] for e in common):
                return False
        return True
    # no sweep data: draw straight segments through (x, y_repr)
    pts = {v.id: (v.x, v.y_repr) for v in tree.vertices}
    segs = [(pts[a], pts[b], {a, b}) for a, b in tree.edges]
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if segs[i][2] & segs[j][2]:
                continue
            if _segments_cross(segs[i][0], segs[i][1], segs[j][0], segs[j][1]):
                return False
    return True


def _segments_cross(p1, p2, q1, q2) -> bool:
    def o(a, b, c):
        d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (d > 0) - (d < 0)

    return o(p1, p2, q1) * o(p1, p2, q2) < 0 and o(q1, q2, p1) * o(q1, q2, p2) < 0


# -- rooting and coding ------------------------------------------------------

def root_tree(tree: ReebTree, curve: LevelCurve | None = None) -> ReebTree:
    """Return a copy of ``tree`` rooted at the image of the origin."""
    t = copy.deepcopy(tree)
    for v in t.vertices:
        if v.kind == "root":
            v.kind = "internal"
    for v in t.vertices:
        if abs(v.x) <= t.tau and v.y_span and v.y_span[0] <= 0.0 <= v.y_span[1]:
            warnings.warn(OriginOnCriticalFiber(f"origin lies on the critical fibre of vertex {v.id}"), stacklevel=2)
            t.root_id = v.id
            _assign_classes(t)
            return t
    candidates = []
    for e, (a, b) in enumerate(t.edges):
        xa, xb = t.vertices[a].x, t.vertices[b].x
        if min(xa, xb) < 0.0 < max(xa, xb):
            candidates.append(e)
    if curve is not None and len(candidates) > 1:
        candidates = _edges_through_origin(t, curve, candidates)
    elif len(candidates) > 1:
        # without the curve, use the band heights recorded at the vertices
        candidates = [e for e in candidates if _straight_contains_origin(t, e)] or candidates[:1]
    if len(candidates) != 1:
        raise EventMismatch(f"cannot locate the band of the origin ({len(candidates)} candidates)")
    e = candidates[0]
    u, w = t.edges[e]
    if t.vertices[u].x > t.vertices[w].x:
        u, w = w, u
    rid = len(t.vertices)
    y0 = 0.0
    seg = ()
    if curve is not None:
        for a, b in _Fibres(curve)(0.0):
            if a <= 0.0 <= b:
                seg, y0 = (a, b), 0.5 * (a + b)
    t.vertices.append(ReebVertex(rid, 0.0, y0, "root", 0, seg, "even"))
    t.edges[e] = (u, rid)
    t.edges.append((rid, w))
    new = len(t.edges) - 1
    if t.bands and len(t.bands) == len(t.edges) - 1:
        t.bands.append(list(t.bands[e]))
    t.embedding[w] = [new if k == e else k for k in t.embedding[w]]
    t.embedding[rid] = [new, e]
    t.root_id = rid
    _assign_classes(t)
    return t


def _edges_through_origin(t: ReebTree, curve: LevelCurve, candidates):
    fib = _Fibres(curve)
    ivs = fib(0.0)
    j = [k for k, (a, b) in enumerate(ivs) if a <= 0.0 <= b]
    if len(j) != 1:
        return []
    # bands through x = 0 stacked bottom to top, matching interval order
    through = sorted(candidates, key=lambda e: _band_height(t, e))
    if len(through) != len(ivs):
        return []
    return [through[j[0]]]


def _band_height(t: ReebTree, e: int):
    if t.bands and e < len(t.bands) and t.critical:
        g0 = sum(1 for lo, hi in t.critical if hi < 0.0)
        for g, j in t.bands[e]:
            if g == g0:
                return j
    a, b = t.edges[e]
    return 0.5 * (t.vertices[a].y_repr + t.vertices[b].y_repr)


def _straight_contains_origin(t: ReebTree, e: int) -> bool:
    a, b = (t.vertices[k] for k in t.edges[e])
    s = (0.0 - a.x) / (b.x - a.x)
    y = a.y_repr + s * (b.y_repr - a.y_repr)
    return abs(y) <= 1e-9 + 1e-6 * max(abs(a.y_repr), abs(b.y_repr))


def _sides(tree: ReebTree) -> dict:
    """Side letter of each non-root vertex: the root edge its subtree hangs from."""
    r = tree.root_id
    root = tree.vertices[r]
    side = {}
    for e in tree.embedding[r]:
        a, b = tree.edges[e]
        child = b if a == r else a
        letter = "L" if tree.vertices[child].x < root.x else "R"
        stack = [(child, r)]
        while stack:
            u, p = stack.pop()
            side[u] = letter
            stack.extend((w, u) for w in tree.neighbours(u) if w != p)
    return side


def _children_in_order(tree: ReebTree, u: int, parent_edge: Optional[int]):
    emb = tree.embedding[u]
    if parent_edge is None:
        # start from north: left edges top to bottom, then right edges bottom to top
        lefts = [e for e in emb if tree.vertices[_other(tree, e, u)].x < tree.vertices[u].x]
        rights = [e for e in emb if e not in lefts]
        order = lefts + rights
    else:
        k = emb.index(parent_edge)
        order = emb[k + 1:] + emb[:k]
    return [(e, _other(tree, e, u)) for e in order]


def _other(tree, e, u):
    a, b = tree.edges[e]
    return b if a == u else a


def drop_odd_vertices(tree: ReebTree) -> ReebTree:
    """Remove valency-two odd vertices, joining their two edges."""
    t = copy.deepcopy(tree)
    while True:
        target = next((v for v in t.vertices if v.kind == "odd_flagged" and len(t.embedding[v.id]) == 2), None)
        if target is None:
            break
        e1, e2 = t.embedding[target.id]
        a = _other(t, e1, target.id)
        b = _other(t, e2, target.id)
        t.edges[e1] = (a, b) if t.vertices[a].x <= t.vertices[b].x else (b, a)
        t.embedding[b] = [e1 if k == e2 else k for k in t.embedding[b]]
        t = _remove(t, target.id, e2)
    _assign_classes(t)
    return t


def _remove(t: ReebTree, vid: int, eid: int) -> ReebTree:
    vmap = {v.id: k for k, v in enumerate(w for w in t.vertices if w.id != vid)}
    emap = {e: k for k, e in enumerate(e for e in range(len(t.edges)) if e != eid)}
    vertices = []
    for v in t.vertices:
        if v.id != vid:
            v = copy.copy(v)
            v.id = vmap[v.id]
            vertices.append(v)
    edges = [(vmap[a], vmap[b]) for e, (a, b) in enumerate(t.edges) if e != eid]
    emb = {vmap[u]: [emap[e] for e in lst] for u, lst in t.embedding.items() if u != vid}
    bands = [b for e, b in enumerate(t.bands) if e != eid] if len(t.bands) == len(t.edges) else []
    root = vmap.get(t.root_id) if t.root_id is not None else None
    return ReebTree(vertices, edges, emb, root, t.tau, bands, t.epsilon, list(t.critical))


def canonical_code(tree: ReebTree, opts: CodeOptions | None = None) -> str:
    """Encode the rooted plane tree with sides and relative preorder classes.

    See ``docs/tree-code.md`` for the grammar.
    """
    opts = opts or CodeOptions()
    if tree.root_id is None:
        raise Unrooted("canonical_code needs a rooted tree")
    t = drop_odd_vertices(tree) if opts.drop_odd else tree
    side = _sides(t)
    c0 = t.vertices[t.root_id].preorder_class

    def enc(u, parent_edge):
        parts = []
        for e, w in _children_in_order(t, u, parent_edge):
            v = t.vertices[w]
            rel = v.preorder_class - c0 if side[w] == "R" else c0 - v.preorder_class
            mark = "o" if v.kind == "odd_flagged" else ""
            parts.append(f"({side[w]}[{rel}]{mark}{enc(w, e)})")
        return "".join(parts)

    return "R" + enc(t.root_id, None)


def check_geodesic_monotonicity(tree: ReebTree) -> GeodesicReport:
    """Preorder classes must strictly increase (right) or decrease (left) from the root to every leaf."""
    if tree.root_id is None:
        raise Unrooted("geodesic monotonicity needs a rooted tree")
    r = tree.root_id
    cls = {v.id: v.preorder_class for v in tree.vertices}
    violations = []
    count = 0
    stack = [(r, None, [r])]
    while stack:
        u, parent, path = stack.pop()
        kids = [w for w in tree.neighbours(u) if w != parent]
        if not kids and u != r:
            count += 1
            c = [cls[p] for p in path]
            sign = 1 if c[1] > c[0] else -1
            for k in range(1, len(c)):
                if sign * (c[k] - c[k - 1]) <= 0:
                    violations.append((u, k))
                    break
        for w in kids:
            stack.append((w, u, path + [w]))
    violations.sort()
    return GeodesicReport(not violations, count, violations)


def tree_summary(tree: ReebTree) -> dict:
    deg = {v.id: tree.degree(v.id) for v in tree.vertices}
    return {
        "vertices": len(tree.vertices),
        "edges": len(tree.edges),
        "leaves": sum(1 for v in tree.vertices if deg[v.id] == 1 and v.id != tree.root_id),
        "odd": sum(1 for v in tree.vertices if v.kind == "odd_flagged"),
    }
