"""JSON and SVG output, atomic file writes and run manifests."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import UsageError
from .geometry import fiber_intervals
from .reeb import ReebTree, ReebVertex

TREE_KEYS = ("id", "x", "y_repr", "kind", "preorder_class")


def _version() -> str:
    from . import __version__

    return __version__


def atomic_write(path, data: str | bytes) -> Path:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write(path, dumps(obj))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


# -- trees -------------------------------------------------------------------

def tree_to_dict(tree: ReebTree) -> dict:
    return {
        "vertices": [{k: getattr(v, k) for k in TREE_KEYS} for v in tree.vertices],
        "edges": [[int(a), int(b)] for a, b in tree.edges],
        "embedding": {str(k): list(v) for k, v in sorted(tree.embedding.items())},
        "root": tree.root_id,
    }


def tree_from_dict(data: dict) -> ReebTree:
    try:
        verts = [ReebVertex(int(v["id"]), float(v["x"]), float(v.get("y_repr", 0.0)), str(v["kind"]),
                            int(v["preorder_class"])) for v in data["vertices"]]
        edges = [(int(a), int(b)) for a, b in data["edges"]]
        emb = {int(k): [int(e) for e in lst] for k, lst in data["embedding"].items()}
        root = data.get("root")
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed tree JSON: {exc}") from exc
    for v in verts:
        if v.kind == "odd_flagged":
            v.parity = "odd"
    return ReebTree(verts, edges, emb, None if root is None else int(root))


def trees_equal(a: ReebTree, b: ReebTree) -> bool:
    return tree_to_dict(a) == tree_to_dict(b)


@dataclass
class RunManifest:
    command: str
    poly_text: str
    config: dict
    outputs: list = field(default_factory=list)
    tool_version: str = field(default_factory=_version)
    arguments: dict = field(default_factory=dict)

    def write(self, out_dir) -> Path:
        return write_json(Path(out_dir) / "manifest.json", asdict(self))


# -- SVG -----------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _edge_path(tree: ReebTree, e: int, curve, samples: int = 12) -> list[tuple[float, float]]:
    a, b = tree.edges[e]
    va, vb = tree.vertices[a], tree.vertices[b]
    pts = [(va.x, va.y_repr)]
    band = tree.bands[e] if tree.bands and e < len(tree.bands) else None
    if curve is not None and band and tree.critical:
        lo, hi = sorted((va.x, vb.x))
        for t in np.linspace(0, 1, samples + 2)[1:-1]:
            x = lo + t * (hi - lo)
            g = sum(1 for c0, c1 in tree.critical if c1 < x)
            js = [j for gg, j in band if gg == g]
            ivs = fiber_intervals(curve.points, x)
            if js and js[0] < len(ivs):
                y0, y1 = ivs[js[0]]
                pts.append((x, 0.5 * (y0 + y1)))
        if va.x > vb.x:
            pts[1:] = pts[1:][::-1]
    pts.append((vb.x, vb.y_repr))
    return pts


def _edge_lines(tree: ReebTree, curve):
    """Edge polylines; the two halves of an edge subdivided by the root are drawn as one."""
    r = tree.root_id
    joined = ()
    if r is not None and tree.vertices[r].kind == "root" and tree.degree(r) == 2:
        joined = tuple(tree.embedding[r])
    lines = []
    for e in range(len(tree.edges)):
        if e not in joined:
            lines.append(_edge_path(tree, e, curve))
    if joined:
        halves = []
        for e in joined:
            line = _edge_path(tree, e, curve)
            # orient each half away from the root
            halves.append(line if tree.edges[e][0] == r else line[::-1])
        a, b = sorted(halves, key=lambda h: h[-1][0])
        lines.append(a[::-1] + b[1:])
    return lines


def render_svg(curve, branches, tree: ReebTree, path, radius: float | None = None, stamp: bool = True) -> Path:
    """Draw the curve, dashed polar branches and the embedded tree into one SVG file."""
    if tree is None or not tree.vertices:
        raise UsageError("cannot render an empty tree")
    r = radius or (curve.nbhd.radius if curve is not None else max(abs(v.x) for v in tree.vertices) * 1.2)
    w = r / 300.0
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    if stamp:
        out.append(f"<!-- generated {datetime.now(timezone.utc).isoformat(timespec='seconds')} -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(-r)} {_fmt(-r)} {_fmt(2 * r)} {_fmt(2 * r)}" '
               f'width="600" height="600">')
    out.append('<g transform="scale(1,-1)">')
    out.append(f'<rect x="{_fmt(-r)}" y="{_fmt(-r)}" width="{_fmt(2 * r)}" height="{_fmt(2 * r)}" fill="white"/>')
    if curve is not None:
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in curve.points) + " Z"
        out.append(f'<path class="curve" d="{d}" fill="#eef3fb" stroke="#1f4e9c" stroke-width="{_fmt(w)}"/>')
    for hb in branches or ():
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in hb.samples)
        out.append(f'<polyline class="polar" points="{pts}" fill="none" stroke="#9c1f1f" '
                   f'stroke-width="{_fmt(w)}" stroke-dasharray="{_fmt(6 * w)} {_fmt(4 * w)}"/>')
    for line in _edge_lines(tree, curve):
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in line)
        out.append(f'<polyline class="tree-edge" points="{pts}" fill="none" stroke="black" stroke-width="{_fmt(1.5 * w)}"/>')
    for v in tree.vertices:
        is_root = v.id == tree.root_id
        out.append(f'<circle class="{"root" if is_root else "vertex"}" cx="{_fmt(v.x)}" cy="{_fmt(v.y_repr)}" '
                   f'r="{_fmt((6 if is_root else 4) * w)}" fill="{"#d62728" if is_root else "black"}"/>')
    out.append("</g>")
    out.append("</svg>")
    return atomic_write(path, "\n".join(out) + "\n")
