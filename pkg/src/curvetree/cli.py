"""Command line interface: ``curvetree {analyze,stabilize,render,polar,kernel}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import TraceConfig
from .errors import CurveTreeError, GeometryError, UsageError
from .io import RunManifest, dumps, render_svg, tree_to_dict, write_json
from .pipeline import analyze_level
from .polar import check_monotone_along_branch, polar_curve, polar_half_branches, vertical_tangencies
from .poly import format_polynomial, parse_polynomial
from .reeb import check_geodesic_monotonicity, tree_summary
from .shape import classify_minimum
from .stabilize import asymptotic_tree, epsilon_ladder
from .trace import good_neighbourhood, trace_level, verify_jordan

EXIT_OK, EXIT_USAGE, EXIT_GEOMETRY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _shared(p: argparse.ArgumentParser, eps_required: bool):
    p.add_argument("--poly", required=True, help="polynomial in x and y, e.g. 'x^2 + (y^2 - x)^2'")
    p.add_argument("--eps", type=float, required=eps_required, help="level value")
    p.add_argument("--grid", type=int, help="grid cells per side (default 512)")
    p.add_argument("--nbhd", type=float, help="use this neighbourhood radius instead of the candidate ladder")
    p.add_argument("--config", type=Path, help="key=value configuration file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--json", action="store_true", help="also print the main JSON result to stdout")
    p.add_argument("--svg", action="store_true", help="also write an SVG drawing")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvetree", description="Poincaré-Reeb trees of small level curves near a strict minimum.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("analyze", help="trace one level and report its tree and shape")
    _shared(p, True)
    p = sub.add_parser("stabilize", help="run a ladder of levels and detect the asymptotic tree")
    _shared(p, False)
    p.add_argument("--eps-start", type=float, default=0.1)
    p.add_argument("--ratio", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--drop-odd", action="store_true", help="ignore odd tangency vertices in the codes")
    p = sub.add_parser("render", help="draw curve, polar branches and tree as SVG")
    _shared(p, True)
    p = sub.add_parser("polar", help="polar curve and its half-branches")
    _shared(p, False)
    p = sub.add_parser("kernel", help="star-domain kernel of one level")
    _shared(p, True)
    return parser


def _config(args) -> TraceConfig:
    cfg = TraceConfig.from_file(args.config) if args.config else TraceConfig()
    if args.grid is not None:
        cfg = cfg.replace(grid_n=args.grid)
    if args.nbhd is not None:
        if not args.nbhd > 0:
            raise UsageError("--nbhd must be positive")
        cfg = cfg.replace(nbhd_candidates=(args.nbhd,))
    return cfg


def _eps(args):
    if args.eps is not None and not args.eps > 0:
        raise UsageError("--eps must be positive")
    return args.eps


def _finish(args, cfg, outputs, main_obj):
    # outputs are listed relative to --out so reruns elsewhere give the same manifest
    rel = [Path(p).relative_to(args.out).as_posix() for p in outputs]
    manifest = RunManifest(args.command, args.poly, cfg.to_dict(), rel,
                           arguments={k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
                                      if k not in ("poly", "command", "out")})
    manifest.write(args.out)
    if args.json:
        sys.stdout.write(dumps(main_obj))


def _tangency_rows(tangencies):
    return [{"x": t.x, "y": t.y, "parity": t.parity, "branch_id": t.branch_id} for t in tangencies]


def cmd_analyze(args) -> int:
    f = parse_polynomial(args.poly)
    cfg = _config(args)
    eps = _eps(args)
    a = analyze_level(f, eps, cfg)
    jr = verify_jordan(a.curve, cfg.refine_tol)
    c, s = a.convexity, a.star
    report = {
        "poly": format_polynomial(f),
        "epsilon": eps,
        "neighbourhood_radius": a.curve.nbhd.radius,
        "minimum": classify_minimum(f),
        "jordan": {"passed": jr.passed, "winding": jr.winding, "simple": jr.simple, "max_residual": jr.max_residual},
        "curve_points": len(a.curve.points),
        "tangencies": _tangency_rows(a.tangencies),
        "tree": tree_summary(a.tree),
        "code": a.code,
        "validation": {"passed": a.validation.passed, "failures": a.validation.failures},
        "monotone_geodesics": check_geodesic_monotonicity(a.rooted).ok,
        "is_convex": c.is_convex,
        "defect": c.defect,
        "witness": c.witness,
        "reeb_vertex_count": c.reeb_vertex_count,
        "is_star": s.is_star,
        "kernel_area": s.area,
        "kernel_meets_axis": s.meets_axis,
    }
    out = [write_json(args.out / "tree.json", tree_to_dict(a.rooted)), write_json(args.out / "report.json", report)]
    if args.svg:
        out.append(render_svg(a.curve, a.branches, a.rooted, args.out / "analysis.svg"))
    _finish(args, cfg, out, report)
    return EXIT_OK


def cmd_stabilize(args) -> int:
    f = parse_polynomial(args.poly)
    cfg = _config(args)
    start = args.eps if args.eps is not None else args.eps_start
    ladder = epsilon_ladder(start, args.ratio, args.steps)
    res = asymptotic_tree(f, ladder, cfg, drop_odd=args.drop_odd)
    data = {
        "poly": format_polynomial(f),
        "ladder": {"eps0": ladder.eps0, "ratio": ladder.ratio, "steps": ladder.steps, "values": ladder.values},
        "codes": res.codes,
        "errors": [lv.error for lv in res.levels],
        "stable_from": res.stable_from,
        "asymptotic_code": res.asymptotic_code,
        "asymptotic_tree": tree_to_dict(res.asymptotic_tree) if res.asymptotic_tree is not None else None,
        "monotone_geodesics": res.monotone_geodesics,
    }
    out = [write_json(args.out / "stabilisation.json", data)]
    _finish(args, cfg, out, data)
    return EXIT_OK


def cmd_render(args) -> int:
    f = parse_polynomial(args.poly)
    cfg = _config(args)
    a = analyze_level(f, _eps(args), cfg, shape=False)
    out = [render_svg(a.curve, a.branches, a.rooted, args.out / "render.svg")]
    _finish(args, cfg, out, {"svg": str(out[0]), "code": a.code})
    return EXIT_OK


def cmd_polar(args) -> int:
    f = parse_polynomial(args.poly)
    cfg = _config(args)
    fy = polar_curve(f)
    nbhd = good_neighbourhood(f, cfg)
    branches = polar_half_branches(f, nbhd, cfg)
    rows = []
    for b in branches:
        rows.append({
            "id": b.id, "side": b.side, "component": b.component,
            "exit_point": list(b.exit_point) if b.exit_point else None,
            "samples": len(b.samples),
            "monotone": {g: check_monotone_along_branch(b, g).ok
                         for g in ("coordinate_x", "function_f", "squared_distance")},
        })
    data = {"poly": format_polynomial(f), "polar": format_polynomial(fy),
            "divisible_by_x": fy.is_divisible_by_x(), "neighbourhood_radius": nbhd.radius, "half_branches": rows}
    eps = _eps(args)
    curve = None
    if eps is not None:
        curve = trace_level(f, eps, nbhd, cfg)
        data["tangencies"] = _tangency_rows(vertical_tangencies(curve, f, branches, cfg))
    out = [write_json(args.out / "polar.json", data)]
    _finish(args, cfg, out, data)
    return EXIT_OK


def cmd_kernel(args) -> int:
    f = parse_polynomial(args.poly)
    cfg = _config(args)
    a = analyze_level(f, _eps(args), cfg)
    s = a.star
    data = {"poly": format_polynomial(f), "epsilon": args.eps, "is_star": s.is_star, "kernel": s.kernel,
            "kernel_area": s.area, "axis_used": s.axis_used, "axis_interval": s.axis_interval,
            "meets_axis": s.meets_axis, "resolution": s.resolution}
    out = [write_json(args.out / "kernel.json", data)]
    _finish(args, cfg, out, data)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "stabilize": cmd_stabilize, "render": cmd_render,
            "polar": cmd_polar, "kernel": cmd_kernel}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"curvetree: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as exc:
        print(f"curvetree: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except CurveTreeError as exc:
        print(f"curvetree: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except OSError as exc:
        print(f"curvetree: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
