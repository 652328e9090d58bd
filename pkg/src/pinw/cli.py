"""Command-line front end: ``pinw mesh | measure | render | validate``.

Exit status: 0 on success, 2 for invalid input, 3 when an internal
invariant fails (for example a delta property during collapse).
"""
import argparse
import json
import logging
import math
import sys
import time

from .coarse import read_polygon, triangulate_polygon
from .errors import InvariantViolation, PinwError, ValidationError
from .forest import BuildOptions, CoarseMesh
from .io import format_csv, format_node_ele, format_off, read_mesh
from .meshgen import (DeltaPolicy, MeshOptions, classic_run, run_pipeline, validate_conformity)
from .metrics import (UNIT_SQUARE, build_skeleton, cross_triangle_mesh, deviation_ratio, grid_mesh,
                      quality_report)
from .pinwheel import DEFAULT_CUTOFF, DEFAULT_GUARD_TOL, DEFAULT_MAX_DENOMINATOR
from .render import render_svg

log = logging.getLogger("pinw")

EXIT_OK, EXIT_INVALID, EXIT_INVARIANT = 0, 2, 3


def parse_levels(text):
    """'4' -> [4]; '1..5' -> [1, 2, 3, 4, 5]; '1,3' -> [1, 3]."""
    try:
        if ".." in text:
            a, b = text.split("..")
            out = list(range(int(a), int(b) + 1))
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"bad level list {text!r}") from None
    if not out or min(out) < 0:
        raise ValidationError(f"bad level list {text!r}")
    return out


def parse_floats(text):
    try:
        out = [float(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"bad number list {text!r}") from None
    if not out or not all(x > 0 and math.isfinite(x) for x in out):
        raise ValidationError(f"values must be positive: {text!r}")
    return out


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _add_build_flags(p):
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF,
                   help="near-equilateral cutoff on c - a (radians)")
    p.add_argument("--rational-guard", choices=["on", "off"], default="on")
    p.add_argument("--max-denominator", type=int, default=DEFAULT_MAX_DENOMINATOR)
    p.add_argument("--guard-tol", type=float, default=DEFAULT_GUARD_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta-mode", default="theoretical", help="theoretical | dynamic[:eta]")
    p.add_argument("--delta-divisor", type=float, default=1460.0)
    p.add_argument("--threads", type=int, default=1)


def _mesh_options(args):
    if args.threads < 1:
        raise ValidationError("--threads must be >= 1")
    policy = DeltaPolicy.parse(args.delta_mode)
    policy = DeltaPolicy(policy.mode, policy.eta, args.delta_divisor)
    build = BuildOptions(cutoff=args.cutoff, rational_guard=args.rational_guard == "on",
                         max_denominator=args.max_denominator, guard_tol=args.guard_tol, seed=args.seed)
    return MeshOptions(build=build, delta=policy, threads=args.threads)


def _load_coarse(args):
    if args.coarse:
        return CoarseMesh.read(args.coarse), None
    if args.polygon:
        coarse, worst = triangulate_polygon(read_polygon(args.polygon))
        return coarse, worst
    raise ValidationError("give --coarse, --polygon or --classic")


def cmd_mesh(args):
    if args.classic:
        if args.levels is None:
            raise ValidationError("--classic needs --levels")
        if args.h is not None:
            raise ValidationError("--h is not used in classic mode")
        levels = parse_levels(args.levels)
        if len(levels) != 1:
            raise ValidationError("mesh takes a single level")
        run = classic_run(levels[0], threads=args.threads)
        report = {"mode": "classic", "levels": levels[0], "tiles_before_finishing": len(run.forest.leaves()),
                  "fallback_leaves": run.fallback_leaves}
        domain = run.forest.domain
    else:
        if args.levels is not None:
            raise ValidationError("--levels is only valid with --classic")
        if args.h is None or not args.h > 0:
            raise ValidationError("--h must be a positive length")
        coarse, worst = _load_coarse(args)
        run = run_pipeline(coarse, args.h, _mesh_options(args))
        c = run.collapse
        report = {"mode": "pinw", "h_target": args.h, "leaves": len(run.forest.leaves()),
                  "tiles": len(run.forest.tiles), "roots": len(run.forest.roots),
                  "tripartitions": run.forest.tripartitions, "delta": run.delta,
                  "delta_mode": args.delta_mode, "collapses_accepted": c.direct,
                  "collapses_identity": c.identity, "collapses_rejected": c.rejected}
        if worst is not None:
            report["coarse_max_aspect_ratio"] = worst
        domain = run.forest.domain
    report["conformity"] = validate_conformity(run.mesh, domain)
    report["quality"] = quality_report(run.mesh)
    out = args.out
    formats = set(args.format.split(","))
    if "node" in formats:
        _write(out + ".node", format_node_ele(run.mesh))
    if "off" in formats:
        _write(out + ".off", format_off(run.mesh))
    if "svg" in formats:
        _write(out + ".svg", render_svg(run.mesh, stroke_width=args.stroke_width))
    _write(out + ".report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"{out}: {len(run.mesh.nodes)} nodes, {len(run.mesh.triangles)} triangles")
    return EXIT_OK


def _measure_row(label, mesh, l, domain, threads, candidates=None):
    t0 = time.perf_counter()
    skel = build_skeleton(mesh)
    rep = deviation_ratio(skel, l, domain, threads=threads, candidates=candidates)
    row = {"level_or_target": label, "vertices": skel.n_vertices, "edges": skel.n_edges,
           "deviation_ratio": f"{rep.ratio:.6f}", "witness_p": rep.p, "witness_q": rep.q,
           "seconds": f"{time.perf_counter() - t0:.3f}"}
    return row, rep


def cmd_measure(args):
    rows, last = [], None
    if args.classic:
        for n in parse_levels(args.levels or "1..5"):
            run = classic_run(n, threads=args.threads)
            row, rep = _measure_row(n, run.mesh, args.l, None, args.threads)
            rows.append(row)
            last = (run.mesh, rep)
    elif args.baseline:
        n = args.n or 64
        mesh = grid_mesh(n) if args.baseline == "grid" else cross_triangle_mesh(n)
        row, rep = _measure_row(f"{args.baseline}{n}", mesh, args.l, UNIT_SQUARE, args.threads)
        rows.append(row)
        last = (mesh, rep)
    elif args.mesh:
        mesh = read_mesh(args.mesh)
        domain = read_polygon(args.domain) if args.domain else None
        row, rep = _measure_row(args.mesh, mesh, args.l, domain, args.threads)
        rows.append(row)
        last = (mesh, rep)
    else:
        if args.h is None:
            raise ValidationError("give --classic, --baseline, --mesh, or a coarse input with --h")
        coarse, _ = _load_coarse(args)
        opts = _mesh_options(args)
        for h in parse_floats(args.h):
            run = run_pipeline(coarse, h, opts)
            row, rep = _measure_row(h, run.mesh, args.l, run.forest.domain, args.threads)
            rows.append(row)
            last = (run.mesh, rep)
    text = format_csv(rows)
    if args.csv:
        _write(args.csv, text)
    else:
        sys.stdout.write(text)
    if args.witness_svg and last:
        mesh, rep = last
        _write(args.witness_svg, render_svg(mesh, highlight=rep.path))
    return EXIT_OK


def cmd_render(args):
    mesh = read_mesh(args.mesh)
    path = None
    if args.highlight_path:
        try:
            p, q = (int(x) for x in args.highlight_path.split(","))
        except ValueError:
            raise ValidationError("--highlight-path expects 'p,q'") from None
        n = len(mesh.nodes)
        if not (0 <= p < n and 0 <= q < n):
            raise ValidationError("--highlight-path node out of range")
        from scipy.sparse.csgraph import dijkstra
        skel = build_skeleton(mesh)
        _, pred = dijkstra(skel.graph, directed=False, indices=p, return_predecessors=True)
        path = [q]
        while path[-1] != p:
            if pred[path[-1]] < 0:
                raise ValidationError("nodes are not connected")
            path.append(int(pred[path[-1]]))
        path.reverse()
    _write(args.out, render_svg(mesh, stroke_width=args.stroke_width, highlight=path))
    return EXIT_OK


def cmd_validate(args):
    mesh = read_mesh(args.mesh)
    domain = read_polygon(args.domain) if args.domain else None
    try:
        stats = validate_conformity(mesh, domain)
    except InvariantViolation as exc:
        raise ValidationError(str(exc), code="nonconforming") from None
    print(json.dumps(stats, sort_keys=True))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="pinw", description="Generalized pinwheel mesh generator.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mesh", help="generate a mesh")
    m.add_argument("--coarse", help="coarse triangulation (node/ele text)")
    m.add_argument("--polygon", help="simple polygon file, triangulated internally")
    m.add_argument("--classic", action="store_true", help="classic 1:2 family")
    m.add_argument("--rect12", action="store_true", help="classic domain: the 2 x 1 rectangle (default)")
    m.add_argument("--levels")
    m.add_argument("--h", type=float)
    m.add_argument("--out", default="mesh")
    m.add_argument("--format", default="node,off,svg")
    m.add_argument("--stroke-width", type=float, default=0.5)
    _add_build_flags(m)
    m.set_defaults(func=cmd_mesh)

    s = sub.add_parser("measure", help="deviation ratio report (CSV)")
    s.add_argument("--classic", action="store_true")
    s.add_argument("--rect12", action="store_true")
    s.add_argument("--levels")
    s.add_argument("--baseline", choices=["grid", "cross"])
    s.add_argument("--n", type=int)
    s.add_argument("--mesh", help="existing mesh file")
    s.add_argument("--domain", help="polygon file for geodesic distances (default: convex)")
    s.add_argument("--coarse")
    s.add_argument("--polygon")
    s.add_argument("--h", help="comma-separated size targets")
    s.add_argument("--l", type=float, default=1.0)
    s.add_argument("--csv")
    s.add_argument("--witness-svg")
    _add_build_flags(s)
    s.set_defaults(func=cmd_measure)

    r = sub.add_parser("render", help="render a mesh file to SVG")
    r.add_argument("mesh")
    r.add_argument("--out", required=True)
    r.add_argument("--stroke-width", type=float, default=0.5)
    r.add_argument("--highlight-path", help="node ids 'p,q'; draws the skeleton shortest path")
    r.set_defaults(func=cmd_render)

    v = sub.add_parser("validate", help="check mesh conformity")
    v.add_argument("mesh")
    v.add_argument("--domain")
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValidationError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PinwError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
