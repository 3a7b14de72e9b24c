"""Command-line front end: scene parsing, pipeline orchestration, emission.

Exit codes: 0 success, 1 invalid input, 2 numerical failure inside the
pipeline, 3 failed case reproduction or oracle confirmation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import consistency, jsonio, oracle, scenarios, solver, svgout
from .errors import (
    CaseFailed,
    ConfirmationFailed,
    InvalidInput,
    PolyFTError,
)
from .geometry import DEFAULT_TOLERANCE


def _load_json_arg(text: str):
    """Inline JSON, @file reference, or a bare builtin name."""
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return json.load(fh)
    stripped = text.strip()
    if stripped and stripped[0] in "[{":
        return json.loads(stripped)
    return text


def _tolerance(args) -> float:
    if args.tolerance is not None:
        return args.tolerance
    env = os.environ.get("FT_TOLERANCE")
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise InvalidInput(f"FT_TOLERANCE is not a number: {env!r}") from exc
    return DEFAULT_TOLERANCE


def _instance_from_args(args) -> solver.Instance:
    tol = _tolerance(args)
    if getattr(args, "scene", None):
        return jsonio.parse_instance(_load_json_arg(args.scene), tolerance=tol)
    if not args.ball or args.sites is None:
        raise InvalidInput("provide --scene, or both --ball and --sites")
    ball = jsonio.parse_ball(_load_json_arg(args.ball), tolerance=tol)
    sites = np.asarray(_load_json_arg(args.sites), dtype=float)
    return solver.Instance(ball, sites)


def _emit(args, payload: dict) -> None:
    text = jsonio.dumps(payload)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_svg_or_dump(path: str, ball, sites, fts, cones=None) -> None:
    if ball.dim == 2:
        doc = svgout.render_svg(ball, sites, fts, cones)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        # Three-dimensional scenes fall back to a plain vertex dump.
        lines = ["# vertex dump (scene is not two-dimensional)"]
        lines.append("# ball vertices")
        lines += [" ".join(f"{x:.12g}" for x in v) for v in ball.vertices]
        lines.append("# sites")
        lines += [" ".join(f"{x:.12g}" for x in s) for s in np.atleast_2d(sites)]
        if fts is not None:
            lines.append("# solution set vertices")
            lines += [" ".join(f"{x:.12g}" for x in v) for v in fts.vertices]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _cmd_solve(args) -> int:
    inst = _instance_from_args(args)
    x, value = solver.find_ft_point(inst)
    _emit(args, {"x": x, "value": value})
    return 0


def _cmd_verify(args) -> int:
    inst = _instance_from_args(args)
    point = np.asarray(_load_json_arg(args.point), dtype=float)
    out = solver.verify_ft_point(
        inst, point, allow_coincident=not args.no_extension
    )
    if isinstance(out, solver.FTCertificate):
        payload = jsonio.certificate_to_json(out)
        payload["optimal"] = True
    else:
        payload = jsonio.refutation_to_json(out)
    _emit(args, payload)
    return 0


def _cmd_locus(args) -> int:
    inst = _instance_from_args(args)
    fts = solver.ft_locus(inst)
    _emit(args, jsonio.ftset_to_json(fts))
    if args.svg:
        _write_svg_or_dump(args.svg, inst.ball, inst.sites, fts)
    return 0


def _cmd_audit(args) -> int:
    tol = _tolerance(args)
    ball = jsonio.parse_ball(_load_json_arg(args.ball), tolerance=tol)
    method = args.method
    if method == "auto":
        report = consistency.uniqueness_audit(ball, args.n)
    elif method == "general":
        report = consistency.uniqueness_audit(ball, args.n)
    elif method == "plane":
        report = consistency.plane_criterion_check(ball, args.n)
    elif method == "space3d":
        report = consistency.space3d_criterion_check(ball, args.n)
    else:  # pragma: no cover - argparse restricts choices
        raise InvalidInput(f"unknown method {method}")
    _emit(args, jsonio.report_to_json(report))
    return 0


def _cmd_consistent_sets(args) -> int:
    tol = _tolerance(args)
    ball = jsonio.parse_ball(_load_json_arg(args.ball), tolerance=tol)
    span_filter = None if args.span_filter == "none" else args.span_filter
    sets = consistency.enumerate_consistent_sets(
        ball, args.n, span_filter=span_filter, first_only=args.first_only
    )
    _emit(
        args,
        {
            "ball": ball.name or "custom",
            "n": args.n,
            "span_filter": args.span_filter,
            "count": len(sets),
            "sets": [jsonio.consistent_set_to_json(cs) for cs in sets],
        },
    )
    return 0


def _cmd_case(args) -> int:
    report = scenarios.reproduce_case(args.name)
    payload = jsonio.case_report_to_json(report)
    inst = report.details.get("instance")
    fts = report.details.get("ft_set")
    if inst is not None:
        # Case reports carry their scene: embedded SVG for planar cases,
        # a vertex dump for spatial ones.
        if inst.ball.dim == 2:
            payload["svg"] = svgout.render_svg(inst.ball, inst.sites, fts)
        else:
            dump = [v.tolist() for v in inst.ball.vertices]
            payload["vertex_dump"] = {
                "ball_vertices": dump,
                "sites": inst.sites,
                "solution_vertices": fts.vertices if fts is not None else [],
            }
    _emit(args, payload)
    if args.svg and inst is not None:
        _write_svg_or_dump(args.svg, inst.ball, inst.sites, fts)
    return 0


def _cmd_oracle_check(args) -> int:
    inst = _instance_from_args(args)
    fts = solver.ft_locus(inst)
    spec = oracle.default_grid(inst, resolution=args.resolution)
    report = oracle.confirm_ft_set(inst, fts, spec=spec)
    _emit(
        args,
        {
            "confirmed": True,
            "ft_set": jsonio.ftset_to_json(fts),
            "constancy_spread": report.constancy_spread,
            "max_cell_violation": report.max_cell_violation,
            "min_outside_margin": report.min_outside_margin,
            "grid_min": report.oracle.min_value,
            "grid_h": report.oracle.h,
            "evaluations": report.oracle.evaluations,
        },
    )
    return 0


def _add_scene_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ball", help="builtin name, inline JSON, or @file")
    p.add_argument("--sites", help="JSON array of points, or @file")
    p.add_argument("--scene", help="full instance JSON ({ball, sites}), or @file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyft",
        description="Fermat-Torricelli solving and uniqueness auditing "
        "in polyhedral-norm spaces",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="comparison tolerance (default 1e-9; FT_TOLERANCE env overrides)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one minimizer of the summed distance")
    _add_scene_options(p)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("verify", help="certify or refute a candidate point")
    _add_scene_options(p)
    p.add_argument("--point", required=True)
    p.add_argument(
        "--no-extension",
        action="store_true",
        help="reject points that coincide with a site",
    )
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("locus", help="the complete solution set")
    _add_scene_options(p)
    p.add_argument("--svg", help="render a 2d scene (3d: vertex dump)")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_locus)

    p = sub.add_parser("audit", help="uniqueness verdict for a ball and n")
    p.add_argument("--ball", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--method",
        choices=["auto", "general", "plane", "space3d"],
        default="auto",
    )
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_audit)

    p = sub.add_parser("consistent-sets", help="enumerate consistent face sets")
    p.add_argument("--ball", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--span-filter", choices=["none", "line", "bullets3d"], default="none"
    )
    p.add_argument("--first-only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_consistent_sets)

    p = sub.add_parser("case", help="reproduce a documented case study")
    p.add_argument("name")
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_case)

    p = sub.add_parser("oracle-check", help="grid-confirm the solution set")
    _add_scene_options(p)
    p.add_argument("--resolution", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (CaseFailed, ConfirmationFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidInput, json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PolyFTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
