"""Command line front end.

Exit codes: 0 on success, 1 when a computation or validation fails, 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .christoffel import DualizationError
from .geomcore import GeometryError
from .io import (
    GeometryBundle,
    bundle_from_surface,
    export_json,
    export_obj,
    import_json,
    surface_residuals,
)
from .koebe import ROLE_LABELS, ROLE_SWAPPED, KoebePolyhedron, build_koebe
from .minimal import MinimalityError, associated_family_geometric, dualize_koebe_to_minimal
from .pattern_sphere import PatternError, closure_residual, layout_pattern, solve_pattern
from .quadgraph import (
    QuadGraphError,
    SQuadGraph,
    cube_corner_cuts,
    make_branched_double_cover,
    make_refined_cube,
    make_scherk_graph,
    make_zsquare_patch,
    validate,
)
from .surfaces import convergence_report, make_catenoid, make_enneper, make_schwarz_p, make_scherk


class ValidationFailure(Exception):
    pass


def _print_table(rows: dict[str, float], out=None) -> None:
    out = out or sys.stdout
    width = max((len(k) for k in rows), default=0)
    for k, v in rows.items():
        print(f"{k:<{width}}  {v:.3e}", file=out)


def _write(bundle: GeometryBundle, path: str | None, args) -> None:
    if path is None:
        return
    if path.endswith(".obj"):
        trunc = args.truncation if getattr(args, "truncation", None) else 1.0
        export_obj(bundle, path, args.level, args.segments, trunc)
    else:
        export_json(bundle, path)


def _finish(surface, args, params) -> int:
    bundle = bundle_from_surface(surface, params)
    _write(bundle, args.output, args)
    if args.report:
        rows = dict(bundle.metadata["residuals"])
        rows["diameter"] = surface.diameter()
        _print_table(rows)
    return 0


def _koebe_from_bundle(path: str) -> KoebePolyhedron:
    b = import_json(path)
    if b.metadata.get("kind") != "koebe":
        raise ValidationFailure(f"{path} does not hold a Koebe polyhedron")
    return b.to_surface()


# -- subcommands ------------------------------------------------------------------


def cmd_make_pattern(args) -> int:
    if args.kind == "zsquare":
        g = make_zsquare_patch(args.m, args.n)
    elif args.kind == "cube":
        g = make_refined_cube(args.m, args.n, args.k)
    elif args.kind == "cube-cover":
        base = make_refined_cube(args.m, args.n, args.k)
        corners = [v for v in range(base.n_vertices) if base.has_flag(v, "branch")]
        g = make_branched_double_cover(base, corners, cube_corner_cuts(base))
    else:
        g = make_scherk_graph(args.m, args.n)
    text = g.to_json()
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if args.report:
        rep = validate(g)
        print(f"vertices {g.n_vertices}  faces {len(g.faces)}  euler {g.euler_characteristic()}  ok {rep.ok}")
    return 0


def cmd_solve_pattern(args) -> int:
    g = SQuadGraph.from_json(Path(args.graph).read_text())
    targets = None
    if args.targets:
        targets = {int(k): float(v) for k, v in json.loads(Path(args.targets).read_text()).items()}
    rho, info = solve_pattern(g, targets, tol=args.tol, max_iter=args.max_iter, return_info=True)
    res = closure_residual(g, rho, targets)
    data = {"rho": {str(k): v for k, v in sorted(rho.items())}, "iterations": info.iterations,
            "residual_max": max(abs(x) for x in res.values())}
    text = json.dumps(data, indent=1, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if args.report:
        _print_table({"closure_residual": data["residual_max"], "iterations": info.iterations})
    return 0


def cmd_koebe(args) -> int:
    g = SQuadGraph.from_json(Path(args.graph).read_text())
    if args.radii:
        rho = {int(k): v for k, v in json.loads(Path(args.radii).read_text())["rho"].items()}
    else:
        rho = solve_pattern(g)
    pattern = layout_pattern(g, rho)
    if not args.no_normalize:
        pattern = pattern.normalized()
    k = build_koebe(pattern, args.role)
    return _finish(k, args, {"role_choice": args.role})


def cmd_dualize(args) -> int:
    k = _koebe_from_bundle(args.input)
    surf = dualize_koebe_to_minimal(k, allow_periods=args.allow_periods)
    return _finish(surf, args, {"construction": "koebe-dual"})


def cmd_assoc_family(args) -> int:
    k = _koebe_from_bundle(args.input)
    if args.phi_steps < 1:
        raise argparse.ArgumentTypeError("--phi-steps must be >= 1")
    stem = Path(args.output or "family.json")
    for i in range(args.phi_steps):
        phi = 2.0 * np.pi * i / args.phi_steps
        member = associated_family_geometric(k, phi=phi, allow_periods=args.allow_periods)
        bundle = bundle_from_surface(member, {"phi": phi})
        path = stem.with_name(f"{stem.stem}_{i:03d}{stem.suffix or '.json'}")
        _write(bundle, str(path), args)
        if args.report:
            print(f"phi {phi:.6f}  cycle_gap {member.meta['cycle_gap']:.3e}  -> {path}")
    return 0


def cmd_enneper(args) -> int:
    return _finish(make_enneper(args.n), args, {"family": "enneper", "n": args.n})


def cmd_catenoid(args) -> int:
    s = make_catenoid(args.N, args.rows)
    return _finish(s, args, {"family": "catenoid", "N": args.N, "rows": args.rows})


def cmd_schwarz_p(args) -> int:
    s = make_schwarz_p(args.m, args.n, args.k)
    return _finish(s, args, {"family": "schwarz-p", "m": args.m, "n": args.n, "k": args.k})


def cmd_scherk(args) -> int:
    s = make_scherk(args.m, args.n, args.truncation)
    params = {"family": "scherk", "m": args.m, "n": args.n, "truncation": args.truncation}
    return _finish(s, args, params)


def cmd_converge(args) -> int:
    rep = convergence_report(args.family, args.levels, args.region, args.samples)
    for n, e, t in zip(rep.levels, rep.errors, rep.runtimes):
        print(f"n {n:4d}  error {e:.4e}  time {t:.2f}s")
    lo, hi = rep.slope_ci
    print(f"slope {rep.slope:.3f}  95% interval [{lo:.3f}, {hi:.3f}]")
    return 0


def cmd_validate(args) -> int:
    bundle = import_json(args.input)
    surface = bundle.to_surface()
    fresh = surface_residuals(surface)
    stored = bundle.metadata.get("residuals", {})
    diam = max(surface.diameter(), 1e-300)
    ok = True
    rows = {}
    for key, val in fresh.items():
        rows[key] = val / diam
        if val > args.tol * diam:
            ok = False
            print(f"FAIL {key}: {val:.3e} exceeds {args.tol:.1e} x diameter", file=sys.stderr)
        if key in stored and abs(stored[key] - val) > 1e-9 * diam:
            ok = False
            print(f"FAIL {key}: stored {stored[key]:.3e} but recomputed {val:.3e}", file=sys.stderr)
    if args.report:
        _print_table(rows)
    return 0 if ok else 1


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", action="store_true", help="print the residual table")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("-o", "--output", help="output file (.obj or .json)")
    out.add_argument("--level", type=int, default=0, help="sphere tessellation level for OBJ")
    out.add_argument("--segments", type=int, default=32, help="segments per circle for OBJ")

    p = argparse.ArgumentParser(prog="koebe-minimal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s ({kernels.BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("make-pattern", parents=[common], help="write a quad-graph as JSON")
    s.add_argument("--kind", choices=["zsquare", "cube", "cube-cover", "scherk"], required=True)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_make_pattern)

    s = sub.add_parser("solve-pattern", parents=[common], help="solve for the radii of a pattern")
    s.add_argument("--graph", required=True)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--targets", help="JSON map vertex -> angle sum (default 2 pi at interior circles)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve_pattern)

    s = sub.add_parser("koebe", parents=[common, out], help="Koebe polyhedron of a pattern")
    s.add_argument("--graph", required=True)
    s.add_argument("--radii", help="radii from solve-pattern (solved here if omitted)")
    s.add_argument("--role", choices=[ROLE_LABELS, ROLE_SWAPPED], default=ROLE_LABELS)
    s.add_argument("--no-normalize", action="store_true")
    s.set_defaults(func=cmd_koebe)

    s = sub.add_parser("dualize", parents=[common, out], help="minimal surface dual to a Koebe bundle")
    s.add_argument("--input", required=True)
    s.add_argument("--allow-periods", action="store_true")
    s.set_defaults(func=cmd_dualize)

    s = sub.add_parser("assoc-family", parents=[common, out], help="associated family of a Koebe bundle")
    s.add_argument("--input", required=True)
    s.add_argument("--phi-steps", type=int, default=4)
    s.add_argument("--allow-periods", action="store_true")
    s.set_defaults(func=cmd_assoc_family)

    s = sub.add_parser("enneper", parents=[common, out])
    s.add_argument("--n", type=int, default=4)
    s.set_defaults(func=cmd_enneper)

    s = sub.add_parser("catenoid", parents=[common, out])
    s.add_argument("--N", type=int, default=6)
    s.add_argument("--rows", type=int, default=4)
    s.set_defaults(func=cmd_catenoid)

    s = sub.add_parser("schwarz-p", parents=[common, out])
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--k", type=int, default=2)
    s.set_defaults(func=cmd_schwarz_p)

    s = sub.add_parser("scherk", parents=[common, out])
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--truncation", type=float, default=1.0)
    s.set_defaults(func=cmd_scherk)

    s = sub.add_parser("converge", parents=[common], help="convergence study against the smooth surface")
    s.add_argument("--family", choices=["enneper", "catenoid"], default="enneper")
    s.add_argument("--levels", type=int, nargs="+", default=[4, 8, 16, 32])
    s.add_argument("--region", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=101)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("validate", parents=[common], help="recompute and check the residuals of a bundle")
    s.add_argument("--input", required=True)
    s.add_argument("--tol", type=float, default=1e-7, help="residual bound relative to the diameter")
    s.set_defaults(func=cmd_validate)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValidationFailure, PatternError, GeometryError, DualizationError, MinimalityError,
            QuadGraphError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
