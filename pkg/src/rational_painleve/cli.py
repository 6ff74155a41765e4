"""Command-line front end.  Every command writes data files only (CSV or JSON).

    rational-painleve exact --m 9 --roots --rescale
    rational-painleve boundary --points 200
    rational-painleve compare interior --m 3,6,9 --x0 0.3
    rational-painleve grid build --rays 48 --radial 60 --margin 0.02
    rational-painleve figure densities --out figures/
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

CACHE_ENV = "RATIONAL_PAINLEVE_CACHE"
FIGURE_IDS = ("zeros", "exterior", "interior-real", "interior-sixth", "lambda", "densities", "macro", "tiling")


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"not a complex number: {text!r}") from exc


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"not a comma-separated integer list: {text!r}") from exc
    if not values:
        raise UsageError("empty integer list")
    return values


def parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(part) for part in text.split(",") if part.strip()]


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "rational_painleve"))


def default_grid_path(rays: int = 48, radial: int = 60, margin: float = 0.02) -> Path:
    return cache_dir() / f"grid-{rays}x{radial}-{margin:g}.jsonl"


# ---------------------------------------------------------------- output


def _plain(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _write_table(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(_plain(rows), indent=1) + "\n")
        return
    if not rows:
        return
    writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def _emit(payload, fmt: str, out_path: str | None, stdout) -> None:
    if isinstance(payload, list):
        buffer = io.StringIO()
        _write_table(payload, fmt, buffer)
        text = buffer.getvalue()
    else:
        text = json.dumps(_plain(payload), indent=1) + "\n"
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(text)
    else:
        stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_exact(args, stdout) -> int:
    from .rational_exact import build, evaluate, poles_zeros

    if args.m is None:
        raise UsageError("exact needs --m")
    m = parse_int_list(args.m)[0]
    if args.roots:
        zeros, poles = poles_zeros(m, rescale=args.rescale)
        rows = [{"kind": "zero", "re": float(z.real), "im": float(z.imag)} for z in zeros]
        rows += [{"kind": "pole", "re": float(z.real), "im": float(z.imag)} for z in poles]
        _emit(rows, args.format, args.out, stdout)
        return 0
    if args.x is None:
        raise UsageError("exact needs --roots or --x")
    pair = build(m)
    y = parse_complex(args.x)
    if args.rescale:
        y = (m - 0.5) ** (2 / 3) * y
    payload = {"m": m, "y": y}
    for name in ("U", "V", "P", "Q"):
        payload[name] = evaluate(pair, name, y)
    _emit(payload, "json", args.out, stdout)
    return 0


def cmd_boundary(args, stdout) -> int:
    from .genus_zero import trace_boundary

    curve = trace_boundary(points_per_arc=args.points)
    rows = []
    for arc_id, arc in enumerate(curve.arcs):
        rows.extend({"re": float(z.real), "im": float(z.imag), "arc_id": arc_id} for z in arc)
    _emit(rows, args.format, args.out, stdout)
    if args.out:
        stdout.write(f"x_e = {curve.x_e:.6f}\n")
    return 0


def cmd_compare(args, stdout) -> int:
    from . import compare

    mode = args.mode
    m_list = parse_int_list(args.m) if args.m else [3, 5, 10]
    if mode == "exterior":
        samples = parse_complex_list(args.x or "-3")
        reports = compare.exterior_error(m_list, samples)
        payload = {"reports": [r.to_dict() for r in reports], "table": [r.table() for r in reports]}
    elif mode == "interior":
        samples = parse_complex_list(args.x0 or "0.3")
        w = parse_complex(args.w) if args.w else 0j
        reports = compare.interior_error(m_list, samples, w=w)
        payload = {"reports": [r.to_dict() for r in reports], "table": [r.table() for r in reports]}
    elif mode == "poles":
        results = []
        for m in m_list:
            for kind in ("poles", "zeros"):
                r = compare.match_poles(m, kind=kind)
                results.append(
                    {"m": m, "kind": kind, "exact": r.exact_count, "lattice": r.lattice_count, "max_mismatch": r.max_mismatch, "tolerance": r.tolerance, "bijective": r.bijective}
                )
        payload = {"matches": results}
    elif mode == "identities":
        from .gridstore import load

        cache = load(_grid_path(args))
        payload = {"identities": [{"name": r.name, "worst": r.worst, "tolerance": r.tolerance, "passed": r.passed} for r in compare.identity_suite(cache)]}
    else:
        raise UsageError(f"unknown comparison {mode!r}")
    _emit(payload, "json", args.out, stdout)
    return 0


def _grid_path(args) -> Path:
    path = Path(args.grid) if args.grid else default_grid_path(args.rays, args.radial, args.margin)
    if not path.exists():
        raise FileNotFoundError(f"grid cache {path} is missing; run `grid build` first")
    return path


def cmd_grid(args, stdout) -> int:
    from . import gridstore

    if args.action == "build":
        path = Path(args.out) if args.out else default_grid_path(args.rays, args.radial, args.margin)
        path.parent.mkdir(parents=True, exist_ok=True)
        cache = gridstore.build_grid(args.rays, args.radial, args.margin)
        gridstore.save(cache, path)
        stdout.write(f"wrote {len(cache.nodes(valid_only=False))} nodes to {path}\n")
        return 0
    cache = gridstore.load(_grid_path(args))
    if args.action == "info":
        invalid = [n for n in cache.nodes(valid_only=False) if not n.valid]
        _emit({"rays": len(cache.rays), "nodes": len(cache.nodes()), "invalid": len(invalid), "metadata": cache.metadata}, "json", args.out, stdout)
        return 0
    if args.action == "export":
        if not args.out:
            raise UsageError("grid export needs --out")
        gridstore.export_csv(cache, args.out)
        return 0
    raise UsageError(f"unknown grid action {args.action!r}")


def cmd_figure(args, stdout) -> int:
    if args.figure_id not in FIGURE_IDS:
        raise UsageError(f"unknown figure id {args.figure_id!r}; valid ids: {', '.join(FIGURE_IDS)}")
    from .gridstore import load

    needs_grid = args.figure_id not in ("zeros", "exterior")
    cache = load(_grid_path(args)) if needs_grid else None
    tables = export_figure_data(args.figure_id, cache, m_list=parse_int_list(args.m) if args.m else None)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = "json" if args.format == "json" else "csv"
    for name, rows in tables.items():
        path = out_dir / f"{args.figure_id}-{name}.{suffix}"
        with open(path, "w", newline="") as handle:
            _write_table(rows, args.format, handle)
        stdout.write(f"wrote {path}\n")
    return 0


# ---------------------------------------------------------------- figure recipes


def _boundary_rows() -> list[dict]:
    from .genus_zero import default_boundary

    rows = []
    for arc_id, arc in enumerate(default_boundary().arcs):
        rows.extend({"re": float(z.real), "im": float(z.imag), "arc_id": arc_id} for z in arc)
    return rows


def _scaled_or_nan(m: int, function: str, x: complex, exponent: complex) -> complex:
    from .compare import scaled_exact
    from .rational_exact import NearPoleError

    try:
        return scaled_exact(m, function, x, exponent)
    except NearPoleError:
        return complex(math.nan, math.nan)


def _section_rows(cache, angle: float, m_list) -> list[dict]:
    """Exact and approximate P at w = 0 along the line through 0 at `angle`;
    s is the signed distance along that line."""
    from . import approximants as ap

    forward = cmath.exp(1j * angle)
    rows = []
    for ray in cache.rays:
        direction = cmath.exp(1j * ray.angle)
        if abs(direction - forward) < 1e-9:
            sign = 1
        elif abs(direction + forward) < 1e-9:
            sign = -1
        else:
            continue
        for node in ray.nodes:
            if not node.valid or (node.k == 0 and sign < 0):
                continue
            for m in m_list:
                inputs = ap.ApproximantInputs(node.config, node.record, m)
                approx = complex(ap.dotP(0, inputs, check=False))
                exact = _scaled_or_nan(m, "P", node.x0, node.record.Lambda)
                rows.append(
                    {"s": sign * abs(node.x0), "x_re": node.x0.real, "x_im": node.x0.imag, "m": m,
                     "exact_re": exact.real, "exact_im": exact.imag, "approx_re": approx.real, "approx_im": approx.imag}
                )
    rows.sort(key=lambda row: (row["m"], row["s"]))
    return rows


def export_figure_data(figure_id: str, cache=None, m_list=None) -> dict[str, list[dict]]:
    """Plot-ready tables for the named figure."""
    from . import approximants as ap

    if figure_id not in FIGURE_IDS:
        raise UsageError(f"unknown figure id {figure_id!r}; valid ids: {', '.join(FIGURE_IDS)}")
    if figure_id not in ("zeros", "exterior") and cache is None:
        raise FileNotFoundError(f"figure {figure_id!r} needs a grid cache")
    if figure_id == "zeros":
        from .rational_exact import poles_zeros

        rows = []
        for m in m_list or [9]:
            zeros, poles = poles_zeros(m, rescale=True)
            rows += [{"m": m, "kind": "zero", "re": float(z.real), "im": float(z.imag)} for z in zeros]
            rows += [{"m": m, "kind": "pole", "re": float(z.real), "im": float(z.imag)} for z in poles]
        return {"points": rows, "boundary": _boundary_rows()}
    if figure_id == "exterior":
        from .genus_zero import X_CORNER, default_boundary, exterior_approximants, genus_zero_data

        x_e = default_boundary().x_e
        xs = np.concatenate([np.linspace(-5, X_CORNER - 0.1, 40), np.linspace(x_e + 0.1, 5, 40)])
        rows = []
        for x in xs:
            data = genus_zero_data(complex(x) + 1e-12j)
            approx = complex(exterior_approximants(complex(x) + 1e-12j)[2])
            for m in m_list or [3, 5, 10]:
                exact = _scaled_or_nan(m, "P", complex(x), data.lam)
                rows.append({"x": float(x), "m": m, "exact_re": exact.real, "exact_im": exact.imag, "approx_re": approx.real, "approx_im": approx.imag})
        return {"curves": rows}
    if figure_id == "interior-real":
        return {"curves": _section_rows(cache, 0.0, m_list or [4, 8, 12])}
    if figure_id == "interior-sixth":
        return {"curves": _section_rows(cache, math.pi / 6, m_list or [4, 8, 12])}
    nodes = cache.nodes()
    if figure_id == "lambda":
        from .genus_zero import boundary_radius, genus_zero_data

        inside = [
            {"region": "inside", "x_re": n.x0.real, "x_im": n.x0.imag, "re": n.record.Lambda.real, "sin_im": math.sin(n.record.Lambda.imag), "cos_im": math.cos(n.record.Lambda.imag)}
            for n in nodes
        ]
        outside = []
        for ray in cache.rays:
            start = float(boundary_radius(ray.angle)[0]) + cache.margin
            for radius in np.linspace(start, 4.0, 24):
                x = radius * cmath.exp(1j * ray.angle) * cmath.exp(1e-9j)
                lam = genus_zero_data(x).lam
                outside.append({"region": "outside", "x_re": x.real, "x_im": x.imag, "re": lam.real, "sin_im": math.sin(lam.imag), "cos_im": math.cos(lam.imag)})
        return {"contours": inside + outside, "boundary": _boundary_rows()}
    if figure_id == "densities":
        planar = []
        linear = []
        for n in nodes:
            sigma_p, sigma_l = ap.densities(n.record)
            planar.append({"x_re": n.x0.real, "x_im": n.x0.imag, "sigma_P": sigma_p})
            if sigma_l is not None:
                linear.append({"x": n.x0.real, "sigma_L": sigma_l})
        linear.sort(key=lambda row: row["x"])
        return {"sigma_P": planar, "sigma_L": linear, "boundary": _boundary_rows()}
    if figure_id == "macro":
        from .genus_zero import boundary_radius, solve_S

        rows = []
        for n in nodes:
            value = ap.averages(n.record)[0]
            rows.append({"region": "inside", "x_re": n.x0.real, "x_im": n.x0.imag, "re": value.real, "im": value.imag})
        for ray in cache.rays:
            start = float(boundary_radius(ray.angle)[0]) + cache.margin
            for radius in np.linspace(start, 4.0, 24):
                x = radius * cmath.exp(1j * ray.angle) * cmath.exp(1e-9j)
                value = -complex(solve_S(x)) / 2
                rows.append({"region": "outside", "x_re": x.real, "x_im": x.imag, "re": value.real, "im": value.imag})
        return {"grid": rows, "boundary": _boundary_rows()}
    rows = []
    for n in nodes:
        alpha, beta = ap.tiling_coordinates(n.record)
        rows.append({"x_re": n.x0.real, "x_im": n.x0.imag, "alpha": alpha, "beta": beta})
    return {"phases": rows, "boundary": _boundary_rows()}


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rational-painleve", description="Rational Painleve-II functions and their large-m approximants.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", help="index or comma-separated index list")
    common.add_argument("--x", help="complex point(s), e.g. -3 or 0.5+0.2j")
    common.add_argument("--x0", help="interior base point(s)")
    common.add_argument("--w", help="microscopic coordinate")
    common.add_argument("--grid", help="grid cache path")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--rays", type=int, default=48)
    common.add_argument("--radial", type=int, default=60)
    common.add_argument("--margin", type=float, default=0.02)
    sub = parser.add_subparsers(dest="command", required=True)

    exact = sub.add_parser("exact", parents=[common], help="exact rational functions")
    exact.add_argument("--roots", action="store_true", help="emit zeros and poles of U_m")
    exact.add_argument("--rescale", action="store_true", help="use x = y/(m-1/2)^(2/3)")
    exact.set_defaults(handler=cmd_exact)

    boundary = sub.add_parser("boundary", parents=[common], help="boundary of T")
    boundary.add_argument("--points", type=int, default=200)
    boundary.set_defaults(handler=cmd_boundary)

    comp = sub.add_parser("compare", parents=[common], help="exact vs approximant comparisons")
    comp.add_argument("mode", choices=("exterior", "interior", "poles", "identities"))
    comp.set_defaults(handler=cmd_compare)

    grid = sub.add_parser("grid", parents=[common], help="build or inspect the grid cache")
    grid.add_argument("action", choices=("build", "info", "export"))
    grid.set_defaults(handler=cmd_grid)

    figure = sub.add_parser("figure", parents=[common], help="plot-ready data for a figure")
    figure.add_argument("figure_id", help=f"one of {', '.join(FIGURE_IDS)}")
    figure.set_defaults(handler=cmd_figure)
    return parser


def _validate(args) -> None:
    if args.margin < 0.01:
        raise UsageError("--margin must be at least 0.01")
    if args.rays < 3 or args.radial < 3:
        raise UsageError("--rays and --radial must be at least 3")
    if getattr(args, "points", 16) < 16:
        raise UsageError("--points must be at least 16")
    if args.tol <= 0:
        raise UsageError("--tol must be positive")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
        return args.handler(args, stdout)
    except (UsageError, FileNotFoundError, ValueError, RuntimeError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
