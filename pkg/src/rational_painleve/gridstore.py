"""Ray-organized grid of m-independent data over the elliptic region T.

Each ray starts at x0 = 0 and is continued outward in equal radial steps
until the next node would come within `margin` of the boundary of T; a
terminal node is then placed at distance `margin`.  Lambda derivatives come
from polar finite differences across neighbouring nodes, with a local
re-solve where the polar stencil is incomplete.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .boutroux import (
    ContinuationFailure,
    DegenerateConfiguration,
    EllipticConfig,
    continue_along,
    solve_config,
    zero_config,
)
from .elliptic_data import InconsistentGeometry, PeriodRecord, lambda_derivatives, period_record
from .genus_zero import boundary_distance, boundary_radius, is_in_T

FORMAT_NAME = "rational_painleve.grid"
FORMAT_VERSION = 1
ANCHOR_H0 = -2 * math.pi * math.sqrt(3)
ANCHOR_ABEL_INF = math.pi * math.sqrt(3) / 3
ANCHOR_TOLERANCE = 1e-8
_COMPLEX_FIELDS = [f.name for f in fields(PeriodRecord) if f.name not in ("x0", "PhiPlus", "PhiMinus", "checks")]


class GridFormatError(ValueError):
    pass


class GridTruncationError(GridFormatError):
    pass


class GridValidationError(GridFormatError):
    pass


class OutsideGrid(ValueError):
    pass


@dataclass
class GridNode:
    ray: int
    k: int
    x0: complex
    config: EllipticConfig
    record: PeriodRecord
    dLambda: complex = 0j
    dbarLambda: complex = 0j
    terminal: bool = False
    valid: bool = True
    error: str = ""


@dataclass
class GridRay:
    index: int
    angle: float
    radial_step: float
    nodes: list[GridNode] = field(default_factory=list)


@dataclass
class GridCache:
    rays: list[GridRay]
    n_radial: int
    margin: float
    metadata: dict = field(default_factory=dict)

    def nodes(self, valid_only: bool = True) -> list[GridNode]:
        out = []
        for ray in self.rays:
            out.extend(n for n in ray.nodes if n.valid or not valid_only)
        return out

    def interior_nodes(self) -> list[GridNode]:
        return [n for n in self.nodes() if not n.terminal and n.k > 0]


def _terminal_radius(angle: float, inner: float, outer: float, margin: float) -> float:
    """Radius on the ray where the distance to the boundary equals margin."""
    unit = cmath.exp(1j * angle)
    for _ in range(50):
        mid = 0.5 * (inner + outer)
        if boundary_distance(mid * unit)[0] > margin:
            inner = mid
        else:
            outer = mid
    return inner


def _radial_schedule(angle: float, radial_step: float, n_radial: int, margin: float) -> tuple[list[float], bool]:
    """Radii of the regular nodes and whether a terminal node follows."""
    unit = cmath.exp(1j * angle)
    radii = [0.0]
    for k in range(1, n_radial):
        x = k * radial_step * unit
        if boundary_distance(x)[0] < margin or is_in_T(x) is not True:
            return radii, True
        radii.append(k * radial_step)
    return radii, False


def _build_ray(index: int, angle: float, radial_step: float, n_radial: int, margin: float, origin: GridNode) -> GridRay:
    ray = GridRay(index, angle, radial_step, [GridNode(index, 0, 0j, origin.config, origin.record)])
    unit = cmath.exp(1j * angle)
    radii, has_terminal = _radial_schedule(angle, radial_step, n_radial, margin)
    targets = [(r, False) for r in radii[1:]]
    if has_terminal:
        outer = (len(radii)) * radial_step
        targets.append((_terminal_radius(angle, radii[-1], outer, margin), True))
    current = origin.config
    for k, (radius, terminal) in enumerate(targets, start=1):
        x0 = radius * unit
        try:
            config = continue_along([current.x0, x0], seed=current)[-1]
            record = period_record(config)
        except (ContinuationFailure, DegenerateConfiguration, InconsistentGeometry, RuntimeError) as exc:
            ray.nodes.append(GridNode(index, k, x0, current, PeriodRecord(x0=x0), terminal=terminal, valid=False, error=str(exc)))
            break
        ray.nodes.append(GridNode(index, k, x0, config, record, terminal=terminal))
        current = config
    return ray


def _central_difference(values: list[complex | None], step: float) -> complex | None:
    """Derivative at the centre of a 5-point stencil, or None if incomplete."""
    far_out, out, _, inner, far_inner = values
    if any(v is None for v in (far_out, out, inner, far_inner)):
        return None
    return (-far_out + 8 * out - 8 * inner + far_inner) / (12 * step)


def _polar_derivatives(cache: GridCache) -> None:
    """d Lambda and dbar Lambda from central differences in (r, phi); nodes
    without a full stencil get a local re-solve instead."""
    n_rays = len(cache.rays)
    dphi = 2 * math.pi / n_rays

    def lam(ray_index: int, k: int) -> complex | None:
        ray = cache.rays[ray_index % n_rays]
        if 0 <= k < len(ray.nodes) and ray.nodes[k].valid and not ray.nodes[k].terminal:
            return ray.nodes[k].record.Lambda
        return None

    for ray in cache.rays:
        for node in ray.nodes:
            if not node.valid:
                continue
            lam_r = lam_phi = None
            if node.k > 0 and not node.terminal:
                offsets = (2, 1, 0, -1, -2)
                lam_r = _central_difference([lam(ray.index, node.k + o) for o in offsets], ray.radial_step)
                lam_phi = _central_difference([lam(ray.index + o, node.k) for o in offsets], dphi)
            if lam_r is None or lam_phi is None:
                node.dLambda, node.dbarLambda = lambda_derivatives(node.config)
                continue
            r = node.k * ray.radial_step
            rotation = cmath.exp(-1j * ray.angle)
            node.dLambda = 0.5 * rotation * (lam_r - 1j * lam_phi / r)
            node.dbarLambda = 0.5 * np.conj(rotation) * (lam_r + 1j * lam_phi / r)


def build_grid(n_rays: int = 48, n_radial: int = 60, margin: float = 0.02, progress=None) -> GridCache:
    if margin < 0.01:
        raise ValueError("margin must be at least 0.01")
    if n_rays < 3 or n_radial < 3:
        raise ValueError("need at least 3 rays and 3 radial nodes")
    radial_step = float(np.max(boundary_radius(np.linspace(0, 2 * math.pi, 721)))) / (n_radial - 1)
    origin_config = zero_config()
    origin = GridNode(0, 0, 0j, origin_config, period_record(origin_config))
    rays = []
    for index in range(n_rays):
        angle = 2 * math.pi * index / n_rays
        rays.append(_build_ray(index, angle, radial_step, n_radial, margin, origin))
        if progress is not None:
            progress(index + 1, n_rays)
    cache = GridCache(rays, n_radial, margin)
    _polar_derivatives(cache)
    cache.metadata = {
        "version": __version__,
        "radial_step": radial_step,
        "tolerances": {"boutroux": 1e-11, "quadrature": 1e-12},
        "anchors": _anchors(origin.record),
    }
    return cache


def _anchors(record: PeriodRecord) -> dict:
    return {"H0": _pair(record.H0), "AbelInfPlus": _pair(record.AbelInfPlus)}


# ---------------------------------------------------------------- persistence


def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _unpair(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def _node_line(node: GridNode) -> dict:
    record = node.record
    return {
        "ray": node.ray,
        "k": node.k,
        "x0": _pair(node.x0),
        "Pi": _pair(node.config.Pi),
        "roots": {name: _pair(getattr(node.config, name)) for name in "ABCD"},
        "config_x0": _pair(node.config.x0),
        "periods": {name: _pair(getattr(record, name)) for name in _COMPLEX_FIELDS},
        "phases": [record.PhiPlus, record.PhiMinus],
        "checks": {key: _pair(value) for key, value in record.checks.items()},
        "dLambda": _pair(node.dLambda),
        "dbarLambda": _pair(node.dbarLambda),
        "terminal": node.terminal,
        "valid": node.valid,
        "error": node.error,
    }


def _node_from_line(data: dict) -> GridNode:
    roots = {name: _unpair(data["roots"][name]) for name in "ABCD"}
    config = EllipticConfig(_unpair(data["config_x0"]), _unpair(data["Pi"]), **roots)
    record = PeriodRecord(x0=_unpair(data["x0"]))
    for name in _COMPLEX_FIELDS:
        setattr(record, name, _unpair(data["periods"][name]))
    record.PhiPlus, record.PhiMinus = (float(v) for v in data["phases"])
    record.checks = {key: _unpair(value) for key, value in data["checks"].items()}
    return GridNode(
        int(data["ray"]),
        int(data["k"]),
        _unpair(data["x0"]),
        config,
        record,
        _unpair(data["dLambda"]),
        _unpair(data["dbarLambda"]),
        bool(data["terminal"]),
        bool(data["valid"]),
        str(data["error"]),
    )


def save(cache: GridCache, path) -> None:
    """JSON lines: a header, then one node per line.  Floats are written with
    repr, which round-trips every double exactly."""
    rays = [{"index": r.index, "angle": r.angle, "radial_step": r.radial_step, "count": len(r.nodes)} for r in cache.rays]
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n_radial": cache.n_radial,
        "margin": cache.margin,
        "node_count": sum(r["count"] for r in rays),
        "rays": rays,
        "metadata": cache.metadata,
    }
    with open(path, "w") as handle:
        handle.write(json.dumps(header) + "\n")
        for ray in cache.rays:
            for node in ray.nodes:
                handle.write(json.dumps(_node_line(node)) + "\n")


def load(path) -> GridCache:
    with open(path) as handle:
        lines = handle.read().split("\n")
    if not lines or not lines[0].strip():
        raise GridTruncationError("empty grid file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"unreadable header: {exc}") from exc
    if header.get("format") != FORMAT_NAME or header.get("version") != FORMAT_VERSION:
        raise GridFormatError(f"unsupported grid format {header.get('format')!r} version {header.get('version')!r}")
    body = [line for line in lines[1:] if line.strip()]
    if len(body) != header["node_count"] or (lines[-1] != "" and len(lines) > 1):
        raise GridTruncationError(f"expected {header['node_count']} nodes, found {len(body)} complete lines")
    nodes = []
    for number, line in enumerate(body, start=2):
        try:
            nodes.append(_node_from_line(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise GridTruncationError(f"line {number} is incomplete or corrupt: {exc}") from exc
    rays = []
    position = 0
    for spec in header["rays"]:
        ray = GridRay(int(spec["index"]), float(spec["angle"]), float(spec["radial_step"]))
        ray.nodes = nodes[position : position + spec["count"]]
        position += spec["count"]
        if any(n.ray != ray.index for n in ray.nodes):
            raise GridFormatError(f"ray {ray.index} has nodes from another ray")
        rays.append(ray)
    cache = GridCache(rays, int(header["n_radial"]), float(header["margin"]), header["metadata"])
    validate_anchors(cache)
    return cache


def validate_anchors(cache: GridCache) -> None:
    """The stored anchors and every origin node must reproduce the closed-form
    values of H0(0) and A(inf+)(0)."""
    anchors = cache.metadata.get("anchors", {})
    expected = {"H0": complex(ANCHOR_H0), "AbelInfPlus": complex(ANCHOR_ABEL_INF)}
    for name, value in expected.items():
        if name not in anchors or abs(_unpair(anchors[name]) - value) > ANCHOR_TOLERANCE:
            raise GridValidationError(f"anchor {name} does not match its closed form")
    for ray in cache.rays:
        if not ray.nodes or ray.nodes[0].k != 0:
            raise GridValidationError(f"ray {ray.index} does not start at the origin")
        record = ray.nodes[0].record
        for name, value in expected.items():
            if abs(getattr(record, name) - value) > ANCHOR_TOLERANCE:
                raise GridValidationError(f"origin node of ray {ray.index} has a corrupted {name}")


def export_csv(cache: GridCache, path) -> None:
    """Flat CSV mirroring the JSON-lines node schema."""
    import csv

    columns = ["ray", "k", "x0", "Pi", "A", "B", "C", "D"] + _COMPLEX_FIELDS + ["PhiPlus", "PhiMinus", "dLambda", "dbarLambda", "terminal", "valid"]
    header = []
    for name in columns:
        header.extend([name] if name in ("ray", "k", "PhiPlus", "PhiMinus", "terminal", "valid") else [f"{name}_re", f"{name}_im"])
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for node in cache.nodes(valid_only=False):
            row: list = [node.ray, node.k]
            values = [node.x0, node.config.Pi, *node.config.roots] + [getattr(node.record, n) for n in _COMPLEX_FIELDS]
            for z in values:
                row.extend([repr(complex(z).real), repr(complex(z).imag)])
            row.extend([repr(node.record.PhiPlus), repr(node.record.PhiMinus)])
            for z in (node.dLambda, node.dbarLambda):
                row.extend([repr(complex(z).real), repr(complex(z).imag)])
            row.extend([int(node.terminal), int(node.valid)])
            writer.writerow(row)


# ---------------------------------------------------------------- queries


def nearest_node(cache: GridCache, x0: complex) -> GridNode:
    nodes = cache.nodes()
    distances = [abs(n.x0 - x0) for n in nodes]
    return nodes[int(np.argmin(distances))]


def interpolate(cache: GridCache, x0: complex, preview: bool = False) -> tuple[EllipticConfig, PeriodRecord]:
    """Configuration and period data at x0 by a fresh solve seeded from the
    nearest node.  With `preview`, barycentric interpolation over the three
    nearest nodes is returned instead (branch-insensitive fields only are
    reliable)."""
    x0 = complex(x0)
    inside = is_in_T(x0)
    if inside is not True:
        raise OutsideGrid(f"x0={x0} is not inside T")
    step = cache.metadata.get("radial_step", 0.05)
    seed = nearest_node(cache, x0)
    if abs(seed.x0 - x0) > 2 * step:
        raise OutsideGrid(f"x0={x0} is farther than two radial steps from every grid node")
    if abs(seed.x0 - x0) < 1e-14:
        return seed.config, seed.record
    if preview:
        return _barycentric(cache, x0)
    config = continue_along([seed.config.x0, x0], seed=seed.config)[-1]
    return config, period_record(config)


def _barycentric(cache: GridCache, x0: complex) -> tuple[EllipticConfig, PeriodRecord]:
    nodes = sorted(cache.nodes(), key=lambda n: abs(n.x0 - x0))[:3]
    p = [n.x0 for n in nodes]
    matrix = np.array([[z.real for z in p], [z.imag for z in p], [1.0, 1.0, 1.0]])
    try:
        weights = np.linalg.solve(matrix, np.array([x0.real, x0.imag, 1.0]))
    except np.linalg.LinAlgError:
        weights = np.array([1.0, 0.0, 0.0])

    def mix(getter):
        return complex(sum(w * getter(n) for w, n in zip(weights, nodes)))

    config = EllipticConfig(x0, mix(lambda n: n.config.Pi), *(mix(lambda n, i=i: n.config.roots[i]) for i in range(4)))
    record = PeriodRecord(x0=x0)
    for name in _COMPLEX_FIELDS:
        setattr(record, name, mix(lambda n, name=name: getattr(n.record, name)))
    record.PhiPlus = mix(lambda n: n.record.PhiPlus).real
    record.PhiMinus = mix(lambda n: n.record.PhiMinus).real
    record.checks["preview"] = 1.0
    return config, record


def node_as_dict(node: GridNode) -> dict:
    return {"x0": node.x0, "config": asdict(node.config), "record": node.record.as_dict()}
