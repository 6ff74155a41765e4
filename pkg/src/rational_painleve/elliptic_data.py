"""Periods, Abel-map values and phase constants of the genus-one curve at x0.

Everything here is independent of the index m.  Integrals of dz/R and
z^2 dz/R over paths in the complement of the star cut do not depend on the
path (both differentials have zero residue at infinity), so paths are
straight segments, detoured around the star when necessary.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .boutroux import EllipticConfig, phase_constants
from .radical import (
    QuarticRadical,
    avoiding_path,
    polyline_quadrature,
    ray_quadrature,
    segment_quadrature,
)

# Sign s in Omega_a = s * 2 int_C^D dz/R_+ making c1 > 0 at x0 = 0.
A_CYCLE_SIGN = -1
IMAGINARY_TOLERANCE = 1e-9


class InconsistentGeometry(RuntimeError):
    pass


@dataclass
class PeriodRecord:
    x0: complex
    Omega_a: complex = 0j
    Omega_b: complex = 0j
    c1: complex = 0j
    c2: complex = 0j
    H: complex = 0j
    H0: complex = 0j
    U: complex = 0j
    Eplus: complex = 0j
    kappa0: complex = 0j
    kappa1: complex = 0j
    PhiPlus: float = 0.0
    PhiMinus: float = 0.0
    Lambda: complex = 0j
    AbelInfPlus: complex = 0j
    AbelQPlus: complex = 0j
    AbelQMinus: complex = 0j
    zQ: complex = 0j
    K: complex = 0j
    checks: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _square_minus_radical(radical: QuarticRadical, z):
    """z^2 - R(z) computed without cancellation for large |z|."""
    z = np.asarray(z, dtype=complex)
    R = radical(z)
    return -((2 / 3) * radical.x0 * z**2 - (4 / 3) * z + radical.Pi) / (z**2 + R)


def integrand(radical: QuarticRadical, kind: str):
    """f(z) for the differential f(z) dz of the named kind."""
    if kind == "R":
        return radical
    if kind == "omega0":
        return lambda z: 1 / radical(z)
    if kind == "z_omega0":
        return lambda z: z / radical(z)
    if kind == "Omega0":
        return lambda z: z**2 / radical(z)
    raise ValueError(f"unknown integrand kind {kind!r}")


def branch_integral(config: EllipticConfig, kind: str, path, side: str | None = None) -> complex:
    """Integral of the named differential along a polyline.

    With `side` set, the path must be a single arc of the star and R takes
    its boundary value from that side.  A final vertex of `inf` means the
    last leg is a ray continuing the previous leg's direction."""
    radical = config.radical()
    path = [complex(p) for p in path]
    if side is not None:
        start, end = path
        values = {
            "omega0": lambda z: 1 / radical.side_value(z, start, end, side),
            "z_omega0": lambda z: z / radical.side_value(z, start, end, side),
            "R": lambda z: radical.side_value(z, start, end, side),
        }
        return complex(segment_quadrature(values[kind], start, end))
    func = integrand(radical, kind)
    if cmath.isinf(path[-1]):
        finite = path[:-1]
        total = polyline_quadrature(func, finite) if len(finite) > 1 else 0
        direction = finite[-1] - finite[-2]
        return complex(total + ray_quadrature(func, finite[-1], direction, length=radical.scale))
    return complex(polyline_quadrature(func, path))


def _free_path(radical: QuarticRadical, start: complex, end: complex) -> list[complex]:
    return avoiding_path(radical, start, end)


def periods(config: EllipticConfig) -> PeriodRecord:
    radical = config.radical()
    Omega_a = A_CYCLE_SIGN * 2 * branch_integral(config, "omega0", [config.C, config.D], side="left")
    c1 = 2j * math.pi / Omega_a
    to_d = branch_integral(config, "omega0", _free_path(radical, config.A, config.D)) + branch_integral(
        config, "omega0", _free_path(radical, config.B, config.D)
    )
    Omega_b = Omega_a / 2 + to_d
    H = c1 * Omega_b
    H0 = 2 * (H - 1j * math.pi)
    record = PeriodRecord(x0=config.x0, Omega_a=Omega_a, Omega_b=Omega_b, c1=c1, H=H, H0=H0)
    record.K = 1j * math.pi + H / 2
    record.checks["H0_direct"] = 2 * c1 * to_d
    return record


def _outward(config: EllipticConfig, vertex: complex) -> complex:
    """Unit vector continuing the star arm through `vertex`."""
    d = vertex - config.C
    return d / abs(d)


def eplus(config: EllipticConfig, record: PeriodRecord, anchor: str = "D", z0: complex | None = None) -> complex:
    """E^+ from the regularized integral anchored at D, A or B."""
    radical = config.radical()
    start = {"D": config.D, "A": config.A, "B": config.B}[anchor]
    if z0 is None:
        z0 = start + radical.scale * _outward(config, start)
    shift = record.c1 * record.c2

    def finite_part(z):
        return (z**2 + shift) / radical(z)

    def tail(z):
        R = radical(z)
        return (_square_minus_radical(radical, z) + shift) / R

    head = polyline_quadrature(finite_part, _free_path(radical, start, z0))
    out = z0 - config.C
    rest = ray_quadrature(tail, z0, out, length=radical.scale)
    value = head + rest - z0
    if anchor != "D":
        value -= record.c1
    return complex(value)


def second_kind(config: EllipticConfig, record: PeriodRecord) -> PeriodRecord:
    radical = config.radical()
    # a-period of Omega_0 from the same boundary-value realization as Omega_a
    left = lambda z: z**2 / radical.side_value(z, config.C, config.D, "left")
    a_period = A_CYCLE_SIGN * 2 * complex(segment_quadrature(left, config.C, config.D))
    record.c2 = -a_period / (2j * math.pi)
    to_d = branch_integral(config, "Omega0", _free_path(radical, config.A, config.D)) + branch_integral(
        config, "Omega0", _free_path(radical, config.B, config.D)
    )
    b_period = a_period / 2 + to_d
    record.U = b_period + record.c2 * record.H
    record.Eplus = eplus(config, record, "D")
    record.checks["U_minus_2c1"] = abs(record.U - 2 * record.c1)
    return record


def q_sheet_sign(config: EllipticConfig, zQ: complex, which: int) -> int:
    """+1 if Q^which lies on the sheet where the curve coordinate equals R(z_Q)."""
    target = -which * (zQ - config.C) * (zQ - config.D)
    value = complex(config.radical()(zQ))
    return 1 if abs(value - target) <= abs(value + target) else -1


def abel_values(config: EllipticConfig, record: PeriodRecord) -> PeriodRecord:
    radical = config.radical()
    c1 = record.c1
    record.AbelInfPlus = _abel_infinity(config, c1)
    denominator = config.A + config.B - config.C - config.D
    zQ = (config.A * config.B - config.C * config.D) / denominator
    if min(abs(zQ - r) for r in config.roots) < 1e-6:
        raise InconsistentGeometry("z_Q coincides with a branch point")
    record.zQ = zQ
    to_q = branch_integral(config, "omega0", _free_path(radical, config.D, zQ))
    record.AbelQPlus = c1 * q_sheet_sign(config, zQ, +1) * to_q
    record.AbelQMinus = c1 * q_sheet_sign(config, zQ, -1) * to_q
    record.K = 1j * math.pi + record.H / 2
    return record


def _abel_infinity(config: EllipticConfig, c1: complex) -> complex:
    radical = config.radical()
    func = integrand(radical, "omega0")
    direction = _outward(config, config.D)
    z0 = config.D + radical.scale * direction
    head = segment_quadrature(func, config.D, z0)
    return complex(c1 * (head + ray_quadrature(func, z0, direction, length=radical.scale)))


def _g_prime(radical: QuarticRadical, z):
    z = np.asarray(z, dtype=complex)
    return 1.5 * _square_minus_radical(radical, z) + radical.x0 / 2


def g_at_d_plus(config: EllipticConfig) -> complex:
    """Boundary value of G at D from above the horizontal ray L = D + [0, inf).

    G(z) = Log(D - z) - int_z^inf [G'(s) - 1/(s - D)] ds off the cut L, and
    G_+(D) = G(Z) - int_D^Z G'(s) ds for an anchor Z above L."""
    radical = config.radical()
    for angle in (math.pi / 4, math.pi / 2, math.pi / 8, 3 * math.pi / 8):
        direction = cmath.exp(1j * angle)
        anchor = config.D + radical.scale * direction
        if not radical.crosses_star(config.D, anchor):
            break
    else:
        raise InconsistentGeometry("no straight anchor path from D")

    def regular(z):
        # G'(z) - 1/(z - D) with the O(1) and O(1/z) cancellations done by hand
        z = np.asarray(z, dtype=complex)
        R = radical(z)
        q = _square_minus_radical(radical, z)
        x0, Pi, D = radical.x0, radical.Pi, config.D
        top = q - 0.5 * x0 * q * (z - D) - 2 * z * D - 1.5 * Pi * (z - D)
        return top / ((z**2 + R) * (z - D))

    tail = ray_quadrature(regular, anchor, direction, length=radical.scale)
    g_anchor = cmath.log(config.D - anchor) - tail
    head = segment_quadrature(lambda z: _g_prime(radical, z), config.D, anchor)
    return complex(g_anchor - head)


def phases(config: EllipticConfig, record: PeriodRecord) -> PeriodRecord:
    plus, minus = phase_constants(config)
    if max(abs(plus.imag), abs(minus.imag)) > 1e-8:
        raise InconsistentGeometry(f"Boutroux residuals too large: {plus.imag:.3e}, {minus.imag:.3e}")
    record.PhiPlus, record.PhiMinus = plus.real, minus.real
    to_a = branch_integral(config, "omega0", [config.C, config.A], side="left")
    to_b = branch_integral(config, "omega0", [config.C, config.B], side="left")
    to_a_u = branch_integral(config, "z_omega0", [config.C, config.A], side="left")
    to_b_u = branch_integral(config, "z_omega0", [config.C, config.B], side="left")
    scale = -1 / (2 * math.pi)
    record.kappa1 = scale * (record.PhiPlus * to_a + record.PhiMinus * to_b)
    record.kappa0 = scale * (record.PhiPlus * to_a_u + record.PhiMinus * to_b_u)
    record.checks["c1_int_CA_minus_H_half"] = abs(record.c1 * to_a - record.H / 2)
    record.checks["c1_int_CB_minus_complement"] = abs(record.c1 * to_b - (1j * math.pi - record.H / 2))
    record.Lambda = lambda_value(config)
    return record


def lambda_value(config: EllipticConfig) -> complex:
    """Lambda = -theta(D) + 2 G_+(D) + 2 pi i with theta(z) = z^3 + x0 z."""
    theta_d = config.D**3 + config.x0 * config.D
    return complex(-theta_d + 2 * g_at_d_plus(config) + 2j * math.pi)


def lambda_derivatives(config: EllipticConfig, h: float = 1e-3) -> tuple[complex, complex]:
    """(d Lambda, dbar Lambda) by central differences in Re x0 and Im x0,
    Richardson-extrapolated from steps h and h/2."""
    from .boutroux import solve_config

    def gradient(step):
        values = {}
        for name, offset in (("xp", step), ("xm", -step), ("yp", 1j * step), ("ym", -1j * step)):
            values[name] = lambda_value(solve_config(config.x0 + offset, config))
        return (values["xp"] - values["xm"]) / (2 * step), (values["yp"] - values["ym"]) / (2 * step)

    coarse, fine = gradient(h), gradient(h / 2)
    d_re = (4 * fine[0] - coarse[0]) / 3
    d_im = (4 * fine[1] - coarse[1]) / 3
    return 0.5 * (d_re - 1j * d_im), 0.5 * (d_re + 1j * d_im)


def lattice_identity_residual(record: PeriodRecord) -> complex:
    """(2/3) x0 c1 + 2 A(inf+) - 2 c1 kappa1, zero for the concrete Abel branch."""
    return (2 / 3) * record.x0 * record.c1 + 2 * record.AbelInfPlus - 2 * record.c1 * record.kappa1


def period_record(config: EllipticConfig) -> PeriodRecord:
    record = periods(config)
    second_kind(config, record)
    abel_values(config, record)
    phases(config, record)
    record.checks["lattice_identity"] = abs(lattice_identity_residual(record))
    return record


@dataclass
class StokesGraph:
    """Zero-level arcs of Re(2H + Lambda) traced from the branch points.

    `bounded` maps (start label, end label) to the arc joining two branch
    points; `unbounded` holds the arcs leaving the disk |z| = radius;
    `endpoint_levels` records the accumulated level value on arrival at a
    branch point, which the Boutroux conditions force to vanish."""

    bounded: dict
    unbounded: list
    endpoint_levels: dict
    radius: float


def _launch_angles(config: EllipticConfig, point: complex) -> list[float]:
    others = [r for r in config.roots if r != point]
    k = cmath.sqrt(np.prod([point - r for r in others]))
    return [(2 / 3) * (math.pi / 2 - cmath.phase(k) + n * math.pi) for n in range(3)]


def _continued_root(radical: QuarticRadical, z: complex, previous: complex) -> complex:
    value = cmath.sqrt(complex(radical.quartic(z)))
    return value if abs(value - previous) <= abs(value + previous) else -value


def _trace_level_arc(config, radical, point, angle, step, radius, offset):
    labels = dict(zip(config.roots, "ABCD"))
    others = [r for r in config.roots if r != point]
    k = cmath.sqrt(np.prod([point - r for r in others]))
    z = point + offset * cmath.exp(1j * angle)
    # local expansion R ~ k sqrt(z - P) fixes the sheet at the launch point
    R = k * cmath.sqrt(z - point)
    R = _continued_root(radical, z, R)
    start_local = lambda s: (
        np.sqrt(np.asarray(s) - point)
        * np.sqrt(np.prod([np.asarray(s) - r for r in others], axis=0) / k**2)
        * k
    )
    level = float((3 * segment_quadrature(start_local, point, z)).real)
    points = [point, z]
    heading = cmath.exp(1j * angle)
    nodes, weights = np.polynomial.legendre.leggauss(3)
    while len(points) < 20000:
        def direction(at, ref):
            value = _continued_root(radical, at, ref)
            d = 1j * value.conjugate()
            d /= abs(d)
            return d if (d * heading.conjugate()).real >= 0 else -d

        k1 = direction(z, R)
        k2 = direction(z + 0.5 * step * k1, R)
        k3 = direction(z + 0.5 * step * k2, R)
        k4 = direction(z + step * k3, R)
        target = z + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        # accumulate the level value along the step, then project back onto it
        for _ in range(2):
            mids = z + (target - z) * (nodes + 1) / 2
            values, ref = [], R
            for s in mids:
                ref = _continued_root(radical, s, ref)
                values.append(ref)
            increment = 3 * np.dot(weights, values) * (target - z) / 2
            R_target = _continued_root(radical, target, ref)
            new_level = level + increment.real
            gradient = 3 * R_target.conjugate()
            target = target - new_level * gradient / abs(gradient) ** 2
        heading = (target - z) / abs(target - z)
        z, R, level = target, R_target, new_level
        points.append(z)
        nearest = min(others, key=lambda r: abs(z - r))
        if abs(z - nearest) < 1.5 * step:
            points.append(nearest)
            mids = z + (nearest - z) * (1 - np.cos(np.pi * (nodes + 1) / 2)) / 2
            tail = segment_quadrature(
                lambda s: np.array([_continued_root(radical, complex(t), R) for t in np.atleast_1d(s)]),
                z,
                nearest,
            )
            level += float((3 * tail).real)
            return np.array(points), labels[nearest], level
        if abs(z) > radius:
            return np.array(points), None, level
    raise InconsistentGeometry("Stokes graph tracer did not terminate")


def trace_stokes_graph(
    config: EllipticConfig, step: float = 5e-3, radius: float = 10.0, offset: float = 1e-3
) -> StokesGraph:
    radical = config.radical()
    labels = dict(zip(config.roots, "ABCD"))
    bounded, unbounded, levels = {}, [], {}
    for point in config.roots:
        for angle in _launch_angles(config, point):
            arc, end, level = _trace_level_arc(config, radical, point, angle, step, radius, offset)
            if end is None:
                unbounded.append(arc)
                continue
            key = tuple(sorted((labels[point], end)))
            levels[(labels[point], end)] = level
            if key not in bounded:
                bounded[key] = arc if labels[point] == key[0] else arc[::-1]
    return StokesGraph(bounded, unbounded, levels, radius)


def asymptotic_angles(graph: StokesGraph) -> list[float]:
    """Arguments of the unbounded arcs where they cross |z| = radius."""
    out = []
    for arc in graph.unbounded:
        inside = np.abs(arc) <= graph.radius
        last = int(np.nonzero(inside)[0][-1])
        a, b = arc[last], arc[min(last + 1, len(arc) - 1)]
        t = (graph.radius - abs(a)) / max(abs(b) - abs(a), 1e-300)
        out.append(cmath.phase(a + t * (b - a)))
    return sorted(out)
