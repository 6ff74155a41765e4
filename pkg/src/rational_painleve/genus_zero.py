"""Genus-zero data outside the elliptic region T.

The cubic branch S(x) solving 3S^3 + 4xS + 8 = 0 with S ~ -2/x is analytic off
the three segments joining 0 to the corners x_c, x_c e^{+-2 pi i/3}.  Those
segments lie on the rays arg x = pi, +-pi/3, so the open sector
|arg x| < pi/3 contains no cut; S is computed there by continuation from the
positive real axis (where it is the unique real root) and extended to the
other two sectors by the symmetry S(omega x) = S(x)/omega, omega = e^{2 pi i/3}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .levelset import circle_sign_changes, trace_curve

OMEGA = cmath.exp(2j * math.pi / 3)
X_CORNER = -((9 / 2) ** (2 / 3))
CORNERS = (complex(X_CORNER), X_CORNER * OMEGA, X_CORNER / OMEGA)
S_CORNER = (4 / 3) ** (1 / 3)
EDGE_CONSTANT = math.log(2 * math.sqrt(3) / 3)
_CONTINUATION_STEPS = 96


class BranchCutError(ValueError):
    """Raised when a point lies on (or numerically at) a branch cut."""


def cubic_residual(S, x):
    return 3 * S**3 + 4 * x * S + 8


def _sector(x: np.ndarray) -> np.ndarray:
    """Sector index k with x / omega^k in the closed-open sector (-pi/3, pi/3]."""
    angle = np.angle(x)
    k = np.zeros(angle.shape, dtype=int)
    k[angle > math.pi / 3] = 1
    k[angle <= -math.pi / 3] = -1
    return k


def _newton_cubic(S, x, iterations=3):
    for _ in range(iterations):
        derivative = 9 * S**2 + 4 * x
        safe = np.where(derivative == 0, 1.0, derivative)
        S = S - np.where(derivative == 0, 0.0, cubic_residual(S, x) / safe)
    return S


def _sector_root(xp: np.ndarray) -> np.ndarray:
    """S on the sector |arg x| <= pi/3 by continuation in angle from |x|."""
    rho = np.abs(xp)
    p, q = 4 * rho / 3, 8 / 3
    disc = np.sqrt(q * q / 4 + p**3 / 27)
    S = (np.cbrt(-q / 2 + disc) + np.cbrt(-q / 2 - disc)).astype(complex)
    phi = np.angle(xp)
    for t in np.linspace(0, 1, _CONTINUATION_STEPS + 1)[1:]:
        S = _newton_cubic(S, rho * np.exp(1j * phi * t))
    # Newton converges only linearly next to the double roots at the corners
    return _newton_cubic(S, xp, 60)


def solve_S(x):
    """Cubic branch analytic off the three corner segments, S ~ -2/x."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=complex))
    if np.any(_near_sigma_s(x_arr)):
        raise BranchCutError("x lies on the cut of S")
    k = _sector(x_arr)
    S = _sector_root(x_arr * OMEGA ** (-k)) * OMEGA ** (-k)
    return S if np.ndim(x) else complex(S[0])


def _near_sigma_s(x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    near = np.zeros(x.shape, dtype=bool)
    for corner in CORNERS:
        direction = corner / abs(corner)
        along = (x * np.conj(direction)).real
        across = (x * np.conj(direction)).imag
        near |= (np.abs(across) <= tol) & (along >= -tol) & (along <= abs(corner) + tol)
    return near


def cubic_roots(x: complex) -> np.ndarray:
    return np.roots([3, 0, 4 * x, 8])


def _sector_delta(SA: np.ndarray) -> np.ndarray:
    return 1j * np.sqrt(-16 / (3 * SA))


@lru_cache(maxsize=None)
def _branch_constants() -> tuple[dict, dict]:
    """Signs of Delta and 2 pi i shifts of the log in each sector, fixed by
    positivity of Delta and reality of lambda on the negative real ray beyond x_c
    and by continuity across the ray arg x = pi/3 beyond the corner."""
    eps = 1e-9
    delta_sign, log_shift = {}, {}
    for k, point in ((1, -10 + eps * 1j), (-1, -10 - eps * 1j)):
        xp = point * OMEGA ** (-k)
        SA = _sector_root(np.array([xp]))[0]
        raw = cmath.exp(1j * math.pi * k / 3) * _sector_delta(SA)
        delta_sign[k] = 1 if raw.real > 0 else -1
        raw_log = cmath.log(-3 * SA) + 1j * math.pi - 2j * math.pi * k / 3
        log_shift[k] = -round(raw_log.imag / (2 * math.pi))
    # continuity of Delta across arg x = pi/3 beyond the corner, from sector 1 into 0
    outside = 10 * cmath.exp(1j * math.pi / 3)
    from_b = _raw_delta(outside * cmath.exp(1e-9j), 1, delta_sign[1])
    from_a = _raw_delta(outside * cmath.exp(-1e-9j), 0, 1)
    delta_sign[0] = 1 if abs(from_a - from_b) < abs(from_a + from_b) else -1
    log_shift[0] = 0
    return delta_sign, log_shift


def _raw_delta(x: complex, k: int, sign: int) -> complex:
    xp = x * OMEGA ** (-k)
    SA = _sector_root(np.array([xp]))[0]
    return sign * cmath.exp(1j * math.pi * k / 3) * _sector_delta(SA)


def _log_3S(SA: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Branch of log(3S) continuous off the positive reals and the corner segments."""
    _, shift = _branch_constants()
    out = np.log(3 * SA).astype(complex)
    rotated = k != 0
    kk = k[rotated]
    out[rotated] = (
        np.log(-3 * SA[rotated])
        + 1j * math.pi
        - 2j * math.pi * kk / 3
        + 2j * math.pi * np.array([shift[-1], shift[0], shift[1]])[kk + 1]
    )
    return out


@dataclass(frozen=True)
class GenusZeroData:
    x: complex
    S: complex
    Delta: complex
    a: complex
    b: complex
    lam: complex
    lambda_branch_index: int


def genus_zero_data(x: complex) -> GenusZeroData:
    """S, Delta, band endpoints a, b and lambda = S^3/4 - log(3S) at x."""
    x = complex(x)
    xa = np.array([x])
    if _near_sigma_s(xa)[0]:
        raise BranchCutError("x lies on the cut of S")
    k = _sector(xa)
    SA = _sector_root(xa * OMEGA ** (-k))
    S = complex(SA[0] * OMEGA ** (-k[0]))
    sign, shift = _branch_constants()
    Delta = complex(sign[int(k[0])] * cmath.exp(1j * math.pi * k[0] / 3) * _sector_delta(SA)[0])
    log3S = complex(_log_3S(SA, k)[0])
    lam = S**3 / 4 - log3S
    principal = S**3 / 4 - cmath.log(3 * S)
    index = round((lam - principal).imag / (2 * math.pi))
    return GenusZeroData(x, S, Delta, (S - Delta) / 2, (S + Delta) / 2, lam, index)


def band_radical(z, a: complex, b: complex):
    """r(z) with r^2 = (z-a)(z-b), cut on the segment [a, b], r ~ z."""
    z = np.asarray(z, dtype=complex)
    offset = z - a
    safe = np.where(offset == 0, 1.0, offset)
    return np.where(offset == 0, 0.0, offset * np.sqrt((z - b) / safe))


def _edge_from_root(x, S):
    """Edge function given x and S, valid wherever r is evaluated off its cut."""
    delta_sq = 16 / (3 * S)
    delta = np.sqrt(delta_sq)
    a, b = (S - delta) / 2, (S + delta) / 2
    r = band_radical(-S / 2, a, b)
    return (x * r / 3).real - np.log(np.abs(S - r)) - 0.5 * np.log(np.abs(S)) + EDGE_CONSTANT


def edge_residual(x):
    """Re(x r/3) - log|S - r| - log|S|/2 + log(2 sqrt3/3) with r = r(-S/2); its
    zero set is the boundary of T together with the three outer rays."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=complex))
    S = solve_S(x_arr)
    out = _edge_from_root(x_arr, S)
    return out if np.ndim(x) else float(out[0])


def h_value(z, x: complex, data: GenusZeroData | None = None):
    """h = theta/2 - g from the explicit g-function formula."""
    data = data or genus_zero_data(x)
    S, Delta = data.S, data.Delta
    z = np.asarray(z, dtype=complex)
    r = band_radical(z, data.a, data.b)
    ell = np.log((S - 2 * z - 2 * r) / 4)
    return (4 * z**2 + 2 * S * z - 2 * S**2 - Delta**2) * r / 8 - ell - S**3 / 8


def g_value(z, x: complex, data: GenusZeroData | None = None):
    data = data or genus_zero_data(x)
    z = np.asarray(z, dtype=complex)
    return (z**3 + data.x * z) / 2 - h_value(z, x, data)


def F_value(z, x: complex, data: GenusZeroData | None = None):
    """F(z; x) = Re(2h + lambda)."""
    data = data or genus_zero_data(x)
    return (2 * h_value(z, x, data) + data.lam).real


def exterior_approximants(x):
    """(U, V, P, Q) leading-order approximants outside T."""
    S = solve_S(x)
    U = np.exp(x * S / 6)
    V = np.exp(-x * S / 6) / (3 * S)
    return U, V, -S / 2, S / 2


# ---------------------------------------------------------------- boundary of T


@dataclass
class BoundaryCurve:
    corners: tuple[complex, complex, complex]
    arcs: list[np.ndarray]
    x_e: float

    def polygon(self) -> np.ndarray:
        return np.concatenate([arc[:-1] for arc in self.arcs])


def _radial_root(phi: np.ndarray, rho_hi: float = 3.2, iterations: int = 60) -> np.ndarray:
    """Vectorized bisection for the boundary radius along rays of angle phi."""
    lo = np.full(phi.shape, 1e-3)
    hi = np.full(phi.shape, rho_hi)
    direction = np.exp(1j * phi)
    f_lo = edge_residual(lo * direction)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        f_mid = edge_residual(mid * direction)
        left = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def trace_boundary(points_per_arc: int = 200) -> BoundaryCurve:
    """Three arcs of the boundary of T, each found ray by ray in its own sector.

    Angles are clustered towards the corners so the polylines resolve the
    corner geometry."""
    if points_per_arc < 16:
        raise ValueError("points_per_arc must be at least 16")
    t = np.cos(np.pi * np.arange(points_per_arc) / (points_per_arc - 1))[::-1]
    arcs = []
    for k in (0, 1, -1):
        phi = (math.pi / 3) * t[1:-1] + 2 * math.pi * k / 3
        rho = _radial_root(phi)
        start = abs(X_CORNER) * cmath.exp(1j * (2 * math.pi * k / 3 - math.pi / 3))
        end = abs(X_CORNER) * cmath.exp(1j * (2 * math.pi * k / 3 + math.pi / 3))
        arcs.append(np.concatenate([[start], rho * np.exp(1j * phi), [end]]))
    x_e = float(_radial_root(np.array([0.0]))[0])
    return BoundaryCurve(CORNERS, arcs, x_e)


@lru_cache(maxsize=None)
def default_boundary() -> BoundaryCurve:
    return trace_boundary(400)


def corner_angle(boundary: BoundaryCurve, corner_index: int = 1) -> float:
    """Interior angle at a corner from the tangents of the two arcs meeting there."""
    corner = boundary.corners[corner_index]
    directions = []
    for arc in boundary.arcs:
        for end, neighbour in ((arc[0], arc[1]), (arc[-1], arc[-2])):
            if abs(end - corner) < 1e-9:
                directions.append((neighbour - end) / abs(neighbour - end))
    if len(directions) != 2:
        raise ValueError("corner is not shared by exactly two arcs")
    return abs(cmath.phase(directions[0] * np.conj(directions[1])))


def boundary_radius(phi) -> np.ndarray:
    """Radius at which the ray of angle phi meets the boundary of T."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    folded = np.angle(np.exp(1j * phi) * OMEGA ** (-_sector(np.exp(1j * phi))))
    # the rays through the corners run along the cut of S
    on_corner_ray = np.abs(np.abs(folded) - math.pi / 3) < 1e-9
    out = np.full(phi.shape, abs(X_CORNER))
    if np.any(~on_corner_ray):
        out[~on_corner_ray] = _radial_root(folded[~on_corner_ray])
    return out


def boundary_distance(x) -> np.ndarray:
    """Euclidean distance to the traced boundary polygon."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    polygon = default_boundary().polygon()
    p, q = polygon, np.roll(polygon, -1)
    d = q - p
    t = np.clip(((x[:, None] - p) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
    return np.min(np.abs(p + t * d - x[:, None]), axis=1)


def is_in_T(x, tol: float = 1e-6):
    """True inside T, False outside, None when within tol of the boundary."""
    x = complex(x)
    k = int(_sector(np.array([x]))[0])
    xp = x * OMEGA ** (-k)
    if abs(abs(cmath.phase(xp)) - math.pi / 3) < 1e-12 or x == 0:
        return abs(x) < abs(X_CORNER)
    value = edge_residual(xp)
    if abs(value) < tol:
        return None
    return value < 0


def signed_edge(x) -> float:
    """Edge residual folded into the principal sector (negative inside T)."""
    x = complex(x)
    k = int(_sector(np.array([x]))[0])
    return edge_residual(x * OMEGA ** (-k))


# ---------------------------------------------------------------- level curves


def trace_F_levels(x: complex, radius: float = 4.0, step: float = 1e-2) -> list[np.ndarray]:
    """Zero-level arcs of F(z; x) leaving the band endpoints (and -S/2 when it
    lies on the level set)."""
    data = genus_zero_data(x)

    def F(z):
        return float(F_value(z, x, data))

    seeds_from = [data.a, data.b]
    if abs(F(-data.S / 2)) < 1e-8:
        seeds_from.append(-data.S / 2)
    probe = 1e-3 * max(1.0, abs(data.Delta))
    curves = []
    for centre in seeds_from:
        for seed in circle_sign_changes(F, centre, probe):
            curve = trace_curve(
                F,
                seed,
                seed - centre,
                step=step,
                max_points=4000,
                stop=lambda z, c=centre: abs(z) > radius
                or min(abs(z - e) for e in seeds_from if e != c) < 2 * probe,
            )
            curves.append(np.concatenate([[centre], curve]))
    return curves


def level_angles_at(x: complex, endpoint: str = "a", probe: float = 1e-4) -> np.ndarray:
    """Directions (radians) in which zero-level arcs of F leave a band endpoint.

    Sign flips caused by the jump of F across the band are discarded; the band
    itself is reported as an arc when F vanishes on it."""
    data = genus_zero_data(x)
    centre, other = (data.a, data.b) if endpoint == "a" else (data.b, data.a)
    seeds = circle_sign_changes(lambda z: float(F_value(z, x, data)), centre, probe)
    band = float(np.angle(other - centre))
    angles = [float(np.angle(s - centre)) for s in seeds]
    angles = [a for a in angles if abs(np.angle(np.exp(1j * (a - band)))) > 0.05]
    midpoint = 0.5 * (data.a + data.b)
    normal = 1j * (other - centre) / abs(other - centre)
    if abs(F_value(midpoint + 1e-9 * normal, x, data)) < 1e-6:
        angles.append(band)
    return np.sort(np.array(angles))


# ---------------------------------------------------------------- phantom Stokes curves


def phantom_residual(x: complex, root: complex) -> float:
    """Edge function built from a competing root of the cubic in place of S:
    band endpoints, radical and critical point all come from `root`."""
    return float(_edge_from_root(np.array([complex(x)]), np.array([complex(root)]))[0])


def _competing_root(x: complex, reference: complex) -> complex:
    """Root of the cubic other than S(x) nearest to `reference`."""
    S = solve_S(x)
    others = sorted(cubic_roots(x), key=lambda s: abs(s - S))[1:]
    return min(others, key=lambda s: abs(s - reference))


def _tracked_root(x: complex, reference: complex) -> complex:
    roots = cubic_roots(x)
    return roots[np.argmin(np.abs(roots - reference))]


def trace_phantom_stokes(radius: float = 6.0, step: float = 2e-2, probe: float = 0.05) -> list[np.ndarray]:
    """Six exterior curves, two per corner, where the edge condition holds for
    a competing branch of the cubic.

    At a corner the competing branch is the root coalescing with S there; it
    is followed continuously along each curve."""
    curves = []
    for corner in CORNERS:
        ring = corner + probe * np.exp(1j * np.linspace(0, 2 * math.pi, 361))
        outside = [point for point in ring if not _near_sigma_s(np.array([point]))[0] and is_in_T(point) is False]
        partners = [_competing_root(point, solve_S(point)) for point in outside]
        values = [phantom_residual(p, s) for p, s in zip(outside, partners)]
        for j in range(len(outside) - 1):
            if abs(outside[j + 1] - outside[j]) > 2 * probe * math.pi / 360 * 1.5:
                continue
            if np.sign(values[j]) == np.sign(values[j + 1]):
                continue
            state = {"reference": partners[j]}

            def residual(xv, state=state):
                return phantom_residual(xv, _tracked_root(xv, state["reference"]))

            def stop(z, state=state):
                state["reference"] = _tracked_root(z, state["reference"])
                return abs(z) > radius

            lo, hi = outside[j], outside[j + 1]
            f_lo = values[j]
            for _ in range(50):
                mid = (lo + hi) / 2
                mid = corner + probe * (mid - corner) / abs(mid - corner)
                f_mid = residual(mid)
                if np.sign(f_mid) == np.sign(f_lo):
                    lo, f_lo = mid, f_mid
                else:
                    hi = mid
            seed = (lo + hi) / 2
            curve = trace_curve(residual, seed, seed - corner, step=step, max_points=3000, stop=stop)
            curves.append(np.concatenate([[corner], curve]))
    return curves
