"""The quartic radical R(z) and path quadrature on the genus-one curve.

R(z)^2 = z^4 + (2/3) x0 z^2 - (4/3) z + Pi with R ~ z^2 at infinity.  The
branch cut is the "star" of three straight segments C->A, C->B, C->D,
realized exactly by

    R(z) = (z - C)^2 * prod_{k = A, B, D} sqrt((z - k)/(z - C))

since each principal square root is cut precisely on the segment [C, k].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

QUAD_TOL = 1e-12
_MAX_NODES = 4096


@lru_cache(maxsize=None)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n)
    return x, w


def segments_intersect(p1: complex, p2: complex, q1: complex, q2: complex, eps: float = 1e-12) -> bool:
    """Proper intersection of two closed segments, ignoring shared endpoints."""

    def orient(a, b, c):
        return (np.conj(b - a) * (c - a)).imag

    shared = min(abs(p1 - q1), abs(p1 - q2), abs(p2 - q1), abs(p2 - q2)) < eps
    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if shared:
        # segments sharing an endpoint only meet elsewhere if collinear and overlapping
        if abs(d1) < eps and abs(d2) < eps:
            direction_p = (p2 - p1) if abs(p1 - q1) < eps or abs(p1 - q2) < eps else (p1 - p2)
            common = p1 if abs(p1 - q1) < eps or abs(p1 - q2) < eps else p2
            other = q2 if abs(common - q1) < eps else q1
            return (np.conj(direction_p) * (other - common)).real > 0
        return False
    return (d1 * d2 < 0) and (d3 * d4 < 0)


@dataclass(frozen=True)
class QuarticRadical:
    x0: complex
    Pi: complex
    A: complex
    B: complex
    C: complex
    D: complex

    @property
    def roots(self) -> tuple[complex, complex, complex, complex]:
        return (self.A, self.B, self.C, self.D)

    @property
    def star(self) -> list[tuple[complex, complex]]:
        return [(self.C, self.A), (self.C, self.B), (self.C, self.D)]

    @property
    def scale(self) -> float:
        return max(abs(r) for r in self.roots) + 1.0

    def quartic(self, z):
        z = np.asarray(z, dtype=complex)
        return z**4 + (2 / 3) * self.x0 * z**2 - (4 / 3) * z + self.Pi

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        offset = z - self.C
        safe = np.where(offset == 0, 1.0, offset)
        value = safe**2
        for root in (self.A, self.B, self.D):
            value = value * np.sqrt((z - root) / safe)
        return np.where(offset == 0, 0.0, value)

    def side_value(self, z, start: complex, end: complex, side: str = "left"):
        """Boundary value of R on the oriented cut start->end.

        The exact square root of the quartic is signed by comparison with R at
        a point displaced slightly to the requested side."""
        z = np.asarray(z, dtype=complex)
        unit = (end - start) / abs(end - start)
        normal = 1j * unit if side == "left" else -1j * unit
        gap = np.minimum(np.abs(z - start), np.abs(z - end))
        # relative offset keeps the probe on the correct side near the endpoints
        delta = np.maximum(1e-2 * gap, 1e-15 * self.scale)
        probe = self(z + delta * normal)
        exact = np.sqrt(self.quartic(z))
        return np.where(np.abs(exact - probe) <= np.abs(exact + probe), exact, -exact)

    def crosses_star(self, p: complex, q: complex) -> bool:
        return any(segments_intersect(p, q, s, e) for s, e in self.star)


def segment_quadrature(func, start: complex, end: complex, tol: float = QUAD_TOL, n0: int = 24):
    """Integrate func(z) dz along the straight segment start->end.

    The cosine map z = start + (end - start)(1 - cos phi)/2 absorbs
    inverse-square-root endpoint singularities; Gauss-Legendre nodes are
    doubled until successive estimates agree.  `func` may return an array of
    shape (k, n) to integrate several integrands at once."""
    half = (end - start) / 2
    previous = None
    previous_err = np.inf
    n = n0
    while n <= _MAX_NODES:
        x, w = _gauss(n)
        phi = np.pi * (x + 1) / 2
        # measure each node from its nearer endpoint to keep z - endpoint accurate
        near_start = 2 * np.sin(phi / 2) ** 2
        near_end = 2 * np.cos(phi / 2) ** 2
        z = np.where(phi < np.pi / 2, start + half * near_start, end - half * near_end)
        jac = half * np.sin(phi) * (np.pi / 2)
        value = np.asarray(func(z)) @ (w * jac)
        if previous is not None:
            err = np.max(np.abs(value - previous))
            if err <= tol * max(1.0, float(np.max(np.abs(value)))):
                return value
            if err > previous_err:
                # rounding has overtaken truncation
                return previous
            previous_err = err
        previous = value
        n *= 2
    return previous


def ray_quadrature(func, start: complex, direction: complex, length: float = 1.0, tol: float = QUAD_TOL, n0: int = 32):
    """Integrate func(z) dz from `start` to infinity along a ray.

    Uses z = start + u L tau/(1 - tau); the integrand must decay like z^-2."""
    unit = direction / abs(direction)
    previous = None
    n = n0
    while n <= _MAX_NODES:
        x, w = _gauss(n)
        tau = (x + 1) / 2
        s = length * tau / (1 - tau)
        z = start + unit * s
        jac = unit * length / (1 - tau) ** 2 / 2
        value = np.asarray(func(z)) @ (w * jac)
        if previous is not None:
            err = np.max(np.abs(value - previous))
            if err <= tol * max(1.0, float(np.max(np.abs(value)))):
                return value
        previous = value
        n *= 2
    return previous


def polyline_quadrature(func, points, tol: float = QUAD_TOL):
    total = 0
    for p, q in zip(points[:-1], points[1:]):
        total = total + segment_quadrature(func, p, q, tol)
    return total


def _clearance(radical: QuarticRadical, points: list[complex]) -> float:
    """Smallest distance from a branch point to the polyline, ignoring branch
    points that are vertices of the polyline."""
    best = np.inf
    for root in radical.roots:
        if min(abs(root - p) for p in points) < 1e-12:
            continue
        for p, q in zip(points[:-1], points[1:]):
            d = q - p
            t = np.clip(((root - p) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
            best = min(best, abs(p + t * d - root))
    return best


def avoiding_path(radical: QuarticRadical, start: complex, end: complex) -> list[complex]:
    """Shortest path missing the star and keeping clear of the branch points.

    Candidates are the straight segment and two-leg paths through waypoints
    on a circle enclosing all branch points."""
    roots = radical.roots
    gap = min(abs(roots[i] - roots[j]) for i in range(4) for j in range(i + 1, 4))
    needed = 0.25 * min(1.0, gap)
    candidates = []
    if not radical.crosses_star(start, end):
        candidates.append([start, end])
    radius = 1.5 * radical.scale
    for angle in np.linspace(0, 2 * np.pi, 48, endpoint=False):
        waypoint = complex(radius * np.exp(1j * angle))
        if radical.crosses_star(start, waypoint) or radical.crosses_star(waypoint, end):
            continue
        candidates.append([start, waypoint, end])
    if not candidates:
        raise RuntimeError("no path avoiding the branch cut")
    scored = [(_clearance(radical, path), sum(abs(b - a) for a, b in zip(path[:-1], path[1:])), path) for path in candidates]
    clear = [item for item in scored if item[0] >= needed]
    if clear:
        return min(clear, key=lambda item: item[1])[2]
    return max(scored, key=lambda item: item[0])[2]
