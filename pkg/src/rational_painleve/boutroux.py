"""Boutroux configurations of the genus-one curve for x0 in the elliptic region.

For each x0 the branch points A, B, C, D are the roots of
z^4 + (2/3) x0 z^2 - (4/3) z + Pi, which builds in the three moment
conditions.  The remaining complex constant Pi = u + iv is fixed by the two
real Boutroux conditions Im Phi_+ = Im Phi_- = 0.  With the straight star
cut from C these read Re int_D^A R dz = Re int_D^B R dz = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .radical import QuarticRadical, segment_quadrature

CUBE_ROOT_FOUR_THIRDS = (4 / 3) ** (1 / 3)
_ROTATE_A = cmath.exp(-2j * math.pi / 3)
_ROTATE_B = cmath.exp(2j * math.pi / 3)


class DegenerateConfiguration(RuntimeError):
    """Two branch points have (nearly) collided."""


class ContinuationFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class EllipticConfig:
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
    def min_root_gap(self) -> float:
        r = self.roots
        return min(abs(r[i] - r[j]) for i in range(4) for j in range(i + 1, 4))

    def radical(self) -> QuarticRadical:
        return QuarticRadical(self.x0, self.Pi, self.A, self.B, self.C, self.D)

    def moment_residuals(self) -> tuple[complex, complex, complex]:
        r = np.array(self.roots)
        return (r.sum(), (r**2).sum() + 4 * self.x0 / 3, (r**3).sum() - 4)


def zero_config() -> EllipticConfig:
    k = CUBE_ROOT_FOUR_THIRDS
    return EllipticConfig(
        0j, 0j, k * cmath.exp(2j * math.pi / 3), k * cmath.exp(-2j * math.pi / 3), 0j, complex(k)
    )


def quartic_roots(x0: complex, Pi: complex) -> np.ndarray:
    coeffs = np.array([1, 0, 2 * x0 / 3, -4 / 3, Pi], dtype=complex)
    roots = np.roots(coeffs)
    deriv = np.polyder(coeffs)
    for _ in range(3):
        step = np.polyval(coeffs, roots) / np.polyval(deriv, roots)
        roots = roots - step
    return roots


def label_roots(roots, predecessor: EllipticConfig | None = None) -> tuple[complex, complex, complex, complex]:
    """Label as (A, B, C, D): D maximizes Re z, A maximizes Re(e^{-2 pi i/3} z),
    B maximizes Re(e^{2 pi i/3} z), C is the remaining root.  Conflicts fall
    back to matching the predecessor's labels."""
    roots = list(np.asarray(roots, dtype=complex))
    d = int(np.argmax([z.real for z in roots]))
    a = int(np.argmax([(z * _ROTATE_A).real for z in roots]))
    b = int(np.argmax([(z * _ROTATE_B).real for z in roots]))
    if len({a, b, d}) == 3:
        c = ({0, 1, 2, 3} - {a, b, d}).pop()
        labeled = (roots[a], roots[b], roots[c], roots[d])
        if predecessor is None or _matches(labeled, predecessor):
            return labeled
    if predecessor is None:
        raise DegenerateConfiguration("ambiguous root labels without a predecessor")
    return _match_predecessor(roots, predecessor)


def _matches(labeled, predecessor: EllipticConfig) -> bool:
    ours = np.array(labeled)
    theirs = np.array(predecessor.roots)
    gap = predecessor.min_root_gap
    return bool(np.all(np.abs(ours - theirs) < 0.5 * gap))


def _match_predecessor(roots, predecessor: EllipticConfig):
    from itertools import permutations

    best = min(
        permutations(range(4)),
        key=lambda perm: sum(abs(roots[perm[k]] - predecessor.roots[k]) for k in range(4)),
    )
    return tuple(roots[k] for k in best)


def _config_from_pi(x0: complex, Pi: complex, predecessor: EllipticConfig | None) -> EllipticConfig:
    A, B, C, D = label_roots(quartic_roots(x0, Pi), predecessor)
    return EllipticConfig(complex(x0), complex(Pi), A, B, C, D)


def _segment_data(config: EllipticConfig):
    """(int_D^A R, int_D^B R, int_D^A dz/2R, int_D^B dz/2R)."""
    radical = config.radical()

    def integrands(z):
        R = radical(z)
        return np.vstack([R, 0.5 / R])

    ia = segment_quadrature(integrands, config.D, config.A)
    ib = segment_quadrature(integrands, config.D, config.B)
    return ia[0], ib[0], ia[1], ib[1]


def phase_constants(config: EllipticConfig) -> tuple[complex, complex]:
    """(Phi_+, Phi_-) = (2 pi - 3i int_D^A R dz, -2 pi - 3i int_D^B R dz)."""
    ia, ib, _, _ = _segment_data(config)
    return 2 * math.pi - 3j * ia, -2 * math.pi - 3j * ib


def boutroux_residuals(config: EllipticConfig) -> tuple[float, float]:
    """(Im Phi_+, Im Phi_-)."""
    plus, minus = phase_constants(config)
    return plus.imag, minus.imag


def triangle_phases(config: EllipticConfig) -> tuple[complex, complex]:
    """Phi_+- from the three-segment form -i(3/2)(int_D^A -+ int_A^B - int_B^D) R dz,
    valid when the segment A->B misses the star."""
    radical = config.radical()
    i_da = segment_quadrature(radical, config.D, config.A)
    i_ab = segment_quadrature(radical, config.A, config.B)
    i_bd = segment_quadrature(radical, config.B, config.D)
    plus = -1.5j * (i_da - i_ab - i_bd)
    minus = -1.5j * (i_da + i_ab - i_bd)
    return plus, minus


def solve_config(
    x0: complex,
    seed: EllipticConfig,
    tol: float = 1e-11,
    max_iter: int = 30,
    min_gap: float = 1e-4,
) -> EllipticConfig:
    """Newton on (u, v) for the Boutroux conditions; roots relabeled each step."""
    x0 = complex(x0)
    Pi = seed.Pi
    previous = seed
    for _ in range(max_iter):
        config = _config_from_pi(x0, Pi, previous)
        if config.min_root_gap < min_gap:
            raise DegenerateConfiguration(_collision_message(config))
        ia, ib, ja, jb = _segment_data(config)
        residual = np.array([-3 * ia.real, -3 * ib.real])
        if np.max(np.abs(residual)) <= tol:
            return config
        jacobian = np.array(
            [[-3 * ja.real, -3 * (1j * ja).real], [-3 * jb.real, -3 * (1j * jb).real]]
        )
        if abs(np.linalg.det(jacobian)) < 1e-14:
            raise DegenerateConfiguration("singular Boutroux Jacobian")
        du, dv = np.linalg.solve(jacobian, -residual)
        step = complex(du, dv)
        if abs(step) > 0.5:
            step *= 0.5 / abs(step)
        Pi = Pi + step
        previous = config
    raise ContinuationFailure(f"Boutroux Newton did not converge at x0={x0}")


def _collision_message(config: EllipticConfig) -> str:
    names = "ABCD"
    r = config.roots
    i, j = min(
        ((i, j) for i in range(4) for j in range(i + 1, 4)), key=lambda p: abs(r[p[0]] - r[p[1]])
    )
    return f"branch points {names[i]} and {names[j]} collide at x0={config.x0}"


def continue_along(
    path,
    seed: EllipticConfig | None = None,
    step: float = 0.05,
    min_step: float = 1e-4,
) -> list[EllipticConfig]:
    """Continuation through the points of `path` (first point must match the
    seed), with adaptive sub-stepping and linear prediction of Pi."""
    seed = seed or zero_config()
    path = [complex(p) for p in path]
    configs = [seed]
    history = [seed]
    for target in path[1:]:
        current = history[-1]
        while abs(target - current.x0) > 1e-15:
            h = min(step, abs(target - current.x0))
            while True:
                nxt = current.x0 + h * (target - current.x0) / abs(target - current.x0)
                if abs(target - nxt) < 1e-12:
                    nxt = target
                guess = current
                if len(history) >= 2 and abs(history[-2].x0 - current.x0) > 0:
                    slope = (current.Pi - history[-2].Pi) / (current.x0 - history[-2].x0)
                    guess = replace(current, Pi=current.Pi + slope * (nxt - current.x0))
                try:
                    solved = solve_config(nxt, guess)
                    if not _matches(solved.roots, current) and h > min_step:
                        raise ContinuationFailure("label jump")
                    break
                except ContinuationFailure:
                    h *= 0.5
                    if h < min_step:
                        raise
            history.append(solved)
            current = solved
        configs.append(history[-1])
    return configs


def solve_at(x0: complex, step: float = 0.05) -> EllipticConfig:
    """Configuration at x0 by continuation along the ray from the origin."""
    x0 = complex(x0)
    if x0 == 0:
        return zero_config()
    return continue_along([0, x0], step=step)[-1]


def dbar_Pi_check(x0: complex, h: float = 1e-3, base: EllipticConfig | None = None) -> complex:
    """Central finite-difference d-bar derivative of Pi at x0."""
    base = base or solve_at(x0)
    values = {}
    for name, offset in (("xp", h), ("xm", -h), ("yp", 1j * h), ("ym", -1j * h)):
        values[name] = solve_config(base.x0 + offset, base).Pi
    d_re = (values["xp"] - values["xm"]) / (2 * h)
    d_im = (values["yp"] - values["ym"]) / (2 * h)
    return 0.5 * (d_re + 1j * d_im)
