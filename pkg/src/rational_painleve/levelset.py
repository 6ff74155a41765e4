"""Predictor-corrector tracing of zero level curves of real functions on the plane."""

from __future__ import annotations

import numpy as np


def gradient(func, z: complex, h: float = 1e-6) -> complex:
    """Central-difference gradient packed as f_x + i f_y."""
    fx = (func(z + h) - func(z - h)) / (2 * h)
    fy = (func(z + 1j * h) - func(z - 1j * h)) / (2 * h)
    return complex(fx, fy)


def correct(func, z: complex, tol: float = 1e-12, max_iter: int = 12) -> tuple[complex, bool]:
    """Newton projection onto the level set along the gradient."""
    for _ in range(max_iter):
        value = func(z)
        if abs(value) <= tol:
            return z, True
        grad = gradient(func, z)
        if grad == 0:
            return z, False
        z = z - value * grad / abs(grad) ** 2
    return z, abs(func(z)) <= 10 * tol


def trace_curve(
    func,
    start: complex,
    direction: complex,
    step: float = 0.02,
    max_points: int = 2000,
    stop=None,
    tol: float = 1e-12,
    min_step: float = 1e-7,
) -> np.ndarray:
    """Follow func(z) = 0 from `start`, initially heading along `direction`.

    Stops when `stop(z)` is true, after `max_points`, or when the step
    collapses below `min_step`.
    """
    points = [start]
    z = start
    heading = direction / abs(direction)
    h = step
    while len(points) < max_points:
        grad = gradient(func, z)
        if grad == 0:
            break
        tangent = 1j * grad / abs(grad)
        if (tangent * np.conj(heading)).real < 0:
            tangent = -tangent
        candidate, ok = correct(func, z + h * tangent, tol)
        turn = abs(np.angle((candidate - z) * np.conj(heading))) if candidate != z else np.pi
        if not ok or turn > 0.35 or abs(candidate - z) > 2 * h:
            h *= 0.5
            if h < min_step:
                break
            continue
        heading = (candidate - z) / abs(candidate - z)
        z = candidate
        points.append(z)
        if stop is not None and stop(z):
            break
        h = min(step, 1.5 * h)
    return np.array(points)


def circle_sign_changes(func, center: complex, radius: float, samples: int = 720) -> list[complex]:
    """Points on a small circle where func changes sign, refined by bisection in angle."""
    angles = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    values = np.array([func(center + radius * np.exp(1j * a)) for a in angles])
    seeds = []
    for k in range(samples):
        lo, hi = angles[k], angles[k] + 2 * np.pi / samples
        flo, fhi = values[k], values[(k + 1) % samples]
        if np.sign(flo) == np.sign(fhi) or not np.isfinite(flo * fhi):
            continue
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            fmid = func(center + radius * np.exp(1j * mid))
            if np.sign(fmid) == np.sign(flo):
                lo, flo = mid, fmid
            else:
                hi = mid
        seeds.append(center + radius * np.exp(0.5j * (lo + hi)))
    return seeds
