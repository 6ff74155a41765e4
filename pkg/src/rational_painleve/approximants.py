"""Genus-one approximants inside the elliptic region.

For x = x0 + eps w with eps = 1/(m - 1/2), the rational functions are
modeled by theta-function quotients built from the period data at x0.
Large exponents are kept in a ledger: every routine returning a
(value, ledger) pair represents value * exp(ledger).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .boutroux import EllipticConfig
from .elliptic_data import PeriodRecord
from .theta import ThetaParams, log_theta, theta, theta_logderiv


class LatticeProximity(ValueError):
    """Evaluation point lies within the proximity threshold of a lattice point."""

    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance


POLE_GUARD = 1e-6


@dataclass(frozen=True)
class ApproximantInputs:
    config: EllipticConfig
    record: PeriodRecord
    m: int
    dLambda: complex = 0j
    dbarLambda: complex = 0j

    @property
    def eps(self) -> float:
        return 1.0 / (self.m - 0.5)

    @property
    def theta_params(self) -> ThetaParams:
        return ThetaParams(self.record.H)

    def shifted(self, m: int) -> ApproximantInputs:
        return ApproximantInputs(self.config, self.record, m, self.dLambda, self.dbarLambda)


def _phase_shift(w, inputs: ApproximantInputs):
    """(w/2 + kappa1/eps) U."""
    r = inputs.record
    return (np.asarray(w, dtype=complex) / 2 + r.kappa1 / inputs.eps) * r.U


def _arguments(inputs: ApproximantInputs, abel_q: complex):
    r = inputs.record
    plus = r.AbelInfPlus - abel_q - r.K
    minus = -r.AbelInfPlus - abel_q - r.K
    return plus, minus


def _log_ratio(w, inputs: ApproximantInputs, abel_q: complex):
    """log[Theta(a+) Theta(a- - s) / (Theta(a-) Theta(a+ - s))], s = (w/2 + kappa1/eps) U."""
    params = inputs.theta_params
    plus, minus = _arguments(inputs, abel_q)
    shift = _phase_shift(w, inputs)
    return (
        log_theta(plus, params)
        - log_theta(minus, params)
        + log_theta(minus - shift, params)
        - log_theta(plus - shift, params)
    )


def _split(log_value):
    """(value, ledger) with |value| = 1 and ledger real."""
    log_value = np.asarray(log_value, dtype=complex)
    return np.exp(1j * log_value.imag), log_value.real


def _exponent(w, inputs: ApproximantInputs):
    r = inputs.record
    return np.asarray(w, dtype=complex) * r.Eplus + (2 / inputs.eps) * (r.kappa1 * r.Eplus - r.kappa0)


def _check_lattice(w, inputs: ApproximantInputs, offset: complex, label: str) -> None:
    distance = lattice_distance(w, inputs, offset)
    if np.any(distance < POLE_GUARD):
        raise LatticeProximity(f"w is within {float(np.min(distance)):.2e} of the {label} lattice", float(np.min(distance)))


def log_dotU0(w, inputs: ApproximantInputs):
    r = inputs.record
    prefactor = cmath.log((inputs.config.C + inputs.config.D) / 2) - r.Lambda / 2 - 1 / 3
    return prefactor + _log_ratio(w, inputs, r.AbelQPlus) + _exponent(w, inputs)


def log_dotV0(w, inputs: ApproximantInputs):
    r = inputs.record
    prefactor = cmath.log((inputs.config.C + inputs.config.D) / 2) + r.Lambda / 2 + 1 / 3
    return prefactor - _log_ratio(w, inputs, r.AbelQMinus) - _exponent(w, inputs)


def dotU0(w, inputs: ApproximantInputs, check: bool = True):
    if check:
        _check_lattice(w, inputs, lattices(inputs).poles, "pole")
    return _split(log_dotU0(w, inputs))


def dotV0(w, inputs: ApproximantInputs, check: bool = True):
    if check:
        _check_lattice(w, inputs, lattices(inputs).poles, "pole")
    return _split(log_dotV0(w, inputs))


def _drift(w, inputs: ApproximantInputs):
    w = np.asarray(w, dtype=complex)
    return w * inputs.dLambda + np.conj(w) * inputs.dbarLambda


def dotU(w, inputs: ApproximantInputs, check: bool = True):
    if check:
        _check_lattice(w, inputs, lattices(inputs).poles, "pole")
    return _split(log_dotU0(w, inputs) - _drift(w, inputs))


def dotV(w, inputs: ApproximantInputs, check: bool = True):
    if check:
        _check_lattice(w, inputs, lattices(inputs).poles, "pole")
    return _split(log_dotV0(w, inputs) + _drift(w, inputs))


def value(pair) -> np.ndarray:
    """Collapse a (value, ledger) pair."""
    v, ledger = pair
    return v * np.exp(ledger)


def _logderiv_bracket(w, inputs: ApproximantInputs, abel_q: complex):
    params = inputs.theta_params
    plus, minus = _arguments(inputs, abel_q)
    shift = _phase_shift(w, inputs)
    return theta_logderiv(plus - shift, params, check=False) - theta_logderiv(minus - shift, params, check=False)


def dotP(w, inputs: ApproximantInputs, check: bool = True):
    r = inputs.record
    if check:
        spec = lattices(inputs)
        _check_lattice(w, inputs, spec.poles, "pole")
        _check_lattice(w, inputs, spec.zeros_U, "U-zero")
    return r.Eplus + (r.U / 2) * _logderiv_bracket(w, inputs, r.AbelQPlus)


def dotQ(w, inputs: ApproximantInputs, check: bool = True):
    r = inputs.record
    if check:
        spec = lattices(inputs)
        _check_lattice(w, inputs, spec.poles, "pole")
        _check_lattice(w, inputs, spec.zeros_V, "V-zero")
    return -r.Eplus - (r.U / 2) * _logderiv_bracket(w, inputs, r.AbelQMinus)


@dataclass(frozen=True)
class LatticeSpec:
    """Lattices offset + (2 pi i/c1) n1 + (H/c1) n2 in the w-plane."""

    generators: tuple[complex, complex]
    poles: complex
    zeros_U: complex
    zeros_V: complex

    def points(self, offset: complex, count: int = 3) -> np.ndarray:
        n = np.arange(-count, count + 1)
        g1, g2 = self.generators
        return (offset + g1 * n[:, None] + g2 * n[None, :]).ravel()


def lattices(inputs: ApproximantInputs) -> LatticeSpec:
    r = inputs.record
    base = -r.kappa1 * r.U / inputs.eps
    scale = 2 / r.U
    return LatticeSpec(
        generators=(2j * math.pi / r.c1, r.H / r.c1),
        poles=scale * (r.AbelInfPlus - r.AbelQPlus + base),
        zeros_U=scale * (-r.AbelInfPlus - r.AbelQPlus + base),
        zeros_V=scale * (r.AbelInfPlus - r.AbelQMinus + base),
    )


def reduce_to_cell(w, generators: tuple[complex, complex]):
    """Coordinates (s, t) of w = s g1 + t g2, reduced to [-1/2, 1/2)."""
    g1, g2 = generators
    w = np.asarray(w, dtype=complex)
    det = (np.conj(g1) * g2).imag
    s = (np.conj(w) * g2).imag / det
    t = (np.conj(g1) * w).imag / det
    return s - np.floor(s + 0.5), t - np.floor(t + 0.5)


def lattice_distance(w, inputs: ApproximantInputs, offset: complex) -> np.ndarray:
    """Distance from w to the nearest point of offset + lattice."""
    g1, g2 = lattices(inputs).generators
    s, t = reduce_to_cell(np.asarray(w, dtype=complex) - offset, (g1, g2))
    base = s * g1 + t * g2
    best = np.full(np.shape(base), np.inf)
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            best = np.minimum(best, np.abs(base + a * g1 + b * g2))
    return best


def nearest_lattice_point(w: complex, inputs: ApproximantInputs, offset: complex) -> complex:
    """The point of offset + lattice closest to w."""
    g1, g2 = lattices(inputs).generators
    s, t = reduce_to_cell(complex(w) - offset, (g1, g2))
    base = complex(s * g1 + t * g2)
    best = min((base + a * g1 + b * g2 for a in (-1, 0, 1) for b in (-1, 0, 1)), key=abs)
    return complex(w) - best


def lattice_offset_difference(a: complex, b: complex, generators) -> float:
    """Distance between two lattice cosets."""
    g1, g2 = generators
    s, t = reduce_to_cell(a - b, generators)
    base = s * g1 + t * g2
    return float(min(abs(base + i * g1 + j * g2) for i in (-1, 0, 1) for j in (-1, 0, 1)))


def densities(record: PeriodRecord) -> tuple[float, float | None]:
    """(sigma_P, sigma_L): planar pole density and, for real x0, linear density."""
    sigma_p = -abs(record.c1) ** 2 / (2 * math.pi * record.H.real)
    sigma_l = None
    if abs(complex(record.x0).imag) < 1e-14:
        sigma_l = float((-record.c1 / record.H0).real)
    return float(sigma_p), sigma_l


def averages(record: PeriodRecord) -> tuple[complex, float | None]:
    """(<P>, <P>_R): planar mean of dotP and, for real x0, the principal-value real mean."""
    A = record.AbelInfPlus
    planar = record.Eplus - 2 * record.c1 * (A + np.conj(A)) / (record.H + np.conj(record.H))
    real = None
    if abs(complex(record.x0).imag) < 1e-14:
        real = float((record.Eplus - 4 * record.c1 * A / record.H0).real)
    return complex(planar), real


def tiling_coordinates(record: PeriodRecord) -> tuple[float, float]:
    """(alpha, beta) with kappa1 U = 2 pi i alpha + H beta."""
    z = record.kappa1 * record.U
    beta = z.real / record.H.real
    alpha = (z.imag - beta * record.H.imag) / (2 * math.pi)
    return float(alpha), float(beta)


def p_macro(x: complex) -> complex:
    """Macroscopic limit of the scaled P: the planar average inside T and
    -S(x)/2 outside."""
    from .boutroux import solve_at
    from .elliptic_data import period_record
    from .genus_zero import is_in_T, solve_S

    x = complex(x)
    inside = is_in_T(x)
    if inside is None:
        raise ValueError(f"x={x} is too close to the boundary of T")
    if not inside:
        return complex(-solve_S(x) / 2)
    return averages(period_record(solve_at(x)))[0]
