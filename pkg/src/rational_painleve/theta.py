"""Riemann theta function of one variable with argument reduction.

    Theta(z; H) = sum_n exp(H n^2 / 2 + n z),   Re H < 0.

Values are returned as pairs (value, ledger) standing for value * exp(ledger).
The argument is reduced to z_r = z - n2 H with |Re z_r| <= |Re H|/2 using

    Theta(z_r + n2 H) = exp(-n2^2 H / 2 - n2 z_r) Theta(z_r),

so the truncated series is always summed where it is well conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOLERANCE = 1e-13
ZERO_THRESHOLD = 1e-6


class ThetaPoleProximity(ValueError):
    """The argument is within the zero-proximity threshold of a theta zero."""

    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance


@dataclass(frozen=True)
class ThetaParams:
    H: complex
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if not self.H.real <= -1e-8:
            raise ValueError(f"theta series needs Re H < 0, got {self.H}")

    @property
    def truncation(self) -> int:
        """Smallest N with sum_{|n| > N} |term| below tolerance for reduced arguments.

        After reduction |n Re z_r| <= |n| |Re H| / 2, so the terms are bounded by
        exp(Re H |n|(|n| - 1)/2) and the tail is dominated by a geometric series."""
        h = -self.H.real
        n = 1
        while True:
            lead = math.exp(-h * n * (n + 1) / 2)
            ratio = math.exp(-h * (n + 1))
            if ratio < 1 and 2 * lead / (1 - ratio) < self.tolerance:
                return n
            n += 1


def reduce_argument(z, params: ThetaParams):
    """(z_r, n2) with z = z_r + n2 H and |Re z_r| <= |Re H|/2."""
    z = np.asarray(z, dtype=complex)
    n2 = np.rint(z.real / params.H.real)
    return z - n2 * params.H, n2


def _series(z_r, params: ThetaParams, order: int = 0):
    n = np.arange(-params.truncation, params.truncation + 1)
    exponents = params.H * n**2 / 2 + np.multiply.outer(z_r, n)
    terms = np.exp(exponents)
    if order:
        terms = terms * n**order
    return terms.sum(axis=-1), np.abs(np.exp(exponents)).max(axis=-1)


def theta(z, params: ThetaParams):
    """(value, ledger) with Theta(z) = value * exp(ledger)."""
    z_r, n2 = reduce_argument(z, params)
    value, _ = _series(z_r, params)
    ledger = -(n2**2) * params.H / 2 - n2 * z_r
    return value, ledger


def theta_value(z, params: ThetaParams):
    value, ledger = theta(z, params)
    return value * np.exp(ledger)


def log_theta(z, params: ThetaParams):
    """A logarithm of Theta(z); the imaginary part is defined modulo 2 pi."""
    value, ledger = theta(z, params)
    return np.log(value) + ledger


def theta_logderiv(z, params: ThetaParams, check: bool = True):
    """Theta'(z)/Theta(z) from the differentiated reduced series.

    The ledger -n2^2 H/2 - n2 z_r contributes -n2 to the derivative."""
    z_r, n2 = reduce_argument(z, params)
    value, scale = _series(z_r, params)
    derivative, _ = _series(z_r, params, order=1)
    if check:
        small = np.abs(value) < ZERO_THRESHOLD * scale
        if np.any(small):
            distance = float(np.min(np.abs(value / derivative)[small]))
            raise ThetaPoleProximity(f"argument within about {distance:.2e} of a theta zero", distance)
    return derivative / value - n2


def theta_zero_check(params: ThetaParams) -> float:
    """|Theta(K)| relative to the largest series term, K = i pi + H/2."""
    K = 1j * math.pi + params.H / 2
    z_r, _ = reduce_argument(K, params)
    value, scale = _series(z_r, params)
    return float(abs(value) / scale)


def theta_zeros(params: ThetaParams, count: int = 1) -> np.ndarray:
    """Zeros K + 2 pi i n1 + H n2 with |n1|, |n2| < count."""
    K = 1j * math.pi + params.H / 2
    n = np.arange(-count + 1, count)
    return (K + 2j * math.pi * n[:, None] + params.H * n[None, :]).ravel()
