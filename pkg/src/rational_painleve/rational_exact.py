"""Exact rational solutions of the scaled second Painleve equation.

The pair (U_m, V_m) is generated from U_0 = 1, V_0 = -y/6 by the
recurrences

    U_{m+1} = -(1/6) y U_m - (U_m')^2 / U_m + (1/2) U_m''
    V_{m+1} = 1 / U_m

and their inverses for negative m.  Every function is stored as a reduced
quotient of polynomials with Fraction coefficients, so the logarithmic
derivatives p_m = U_m'/U_m are exact rational solutions of

    p'' = 2 p^3 + (2/3) y p - (2/3) m.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_INDEX = 16
_MODULAR_PRIMES = (1_000_000_007, 998_244_353, 2_147_483_647, 1_000_000_009)


class Poly:
    """Dense univariate polynomial with Fraction coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = [Fraction(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, value) -> Poly:
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, value=1) -> Poly:
        return cls([0] * degree + [value])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __add__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            return Poly([c * Fraction(other) for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Poly:
        result = Poly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def derivative(self) -> Poly:
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def divmod(self, divisor: Poly) -> tuple[Poly, Poly]:
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        shift = len(remainder) - len(divisor.coeffs)
        if shift < 0:
            return Poly([]), self
        quotient = [Fraction(0)] * (shift + 1)
        lead = divisor.leading
        for k in range(shift, -1, -1):
            factor = remainder[k + divisor.degree] / lead
            quotient[k] = factor
            if factor:
                for j, d in enumerate(divisor.coeffs):
                    remainder[k + j] -= factor * d
        return Poly(quotient), Poly(remainder[: divisor.degree])

    def exact_div(self, divisor: Poly) -> Poly:
        quotient, remainder = self.divmod(divisor)
        if not remainder.is_zero():
            raise ArithmeticError("division is not exact")
        return quotient

    def monic(self) -> Poly:
        return self * (1 / self.leading)

    def __call__(self, value):
        result = 0
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def eval_float(self, values):
        """Horner evaluation with complex floating coefficients."""
        values = np.asarray(values, dtype=complex)
        result = np.zeros_like(values)
        for c in reversed(self.coeffs):
            result = result * values + float(c)
        return result

    def to_pairs(self) -> list[list[str]]:
        return [[str(c.numerator), str(c.denominator)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs) -> Poly:
        return cls([Fraction(int(n), int(d)) for n, d in pairs])


def _residues_mod(poly: Poly, prime: int) -> list[int] | None:
    out = []
    for c in poly.coeffs:
        if c.denominator % prime == 0:
            return None
        out.append(c.numerator * pow(c.denominator, -1, prime) % prime)
    return out


def _gcd_degree_mod(a: list[int], b: list[int], prime: int) -> int:
    """Degree of gcd of two polynomials over GF(prime)."""

    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = trim(list(a)), trim(list(b))
    while b:
        inv = pow(b[-1], -1, prime)
        while len(a) >= len(b):
            factor = a[-1] * inv % prime
            offset = len(a) - len(b)
            for j, coef in enumerate(b):
                a[offset + j] = (a[offset + j] - factor * coef) % prime
            trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd.  A modular image certifies coprimality cheaply; otherwise
    fall back to the Euclidean algorithm over the rationals."""
    if a.is_zero():
        return b.monic() if not b.is_zero() else Poly([1])
    if b.is_zero():
        return a.monic()
    for prime in _MODULAR_PRIMES:
        ra, rb = _residues_mod(a, prime), _residues_mod(b, prime)
        if ra is None or rb is None:
            continue
        if ra[-1] % prime == 0 or rb[-1] % prime == 0:
            continue
        if _gcd_degree_mod(ra, rb, prime) == 0:
            return Poly([1])
        break
    x, y = a.monic(), b.monic()
    while not y.is_zero():
        x, y = y, x.divmod(y)[1]
        if not y.is_zero():
            y = y.monic()
    return x.monic()


@dataclass(frozen=True)
class RationalFunction:
    """Reduced quotient num/den with a monic denominator."""

    num: Poly
    den: Poly

    @classmethod
    def make(cls, num: Poly, den: Poly) -> RationalFunction:
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        common = poly_gcd(num, den)
        if common.degree > 0:
            num, den = num.exact_div(common), den.exact_div(common)
        scale = den.leading
        return cls(num * (1 / scale), den * (1 / scale))

    def reciprocal(self) -> RationalFunction:
        return RationalFunction.make(self.den, self.num)

    def __call__(self, value):
        return self.num(value) / self.den(value)

    def eval_float(self, values):
        return self.num.eval_float(values) / self.den.eval_float(values)

    def log_derivative_float(self, values):
        values = np.asarray(values, dtype=complex)
        num_d, den_d = self.num.derivative(), self.den.derivative()
        return num_d.eval_float(values) / self.num.eval_float(values) - den_d.eval_float(
            values
        ) / self.den.eval_float(values)


def _shift(f: RationalFunction) -> RationalFunction:
    """-(1/6) y f - (f')^2/f + f''/2 for f = N/D, reduced."""
    n, d = f.num, f.den
    n1, d1 = n.derivative(), d.derivative()
    n2, d2 = n1.derivative(), d1.derivative()
    y = Poly.monomial(1)
    cross = n1 * d - n * d1
    # f' = cross/D^2, f'' = ((N''D - N D'')D - 2D'(N'D - N D'))/D^3
    top = (
        y * n * n * d * d * Fraction(-1, 6)
        - cross * cross
        + n * ((n2 * d - n * d2) * d - d1 * cross * 2) * Fraction(1, 2)
    )
    bottom = n * d * d * d
    # D^3 divides the numerator whenever f has the expected structure
    d3 = d * d * d
    quotient, remainder = top.divmod(d3)
    if remainder.is_zero():
        return RationalFunction.make(quotient, n)
    return RationalFunction.make(top, bottom)


@lru_cache(maxsize=None)
def rational_pair(m: int) -> tuple[RationalFunction, RationalFunction]:
    """Exact (U_m, V_m) for |m| <= MAX_INDEX."""
    if abs(m) > MAX_INDEX:
        raise ValueError(f"|m| must not exceed {MAX_INDEX}")
    if m == 0:
        one = Poly([1])
        return RationalFunction(one, one), RationalFunction(Poly([0, Fraction(-1, 6)]), one)
    if m > 0:
        u_prev, _ = rational_pair(m - 1)
        return _shift(u_prev), u_prev.reciprocal()
    _, v_next = rational_pair(m + 1)
    return v_next.reciprocal(), _shift(v_next)


def rational_u(m: int) -> RationalFunction:
    return rational_pair(m)[0]


def rational_v(m: int) -> RationalFunction:
    return rational_pair(m)[1]


def pii_residual(m: int, y, which: str = "U") -> np.ndarray:
    """Relative residual of p'' - 2p^3 - (2/3) y p + (2/3) n for p the log
    derivative of U_m (n = m) or of V_m (n = 1 - m, the sign-flipped form of
    the equation for V_m'/V_m with parameter m - 1), in exact arithmetic at
    the binary rationals nearest the sample points."""
    f = rational_u(m) if which == "U" else rational_v(m)
    n = m if which == "U" else 1 - m
    num_derivs = [f.num]
    den_derivs = [f.den]
    for _ in range(3):
        num_derivs.append(num_derivs[-1].derivative())
        den_derivs.append(den_derivs[-1].derivative())
    constant = (Fraction(2 * n, 3), Fraction(0))
    out = []
    for value in np.atleast_1d(y):
        point = complex(value)
        yq = (Fraction(point.real), Fraction(point.imag))
        p, _, ddp = _log_derivatives(num_derivs, yq)
        q, _, ddq = _log_derivatives(den_derivs, yq)
        p, ddp = _cx_sub(p, q), _cx_sub(ddp, ddq)
        cubic = _cx_scale(_cx_mul(_cx_mul(p, p), p), 2)
        linear = _cx_scale(_cx_mul(yq, p), Fraction(2, 3))
        residual = _cx_add(_cx_sub(_cx_sub(ddp, cubic), linear), constant)
        scale = max(_cx_abs(t) for t in (ddp, cubic, linear, constant))
        out.append(_cx_abs(residual) / max(scale, 1e-300))
    return np.array(out)


def _log_derivatives(derivs, z):
    """Log derivative of f and its first two derivatives, from exact f..f'''."""
    f0, f1, f2, f3 = (_cx_eval(d, z) for d in derivs)
    a = _cx_div(f1, f0)
    b = _cx_div(f2, f0)
    c = _cx_div(f3, f0)
    second = _cx_sub(b, _cx_mul(a, a))
    third = _cx_add(
        _cx_sub(c, _cx_scale(_cx_mul(b, a), 3)), _cx_scale(_cx_mul(_cx_mul(a, a), a), 2)
    )
    return a, second, third


def _cx_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _cx_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _cx_scale(a, s):
    return (a[0] * s, a[1] * s)


def _cx_abs(a) -> float:
    return math.hypot(float(a[0]), float(a[1]))


def _cx_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cx_div(a, b):
    norm = b[0] * b[0] + b[1] * b[1]
    return ((a[0] * b[0] + a[1] * b[1]) / norm, (a[1] * b[0] - a[0] * b[1]) / norm)


def _cx_eval(poly: Poly, z):
    acc = (Fraction(0), Fraction(0))
    for c in reversed(poly.coeffs):
        acc = _cx_mul(acc, z)
        acc = (acc[0] + c, acc[1])
    return acc


def to_json(m: int) -> str:
    u, v = rational_pair(m)
    return json.dumps(
        {
            "m": m,
            "u_num": u.num.to_pairs(),
            "u_den": u.den.to_pairs(),
            "v_num": v.num.to_pairs(),
            "v_den": v.den.to_pairs(),
        }
    )


def from_json(text: str) -> tuple[int, RationalFunction, RationalFunction]:
    record = json.loads(text)
    u = RationalFunction(Poly.from_pairs(record["u_num"]), Poly.from_pairs(record["u_den"]))
    v = RationalFunction(Poly.from_pairs(record["v_num"]), Poly.from_pairs(record["v_den"]))
    return record["m"], u, v


def aberth_roots(poly: Poly, max_iter: int = 500, tol: float = 1e-14) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration on float coefficients."""
    degree = poly.degree
    if degree < 1:
        return np.zeros(0, dtype=complex)
    coeffs = np.array([float(c) for c in poly.coeffs], dtype=complex)[::-1]
    coeffs = coeffs / coeffs[0]
    deriv = np.polyder(coeffs)
    radius = max(abs(c) for c in coeffs[1:]) ** (1.0 / degree) if degree else 1.0
    radius = min(1 + radius, 2 * np.max(np.abs(coeffs[1:]) ** (1.0 / np.arange(1, degree + 1))))
    rng = random.Random(degree)
    z = np.array(
        [radius * np.exp(1j * (2 * np.pi * k / degree + 0.4 + 0.01 * rng.random())) for k in range(degree)]
    )
    for _ in range(max_iter):
        value = np.polyval(coeffs, z)
        ratio = value / np.polyval(deriv, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        correction = ratio / (1 - ratio * inv.sum(axis=1))
        z = z - correction
        if np.max(np.abs(correction) / np.maximum(1.0, np.abs(z))) < tol:
            break
    return z


def polish_roots(poly: Poly, roots: np.ndarray, high_precision: bool = False) -> np.ndarray:
    """Newton refinement against the exact coefficients."""
    if not high_precision:
        deriv = poly.derivative()
        out = roots.astype(complex)
        for _ in range(4):
            step = poly.eval_float(out) / deriv.eval_float(out)
            out = out - step
        return out
    import mpmath

    with mpmath.workdps(60):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(poly.coeffs)]
        dcoeffs = [c * (len(coeffs) - 1 - k) for k, c in enumerate(coeffs[:-1])]
        polished = []
        for root in roots:
            z = mpmath.mpc(root)
            for _ in range(8):
                z = z - mpmath.polyval(coeffs, z) / mpmath.polyval(dcoeffs, z)
            polished.append(complex(z))
    return np.array(polished)


def poles_zeros(m: int, rescale: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Zeros and poles of U_m in y, or in x = y / (m - 1/2)^(2/3) when rescaled."""
    u = rational_u(m)
    high = abs(m) > 10
    zeros = polish_roots(u.num, aberth_roots(u.num), high)
    poles = polish_roots(u.den, aberth_roots(u.den), high)
    if rescale:
        scale = abs(m - 0.5) ** (2.0 / 3.0)
        zeros, poles = zeros / scale, poles / scale
    return zeros, poles


def leading_coefficient(m: int) -> Fraction:
    u = rational_u(m)
    return u.num.leading / u.den.leading


class NearPoleError(ValueError):
    """Evaluation point is within the pole-proximity threshold."""

    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance


POLE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class RationalPair:
    m: int
    u: RationalFunction
    v: RationalFunction


def build(m: int) -> RationalPair:
    u, v = rational_pair(m)
    return RationalPair(m, u, v)


def backlund_step_up(pair: RationalPair) -> RationalPair:
    """U_{m+1} = -(1/6) y U - (U')^2/U + U''/2 and V_{m+1} = 1/U."""
    return RationalPair(pair.m + 1, _shift(pair.u), pair.u.reciprocal())


def backlund_step_down(pair: RationalPair) -> RationalPair:
    """U_{m-1} = 1/V and V_{m-1} = -(1/6) y V - (V')^2/V + V''/2."""
    return RationalPair(pair.m - 1, pair.v.reciprocal(), _shift(pair.v))


def _coefficient_scale(poly: Poly, y: complex) -> float:
    r = max(1.0, abs(y))
    return max(abs(float(c)) * r**k for k, c in enumerate(poly.coeffs))


def _guard(poly: Poly, y: complex, label: str) -> None:
    value = complex(poly.eval_float(y))
    if poly.degree >= 1 and abs(value) < POLE_THRESHOLD * _coefficient_scale(poly, y):
        slope = complex(poly.derivative().eval_float(y))
        distance = abs(value / slope) if slope != 0 else 0.0
        raise NearPoleError(f"{label} has a pole within about {distance:.3e} of y={y}", distance)


def evaluate(pair: RationalPair, which: str, y: complex) -> complex:
    """U_m, V_m, P_m = U_m'/U_m or Q_m = V_m'/V_m at a complex point."""
    y = complex(y)
    f = pair.u if which in ("U", "P") else pair.v
    _guard(f.den, y, which)
    if which in ("U", "V"):
        return complex(f.eval_float(y))
    if which not in ("P", "Q"):
        raise ValueError(f"unknown function {which!r}")
    _guard(f.num, y, which)
    return complex(f.log_derivative_float(y))


def roots(pair: RationalPair, kind: str) -> np.ndarray:
    """Roots of the numerator or denominator of U_m or V_m, Newton-polished
    against the exact coefficients."""
    f = pair.u if kind.endswith("U") else pair.v
    poly = f.num if kind.startswith("zeros") else f.den
    if kind not in ("zeros-of-U", "poles-of-U", "zeros-of-V", "poles-of-V"):
        raise ValueError(f"unknown root kind {kind!r}")
    return polish_roots(poly, aberth_roots(poly), abs(pair.m) > 10)
