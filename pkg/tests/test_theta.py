from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rational_painleve.theta import (
    ThetaParams,
    ThetaPoleProximity,
    log_theta,
    reduce_argument,
    theta_logderiv,
    theta_value,
    theta_zero_check,
    theta_zeros,
)

ORIGIN_H = 1j * math.pi - math.pi * math.sqrt(3)
params = ThetaParams(ORIGIN_H)


def brute_theta(z, H, terms=60):
    n = np.arange(-terms, terms + 1)
    return np.exp(H * n**2 / 2 + n * z).sum()


coordinates = st.floats(-4, 4)


@settings(max_examples=20, deadline=None)
@given(coordinates, coordinates)
def test_imaginary_period(re, im):
    z = complex(re, im)
    value = theta_value(z, params)
    assert abs(theta_value(z + 2j * math.pi, params) - value) < 1e-12 * abs(value)


@settings(max_examples=20, deadline=None)
@given(coordinates, coordinates)
def test_quasi_period_and_parity(re, im):
    z = complex(re, im)
    value = theta_value(z, params)
    shifted = theta_value(z + ORIGIN_H, params)
    assert abs(shifted - np.exp(-ORIGIN_H / 2 - z) * value) < 1e-12 * abs(shifted)
    assert abs(theta_value(-z, params) - value) < 1e-12 * abs(value)


@settings(max_examples=20, deadline=None)
@given(coordinates, coordinates)
def test_matches_brute_force_sum(re, im):
    z = complex(re, im)
    reference = brute_theta(z, ORIGIN_H)
    assert abs(theta_value(z, params) - reference) < 1e-12 * max(1, abs(reference))


def test_zero_at_half_period_point():
    assert theta_zero_check(params) <= 1e-10
    for zero in theta_zeros(params, count=2):
        assert abs(theta_value(zero, params)) < 1e-9 * abs(brute_theta(zero.real, ORIGIN_H.real))


def test_far_arguments_use_the_ledger():
    z = 40 + 0.3j
    value = log_theta(z, params)
    n2 = round(z.real / ORIGIN_H.real)
    reduced = z - n2 * ORIGIN_H
    expected = np.log(brute_theta(reduced, ORIGIN_H)) - n2**2 * ORIGIN_H / 2 - n2 * reduced
    difference = value - expected
    assert abs(difference.real) < 1e-10
    assert abs(math.remainder(difference.imag, 2 * math.pi)) < 1e-10


def test_reduction_bounds_real_part():
    z_r, _ = reduce_argument(np.array([17.3 - 2j, -25.0 + 1j]), params)
    assert np.all(np.abs(z_r.real) <= abs(ORIGIN_H.real) / 2 + 1e-12)


def test_logderiv_matches_finite_difference():
    z = 0.7 - 0.4j
    h = 1e-5
    fd = (log_theta(z + h, params) - log_theta(z - h, params)) / (2 * h)
    assert abs(theta_logderiv(z, params) - fd) < 1e-8


def test_logderiv_guard_near_zero():
    zero = theta_zeros(params)[0]
    with pytest.raises(ThetaPoleProximity) as info:
        theta_logderiv(zero + 1e-9, params)
    assert info.value.distance < 1e-6


@pytest.mark.parametrize("H0", [-2 * math.pi * math.sqrt(3), -6.0, -11.8])
def test_real_combination_on_real_section(H0):
    real_params = ThetaParams(1j * math.pi + H0 / 2)
    y = np.linspace(-3, 3, 13)
    values = theta_value(y - 1.5j * math.pi, real_params)
    assert np.max(np.abs(values.imag)) < 1e-10 * np.max(np.abs(values))


def test_rejects_nonnegative_real_part():
    with pytest.raises(ValueError):
        ThetaParams(0.5 + 1j)
