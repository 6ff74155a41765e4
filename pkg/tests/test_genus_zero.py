from __future__ import annotations

import cmath
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rational_painleve.genus_zero import (
    CORNERS,
    OMEGA,
    X_CORNER,
    F_value,
    corner_angle,
    cubic_residual,
    default_boundary,
    edge_residual,
    exterior_approximants,
    genus_zero_data,
    is_in_T,
    level_angles_at,
    solve_S,
    trace_F_levels,
    trace_phantom_stokes,
)

# Independent oracle: mpmath findroot (30 digits) on the edge condition along
# the positive real axis, written from the closed form with the explicit real
# root of the cubic.
X_E_ORACLE = 1.4430318723300514


def test_corner_is_exact_closed_form():
    assert X_CORNER == -((9 / 2) ** (2 / 3))
    assert abs(X_CORNER + 2.7256808892482094) < 1e-15


def test_edge_residual_vanishes_at_the_corner():
    # approached along the real axis from the left, which misses the cut of S
    assert abs(edge_residual(X_CORNER - 1e-9)) < 1e-8


def test_edge_residual_vanishes_at_right_crossing():
    assert abs(edge_residual(X_E_ORACLE)) < 1e-3
    assert abs(edge_residual(X_E_ORACLE)) < 1e-12


def test_traced_right_crossing_matches_oracle():
    assert abs(default_boundary().x_e - X_E_ORACLE) < 1e-9


def test_traced_right_crossing_matches_published_value():
    assert abs(default_boundary().x_e - 1.445) <= 1e-3


def test_corner_angle_is_two_fifths_pi():
    boundary = default_boundary()
    for index in range(3):
        assert abs(corner_angle(boundary, index) - 2 * math.pi / 5) < 0.05


def test_delta_is_positive_real_left_of_corner():
    for x in (-3.0, -4.0, -7.5):
        delta = genus_zero_data(x).Delta
        assert abs(delta.imag) < 1e-12 and delta.real > 0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 6), st.floats(-math.pi, math.pi))
def test_S_solves_cubic_and_decays(radius, angle):
    x = radius * cmath.exp(1j * angle)
    try:
        S = solve_S(x)
    except ValueError:
        return
    assert abs(cubic_residual(S, x)) < 1e-10 * max(1, abs(x))
    # S(omega x) = S(x)/omega away from the cut
    assert abs(solve_S(OMEGA * x) - S / OMEGA) < 1e-9


def test_S_tends_to_minus_two_over_x():
    x = 500 * cmath.exp(0.3j)
    assert abs(solve_S(x) * x + 2) < 1e-4


def test_region_membership():
    assert is_in_T(1) is True
    assert is_in_T(0) is True
    assert is_in_T(3) is False
    assert is_in_T(-3) is False
    assert is_in_T(default_boundary().x_e) is None


def test_F_vanishes_at_band_endpoints():
    for x in (-3, 2.5, 3 * cmath.exp(1j * math.pi / 3), 4j):
        data = genus_zero_data(x)
        assert abs(F_value(data.a, x, data)) < 1e-9
        assert abs(F_value(data.b, x, data)) < 1e-9


def test_three_level_arcs_meet_at_each_endpoint():
    for endpoint in ("a", "b"):
        angles = level_angles_at(-3, endpoint)
        assert len(angles) == 3
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * math.pi]]))
        assert np.max(np.abs(gaps - 2 * math.pi / 3)) < 0.05


def test_level_arcs_leave_both_endpoints():
    curves = trace_F_levels(-3)
    data = genus_zero_data(-3)
    starts = [curve[0] for curve in curves]
    assert sum(abs(s - data.a) < 1e-12 for s in starts) >= 2
    assert sum(abs(s - data.b) < 1e-12 for s in starts) >= 2


def test_critical_point_on_level_set_along_boundary():
    arc = default_boundary().arcs[0]
    for x in arc[50:-50:60]:
        data = genus_zero_data(x)
        assert abs(F_value(-data.S / 2, x, data)) < 1e-6


def test_phantom_curves_two_per_corner_and_unbounded():
    curves = trace_phantom_stokes(radius=4.0, step=5e-2)
    assert len(curves) == 6
    for corner in CORNERS:
        assert sum(abs(curve[0] - corner) < 1e-12 for curve in curves) == 2
    for curve in curves:
        assert abs(curve[-1]) > 4.0
        assert all(is_in_T(x) is not True for x in curve[1::10])


def test_exponential_of_lambda_single_valued_around_T():
    loop = 4 * np.exp(1j * (np.linspace(0, 2 * math.pi, 721) + 1e-3))
    lam = np.array([genus_zero_data(x).lam for x in loop])
    steps = np.diff(lam)
    steps = steps - 2j * math.pi * np.round(steps.imag / (2 * math.pi))
    assert np.max(np.abs(steps)) < 0.1
    total = steps.sum()
    assert abs(total.real) < 1e-9
    assert abs(total.imag / (2 * math.pi) - round(total.imag / (2 * math.pi))) < 1e-9


def test_exterior_approximants_are_consistent():
    U, V, P, Q = exterior_approximants(np.array([-3.0, 2.5]))
    assert np.allclose(P, -Q)
    assert np.allclose(U * V, 1 / (3 * solve_S(np.array([-3.0, 2.5]))))
