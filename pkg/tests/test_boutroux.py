from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rational_painleve.boutroux import (
    CUBE_ROOT_FOUR_THIRDS,
    DegenerateConfiguration,
    boutroux_residuals,
    continue_along,
    dbar_Pi_check,
    phase_constants,
    quartic_roots,
    solve_at,
    solve_config,
    triangle_phases,
    zero_config,
)
from rational_painleve.genus_zero import X_CORNER
from rational_painleve.radical import polyline_quadrature

from conftest import solved

OMEGA = cmath.exp(2j * math.pi / 3)


def test_zero_config_labels_and_moments():
    config = zero_config()
    k = CUBE_ROOT_FOUR_THIRDS
    assert config.Pi == 0
    assert abs(config.A - k * OMEGA) < 1e-15 and abs(config.B - k / OMEGA) < 1e-15
    assert config.C == 0 and config.D == k
    assert max(abs(r) for r in config.moment_residuals()) < 1e-12


def test_zero_config_is_a_boutroux_solution():
    assert max(abs(r) for r in boutroux_residuals(zero_config())) < 1e-10
    solved_again = solve_config(0, zero_config())
    assert abs(solved_again.Pi) < 1e-11


@pytest.mark.parametrize("x0", [0.5, -1.2, 0.8j, 0.6 + 0.9j, -0.4 - 0.3j])
def test_residuals_and_moments_after_continuation(x0):
    config = solve_at(x0)
    assert max(abs(r) for r in boutroux_residuals(config)) < 1e-10
    assert max(abs(r) for r in config.moment_residuals()) < 1e-12
    assert np.max(np.abs(config.radical().quartic(np.array(config.roots)))) < 1e-12


@settings(max_examples=12, deadline=None)
@given(st.floats(0, 1.3), st.floats(-math.pi, math.pi))
def test_random_interior_points_satisfy_boutroux(radius, angle):
    config = solve_at(radius * cmath.exp(1j * angle))
    assert max(abs(r) for r in boutroux_residuals(config)) < 1e-10


def test_residuals_invariant_under_path_detour():
    config = solve_at(0.6 + 0.4j)
    radical = config.radical()
    straight = -3 * polyline_quadrature(radical, [config.D, config.A]).real
    bulge = 0.5 * (config.D + config.A) * 1.6
    assert not radical.crosses_star(config.D, bulge) and not radical.crosses_star(bulge, config.A)
    detour = -3 * polyline_quadrature(radical, [config.D, bulge, config.A]).real
    assert abs(straight - detour) < 1e-10
    assert abs(straight - boutroux_residuals(config)[0]) < 1e-10


def test_triangle_form_of_phases_agrees():
    for config in (zero_config(), solve_at(0.5)):
        assert np.allclose(triangle_phases(config), phase_constants(config), atol=1e-9)


def test_real_section_is_schwarz_symmetric():
    for x0 in (0.5, -1.0, 1.2):
        config = solve_at(x0)
        assert abs(config.A - config.B.conjugate()) < 1e-10
        assert abs(config.C.imag) < 1e-10 and abs(config.D.imag) < 1e-10
        assert abs(config.Pi.imag) < 1e-10


def test_degenerate_limit_towards_left_corner():
    path = np.linspace(0, X_CORNER + 0.01, 60)
    config = continue_along(path, step=0.02)[-1]
    roots = sorted(config.roots, key=lambda r: r.real)
    triple = -(6 ** (-1 / 3))
    assert all(abs(r - triple) < 0.1 for r in roots[:3])
    assert abs(roots[3] - 3 * 6 ** (-1 / 3)) < 0.03
    spread_far = max(abs(r - triple) for r in sorted(solve_at(-2.0).roots, key=lambda r: r.real)[:3])
    assert max(abs(r - triple) for r in roots[:3]) < spread_far


def test_rotation_covariance_of_root_set():
    x0 = 0.4 + 0.3j
    base = sorted(solve_at(x0).roots, key=lambda r: cmath.phase(r))
    rotated = np.array(solve_at(OMEGA * x0).roots) * OMEGA
    for root in base:
        assert np.min(np.abs(rotated - root)) < 1e-8


def test_dbar_Pi_is_positive_real_at_origin():
    value = dbar_Pi_check(0)
    assert abs(value.imag) < 1e-8 and value.real > 0


def test_period_orientation_at_sample_points():
    rng = np.random.default_rng(7)
    radii = rng.uniform(0, 1.3, 20)
    angles = rng.uniform(-math.pi, math.pi, 20)
    for x0 in radii * np.exp(1j * angles):
        record = solved(complex(x0))[1]
        assert (record.Omega_a * record.Omega_b.conjugate()).imag < 0
        assert record.H.real < 0


def test_collision_is_reported():
    config = zero_config()
    with pytest.raises(DegenerateConfiguration):
        solve_config(0, config, min_gap=10.0)


def test_quartic_roots_solve_quartic():
    roots = quartic_roots(0.3 + 0.1j, 0.2 - 0.05j)
    values = roots**4 + (2 / 3) * (0.3 + 0.1j) * roots**2 - (4 / 3) * roots + (0.2 - 0.05j)
    assert np.max(np.abs(values)) < 1e-13
