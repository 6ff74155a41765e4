from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rational_painleve.approximants as ap
from rational_painleve.boutroux import continue_along, zero_config
from rational_painleve.elliptic_data import lambda_derivatives, period_record
from rational_painleve.genus_zero import boundary_radius, solve_S

from conftest import solved


def inputs_at(x0: complex, m: int, drift: bool = False) -> ap.ApproximantInputs:
    config, record = solved(complex(x0))
    d, dbar = lambda_derivatives(config) if drift else (0j, 0j)
    return ap.ApproximantInputs(config, record, m, d, dbar)


def five_point(func, w, h=1e-3):
    return (-func(w + 2 * h) + 8 * func(w + h) - 8 * func(w - h) + func(w - 2 * h)) / (12 * h)


def sample_w(inputs, count, seed, clearance=0.15):
    """Random w away from the pole and zero lattices."""
    rng = np.random.default_rng(seed)
    spec = ap.lattices(inputs)
    out = []
    while len(out) < count:
        w = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        if all(float(ap.lattice_distance(w, inputs, o)) > clearance for o in (spec.poles, spec.zeros_U, spec.zeros_V)):
            out.append(w)
    return out


def test_product_identity_without_drift():
    inputs = inputs_at(0.4, 6)
    following = inputs.shifted(7)
    target = cmath.exp(2 / 3 + inputs.record.Lambda)
    for w in sample_w(inputs, 10, seed=1):
        product = ap.value(ap.dotU0(w, inputs)) * ap.value(ap.dotV0(w - 2 * 0.4 / 3, following))
        assert abs(product / target - 1) < 1e-6


def test_product_identity_with_drift():
    x0 = 0.3 + 0.2j
    inputs = inputs_at(x0, 6, drift=True)
    following = inputs.shifted(7)
    target = cmath.exp(2 / 3 + inputs.record.Lambda - (2 / 3) * (x0 * inputs.dLambda + np.conj(x0) * inputs.dbarLambda))
    for w in sample_w(inputs, 5, seed=2):
        product = ap.value(ap.dotU(w, inputs)) * ap.value(ap.dotV(w - 2 * x0 / 3, following))
        assert abs(product / target - 1) < 1e-5


def test_values_are_real_on_real_section():
    inputs = inputs_at(0.4, 7)
    w = np.array([0.1, 0.7, -1.3, 2.2])
    for values in (ap.dotP(w, inputs), ap.dotQ(w, inputs), ap.value(ap.dotU0(w, inputs)), ap.value(ap.dotV0(w, inputs))):
        assert np.max(np.abs(values.imag)) < 1e-9 * np.max(np.abs(values))


def test_double_periodicity():
    inputs = inputs_at(0.5j, 5)
    g1, g2 = ap.lattices(inputs).generators
    for w in sample_w(inputs, 4, seed=3):
        base = ap.dotP(w, inputs)
        assert abs(ap.dotP(w + g1, inputs) - base) < 1e-9 * max(1, abs(base))
        assert abs(ap.dotP(w + g2, inputs) - base) < 1e-9 * max(1, abs(base))


def test_elliptic_ode():
    x0 = 0.6j
    inputs = inputs_at(x0, 8)
    Pi = inputs.config.Pi
    for w in sample_w(inputs, 10, seed=4, clearance=0.3):
        p = ap.dotP(w, inputs)
        dp = five_point(lambda z: ap.dotP(z, inputs), w)
        assert abs(dp**2 - (p**4 + (2 / 3) * x0 * p**2 - (4 / 3) * p + Pi)) < 1e-6


def test_P_is_log_derivative_of_U():
    inputs = inputs_at(0.6j, 8)
    for w in sample_w(inputs, 5, seed=5, clearance=0.3):
        fd = five_point(lambda z: ap.log_dotU0(z, inputs), w)
        assert abs(fd - ap.dotP(w, inputs)) < 1e-7


def test_reflection_between_P_and_Q():
    inputs = inputs_at(0.6j, 8)
    r = inputs.record
    shift = 2 / r.U * (r.AbelQMinus - r.AbelQPlus)
    for w in sample_w(inputs, 5, seed=6, clearance=0.3):
        assert abs(ap.dotQ(w, inputs) + ap.dotP(w + shift, inputs)) < 1e-8


def test_pole_and_zero_lattices_are_disjoint():
    for x0 in (0, 0.4, 0.6j, -0.9 + 0.2j):
        inputs = inputs_at(x0, 6)
        spec = ap.lattices(inputs)
        period = min(abs(g) for g in spec.generators)
        assert ap.lattice_offset_difference(spec.poles, spec.zeros_U, spec.generators) >= 1e-3 * period


def test_lattice_equivalence_with_zero_shift():
    for x0 in (0.4, 0.6j, -0.5 - 0.5j):
        inputs = inputs_at(x0, 6)
        zeros = ap.lattices(inputs).zeros_U
        poles_next = ap.lattices(inputs.shifted(7)).poles
        assert abs(2 * x0 / 3 + poles_next - zeros) < 1e-8


def test_origin_lattice_is_hexagonal():
    inputs = ap.ApproximantInputs(zero_config(), period_record(zero_config()), 6)
    g1, g2 = ap.lattices(inputs).generators
    assert abs(abs(g1) - abs(g2)) < 1e-6
    assert abs(abs(cmath.phase(-g2 / g1)) - 2 * math.pi / 3) < 1e-4


def test_residues_in_one_cell():
    inputs = inputs_at(0.4, 7)
    spec = ap.lattices(inputs)
    radius = 0.05
    t = np.linspace(0, 2 * math.pi, 512, endpoint=False)
    for offset, residue in ((spec.poles, -1), (spec.zeros_U, 1)):
        centre = ap.nearest_lattice_point(0.3, inputs, offset)
        circle = centre + radius * np.exp(1j * t)
        integral = np.mean(ap.dotP(circle, inputs, check=False) * radius * np.exp(1j * t))
        assert abs(integral - residue) < 1e-6


def test_pole_guard_raises():
    inputs = inputs_at(0.4, 7)
    pole = ap.nearest_lattice_point(0, inputs, ap.lattices(inputs).poles)
    with pytest.raises(ap.LatticeProximity):
        ap.dotP(pole + 1e-9, inputs)


@settings(max_examples=15, deadline=None)
@given(st.floats(-1.5, 1.5))
def test_densities_positive_on_real_section(x0):
    sigma_p, sigma_l = ap.densities(solved(complex(x0))[1])
    assert sigma_p > 0 and sigma_l > 0


def test_real_average_equals_planar_average():
    for x0 in (0.4, -1.0, 1.2):
        planar, real = ap.averages(solved(complex(x0))[1])
        assert abs(planar - real) < 1e-10


def _boundary_point_and_normal(angle):
    points = [float(boundary_radius(a)[0]) * cmath.exp(1j * a) for a in (angle - 1e-4, angle, angle + 1e-4)]
    tangent = points[2] - points[0]
    normal = -1j * tangent / abs(tangent)
    if (normal * np.conj(points[1])).real < 0:
        normal = -normal
    return points[1], normal


@pytest.mark.parametrize("angle", [0.0, 2.5])
def test_average_tends_to_exterior_value_at_boundary(angle):
    x_b, normal = _boundary_point_and_normal(angle)
    inside = ap.p_macro(x_b - 0.01 * normal)
    assert abs(inside + solve_S(x_b) / 2) <= 0.05


@pytest.mark.parametrize("angle", [0.0, 2.5])
def test_macroscopic_P_continuous_across_boundary(angle):
    x_b, normal = _boundary_point_and_normal(angle)
    assert abs(ap.p_macro(x_b - 0.01 * normal) - ap.p_macro(x_b + 0.01 * normal)) <= 0.05


def test_average_approaches_exterior_value_like_inverse_log():
    # the gap times |Re H| settles to a constant as the distance d shrinks,
    # with Re H growing like log d
    x_e = float(boundary_radius(0.0)[0])
    distances = [1e-2, 1e-3, 1e-4]
    configs = continue_along([0] + [x_e - d for d in distances], step=0.02)[1:]
    exterior = -solve_S(x_e) / 2
    scaled = []
    for config in configs:
        record = period_record(config)
        scaled.append(abs(ap.averages(record)[0] - exterior) * abs(record.H.real))
    assert max(scaled) - min(scaled) < 0.05 * max(scaled)
    assert scaled[-1] / abs(period_record(configs[-1]).H.real) < scaled[0] / abs(period_record(configs[0]).H.real)


def test_density_collapse_near_boundary():
    sigma_origin = ap.densities(period_record(zero_config()))[0]
    x_b, normal = _boundary_point_and_normal(0.0)
    near = solved(complex(x_b - 0.02 * normal))[1]
    assert ap.densities(near)[0] < sigma_origin / 5


def test_p_macro_outside_and_near_boundary():
    assert abs(ap.p_macro(-3) + solve_S(-3) / 2) < 1e-15
    with pytest.raises(ValueError):
        ap.p_macro(float(boundary_radius(0.0)[0]))


def test_tiling_coordinates_reconstruct_phase():
    record = solved(0.2 + 0.3j)[1]
    alpha, beta = ap.tiling_coordinates(record)
    assert abs(2j * math.pi * alpha + record.H * beta - record.kappa1 * record.U) < 1e-10
