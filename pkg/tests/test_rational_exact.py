from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rational_painleve.rational_exact import (
    NearPoleError,
    Poly,
    RationalFunction,
    backlund_step_down,
    backlund_step_up,
    build,
    evaluate,
    from_json,
    pii_residual,
    poly_gcd,
    poles_zeros,
    rational_u,
    rational_v,
    roots,
    to_json,
)

OMEGA = cmath.exp(2j * math.pi / 3)
small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=50)


def test_seed_pair_is_one_and_minus_y_over_six():
    y = Fraction(7, 3)
    assert rational_u(0)(y) == 1
    assert rational_v(0)(y) == -y / 6


def test_u2_matches_hand_derivation():
    # U_1 = -y/6 and U_2 = (y^3 + 6)/(36 y), derived by hand from the shift
    for y in (Fraction(1), Fraction(3), Fraction(-5, 7)):
        assert rational_u(1)(y) == -y / 6
        assert rational_u(2)(y) == (y**3 + 6) / (36 * y)


def test_u_minus_one_is_reciprocal_of_v0():
    for y in (Fraction(2), Fraction(-9, 4)):
        assert rational_u(-1)(y) == -6 / y


@pytest.mark.parametrize("m", range(-3, 5))
def test_backlund_steps_are_inverse(m):
    pair = build(m)
    back = backlund_step_down(backlund_step_up(pair))
    assert back.u == pair.u and back.v == pair.v
    up = backlund_step_up(pair)
    assert up.u == build(m + 1).u and up.v == build(m + 1).v


@pytest.mark.parametrize("m", [-4, -1, 0, 3, 6])
def test_pii_residual_for_u_and_v(m):
    rng = np.random.default_rng(m + 10)
    y = rng.uniform(-2, 2, 6) + 1j * rng.uniform(-2, 2, 6)
    assert np.max(pii_residual(m, y, "U")) < 1e-12
    assert np.max(pii_residual(m, y, "V")) < 1e-12


@pytest.mark.parametrize("m", [-3, 2, 5])
def test_rotation_and_schwarz_symmetry(m):
    pair = build(m)
    degree_gap = pair.u.num.degree - pair.u.den.degree
    for y in (0.7 + 0.4j, -1.1 + 0.3j):
        assert abs(OMEGA * evaluate(pair, "P", OMEGA * y) - evaluate(pair, "P", y)) < 1e-12
        u, u_rot = evaluate(pair, "U", y), evaluate(pair, "U", OMEGA * y)
        assert abs(u_rot - OMEGA**degree_gap * u) < 1e-12 * max(1, abs(u))
        assert abs(evaluate(pair, "U", y.conjugate()) - u.conjugate()) < 1e-12 * max(1, abs(u))


def test_evaluate_near_pole_raises_with_distance():
    pair = build(2)
    with pytest.raises(NearPoleError) as info:
        evaluate(pair, "U", 1e-12)
    assert info.value.distance < 1e-10


def test_json_round_trip_is_exact():
    m, u, v = from_json(to_json(5))
    assert m == 5 and u == rational_u(5) and v == rational_v(5)


@pytest.mark.parametrize("m", [4, 7])
def test_root_counts_and_residuals(m):
    pair = build(m)
    for kind, poly in (("zeros-of-U", pair.u.num), ("poles-of-U", pair.u.den)):
        found = roots(pair, kind)
        assert len(found) == poly.degree
        scale = max(abs(float(c)) for c in poly.coeffs)
        assert np.max(np.abs(poly.eval_float(found))) < 1e-8 * scale * max(1, np.max(np.abs(found))) ** poly.degree


def test_rescaled_roots_stay_bounded():
    zeros, poles = poles_zeros(9, rescale=True)
    assert np.max(np.abs(np.concatenate([zeros, poles]))) < 2.8


@settings(max_examples=40, deadline=None)
@given(st.lists(small_fractions, min_size=1, max_size=5), st.lists(small_fractions, min_size=1, max_size=5), small_fractions)
def test_poly_arithmetic_matches_pointwise(a, b, y):
    p, q = Poly(a), Poly(b)
    assert (p * q)(y) == p(y) * q(y)
    assert (p + q)(y) == p(y) + q(y)
    if not q.is_zero():
        quotient, remainder = p.divmod(q)
        assert quotient * q + remainder == p


@settings(max_examples=25, deadline=None)
@given(st.lists(small_fractions, min_size=1, max_size=4), st.lists(small_fractions, min_size=2, max_size=4))
def test_gcd_divides_both_and_recovers_common_factor(a, b):
    common = Poly(b)
    if common.degree < 1:
        return
    p, q = Poly(a) * common, Poly([1, 1]) * common
    g = poly_gcd(p, q)
    assert not g.is_zero()
    assert p.divmod(g)[1].is_zero() and q.divmod(g)[1].is_zero()
    assert g.degree >= common.degree


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_rational_function_reduced_form_is_pointwise_equal(re, im):
    y = complex(re, im)
    f = RationalFunction.make(Poly([2, 3, 1]), Poly([1, 1]))  # (y+1)(y+2)/(y+1)
    if abs(y + 1) > 1e-3:
        assert abs(complex(f.eval_float(y)) - (y + 2)) < 1e-12
