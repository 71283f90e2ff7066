import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from thermoplate.backend.roots import (
    alpha_constants,
    characteristic_roots_general,
    solve_characteristic_cubic,
)


def test_constants_match_radical_formulas(roots):
    for computed, radical in zip((roots.a0, roots.a1, roots.a2), roots.radical_constants()):
        assert abs(computed - radical) <= 1e-12


def test_constants_match_quoted_approximations(roots):
    assert round(roots.a0, 2) == 0.57
    assert round(roots.a1, 2) == 0.22
    assert round(roots.a2, 2) == 1.31


def test_alpha_constants():
    alpha_plus, alpha_minus = alpha_constants()
    hi = ((3 * math.sqrt(69) + 11) / 2) ** (1 / 3)
    lo = ((3 * math.sqrt(69) - 11) / 2) ** (1 / 3)
    assert alpha_plus == pytest.approx(hi + lo, rel=1e-14)
    assert alpha_minus == pytest.approx(hi - lo, rel=1e-14)


def test_vieta_relations(roots):
    m1, m2, m3 = roots.mus
    assert abs(m1 + m2 + m3 + 1.0) <= 1e-12
    assert abs(m1 * m2 + m1 * m3 + m2 * m3 - 2.0) <= 1e-12
    assert abs(m1 * m2 * m3 + 1.0) <= 1e-12


def test_root_order_and_signs(roots):
    real, lower, upper = roots.mus
    assert real.imag == 0.0
    assert lower == upper.conjugate()
    assert lower.imag < 0.0 < upper.imag
    assert roots.a0 > roots.a1 > 0.0


def test_solver_is_cached():
    assert solve_characteristic_cubic() is solve_characteristic_cubic()


def test_derived_constants(roots):
    assert roots.delta == pytest.approx(roots.a0 - roots.a1)
    assert roots.d == pytest.approx((roots.a0 - roots.a1) ** 2 + roots.a2**2)
    assert roots.to_row()[:3] == (roots.a0, roots.a1, roots.a2)


separated = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@given(separated, separated, separated)
@settings(max_examples=60, deadline=None)
def test_three_real_roots_recovered(a, b, c):
    xs = sorted((a, b, c))
    assume(xs[1] - xs[0] > 0.5 and xs[2] - xs[1] > 0.5)
    c2 = -(a + b + c)
    c1 = a * b + b * c + a * c
    c0 = -a * b * c
    found = sorted(lam.real for lam in characteristic_roots_general(c2, c1, c0))
    np.testing.assert_allclose(found, xs, atol=1e-9)


@given(
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=0.2, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
)
@settings(max_examples=60, deadline=None)
def test_conjugate_pair_recovered(re, im, real):
    pair = complex(re, im)
    assume(abs(pair - real) > 0.5)
    c2 = -(real + 2.0 * re)
    c1 = 2.0 * real * re + abs(pair) ** 2
    c0 = -real * abs(pair) ** 2
    first, lower, upper = characteristic_roots_general(c2, c1, c0)
    assert first.imag == 0.0
    assert lower == upper.conjugate()
    assert abs(first - real) <= 1e-8
    assert abs(upper - pair) <= 1e-8


def test_complex_coefficients():
    expected = [1.0, 1j, -1.0 - 1j]
    c = np.poly(expected)
    found = characteristic_roots_general(c[1], c[2], c[3])
    for lam in expected:
        assert min(abs(lam - f) for f in found) <= 1e-10


def test_residuals_small():
    for lam in characteristic_roots_general(1.0, 2.0, 1.0):
        assert abs(((lam + 1.0) * lam + 2.0) * lam + 1.0) <= 1e-12


@pytest.mark.parametrize("bad", [math.inf, math.nan, cmath.inf])
def test_non_finite_coefficients_rejected(bad):
    with pytest.raises(ValueError):
        characteristic_roots_general(bad, 1.0, 1.0)
