from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import thermoplate
from thermoplate.backend.kernels import (
    LAGRANGE,
    STABILIZED,
    KernelSet,
    eval_kernel,
    eval_kernel_dt,
    lagrange_sum,
    one_minus_exp_ratio,
    pointwise_bound_constant,
    solution_hat,
)
from thermoplate.backend.oracle import propagate


def _reference_kernel(j, t, r, prec=113):
    """Lagrange sum in extended precision."""
    with mpmath.workprec(prec):
        mus = mpmath.polyroots([1, 1, 2, 1], maxsteps=200, extraprec=200)
        r2 = mpmath.mpf(r) ** 2
        lams = [mu * r2 for mu in mus]
        total = mpmath.mpc(0)
        for idx in range(3):
            lj = lams[idx]
            lk, ll = (lams[m] for m in range(3) if m != idx)
            numer = {0: lk * ll, 1: -(lk + ll), 2: mpmath.mpf(1)}[j]
            total += mpmath.exp(lj * mpmath.mpf(t)) * numer / ((lj - lk) * (lj - ll))
        return float(total.real)


@pytest.mark.parametrize("mode", [STABILIZED, LAGRANGE])
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_interpolation_conditions(mode, r):
    kernels = KernelSet(mode=mode)
    for order in range(3):
        values = kernels.derivatives(order, 0.0, r)
        expected = [1.0 if j == order else 0.0 for j in range(3)]
        np.testing.assert_allclose(values, expected, atol=1e-12)


def test_origin_values():
    t = np.array([0.0, 0.5, 3.0])
    for mode in (STABILIZED, LAGRANGE):
        k0, k1, k2 = KernelSet(mode=mode).kernels(t, 0.0)
        np.testing.assert_allclose(k0, 1.0, atol=1e-14)
        np.testing.assert_allclose(k1, t, atol=1e-14)
        np.testing.assert_allclose(k2, 0.5 * t * t, atol=1e-14)


def test_modes_agree_at_moderate_frequency():
    t = np.linspace(0.1, 10.0, 37)
    for r in (0.4, 1.0, 1.7):
        stab = KernelSet(mode=STABILIZED).kernels(t, r)
        lag = KernelSet(mode=LAGRANGE).kernels(t, r)
        np.testing.assert_allclose(stab, lag, rtol=1e-9, atol=1e-13)


def test_derivatives_agree_between_modes():
    t = np.linspace(0.2, 6.0, 11)
    for order in (1, 2):
        stab = KernelSet(mode=STABILIZED).derivatives(order, t, 1.3)
        lag = KernelSet(mode=LAGRANGE).derivatives(order, t, 1.3)
        np.testing.assert_allclose(stab, lag, rtol=1e-9, atol=1e-12)


def test_stabilized_matches_extended_precision_at_small_frequency():
    r, t = 1e-4, 1e4
    for j in (1, 2):
        ref = _reference_kernel(j, t, r)
        got = float(eval_kernel(j, t, r, STABILIZED))
        assert abs(got - ref) <= 1e-9 * abs(ref)


def test_naive_sum_cancellation():
    r, t = 1e-6, 1.0
    ref = _reference_kernel(1, t, r)
    naive = float(eval_kernel(1, t, r, LAGRANGE))
    stabilized = float(eval_kernel(1, t, r, STABILIZED))
    # at least six of sixteen digits gone
    assert abs(naive - ref) / abs(ref) >= 1e-10
    assert abs(stabilized - ref) / abs(ref) <= 1e-13


def test_one_minus_exp_ratio_branches():
    x = np.array([0.0, 1e-6, 1e-3, 1.0, 30.0])
    expected = np.array([1.0] + [float(-mpmath.expm1(-mpmath.mpf(v)) / v) for v in x[1:]])
    np.testing.assert_allclose(one_minus_exp_ratio(x), expected, rtol=1e-14)


def test_lagrange_sum_distinct_roots():
    lams = (-1.0, -2.0, -3.0)
    t = np.linspace(0.0, 2.0, 5)
    # K2 of (D + 1)(D + 2)(D + 3) is (e^-t - 2 e^-2t + e^-3t) / 2
    expected = 0.5 * (np.exp(-t) - 2.0 * np.exp(-2.0 * t) + np.exp(-3.0 * t))
    np.testing.assert_allclose(lagrange_sum(lams, t, 2).real, expected, atol=1e-15)


def test_multipliers_at_zero_time():
    for mode in (STABILIZED, LAGRANGE):
        mult = KernelSet(mode=mode).multipliers
        np.testing.assert_allclose(mult.u(0.0, 0.8), (1.0, 0.0, 0.0), atol=1e-12)
        np.testing.assert_allclose(mult.theta(0.0, 0.8), (0.0, 0.0, 1.0), atol=1e-12)


def test_theta_lift_agrees_between_modes():
    for t, r in ((0.5, 0.7), (2.0, 1.0), (4.0, 1.5)):
        stab = KernelSet(mode=STABILIZED).multipliers.theta(t, r)
        lag = KernelSet(mode=LAGRANGE).multipliers.theta(t, r)
        np.testing.assert_allclose(stab, lag, rtol=1e-8, atol=1e-11)


def test_solution_matches_exact_propagator(rng):
    data = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    t = np.linspace(0.0, 8.0, 9)
    for r in (0.2, 1.0, 2.5):
        u, theta = solution_hat(t, r, data)
        u_ref, _, theta_ref = propagate(t, r, data, 1.0)
        scale = np.max(np.abs(data))
        np.testing.assert_allclose(u, u_ref, atol=1e-10 * scale)
        np.testing.assert_allclose(theta, theta_ref, atol=1e-10 * scale)


coefficient = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


@given(
    st.lists(coefficient, min_size=6, max_size=6),
    st.floats(min_value=0.0, max_value=50.0),
    st.floats(min_value=0.0, max_value=3.0),
)
@settings(max_examples=50, deadline=None)
def test_superposition(values, t, r):
    a, b = values[:3], values[3:]
    combined = [x + y for x, y in zip(a, b)]
    u_sum, th_sum = solution_hat(t, r, combined)
    u_a, th_a = solution_hat(t, r, a)
    u_b, th_b = solution_hat(t, r, b)
    scale = 1.0 + max(abs(v) for v in values) * (1.0 + t)
    assert abs(u_sum - (u_a + u_b)) <= 1e-12 * scale
    assert abs(th_sum - (th_a + th_b)) <= 1e-12 * scale


def test_eval_kernel_dt_companion():
    t, r = 1.5, 0.9
    r2 = r * r
    k0, k1, k2 = (eval_kernel(j, t, r) for j in range(3))
    assert eval_kernel_dt(0, 1, t, r) == pytest.approx(-(r2**3) * k2, rel=1e-12)
    assert eval_kernel_dt(1, 1, t, r) == pytest.approx(k0 - 2.0 * r2 * r2 * k2, rel=1e-12)
    assert eval_kernel_dt(2, 1, t, r) == pytest.approx(k1 - r2 * k2, rel=1e-12)


@pytest.mark.parametrize(
    "call",
    [
        lambda: eval_kernel(3, 1.0, 1.0),
        lambda: eval_kernel(0, -1.0, 1.0),
        lambda: eval_kernel(0, 1.0, np.nan),
        lambda: eval_kernel_dt(0, 3, 1.0, 1.0),
        lambda: KernelSet(mode="exact"),
        lambda: solution_hat(1.0, 1.0, (1.0, 2.0)),
    ],
)
def test_invalid_arguments(call):
    with pytest.raises(ValueError):
        call()


def test_pointwise_bound_constant_is_moderate():
    t = np.logspace(-2, 4, 60)
    r = np.logspace(-3, 1, 60)
    c = pointwise_bound_constant(t, r)
    assert 0.0 < c < 5.0


def test_extended_precision_is_test_only():
    for path in Path(thermoplate.__file__).parent.rglob("*.py"):
        assert "mpmath" not in path.read_text(), path
