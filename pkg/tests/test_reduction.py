import numpy as np
import pytest

from thermoplate.backend.kernels import solution_hat
from thermoplate.backend.oracle import integrate_system
from thermoplate.backend.reduction import (
    DegenerateRootsError,
    lagrange_kernels,
    ode_residual,
    reduce_plate,
    reduce_thermoelastic_1d,
)

DATA = (1.0 + 0.2j, -0.5 + 0.3j, 0.4 - 0.8j)


@pytest.mark.parametrize("r, expected", [(1.0, (1.0, 2.0, 1.0)), (2.0, (4.0, 32.0, 64.0))])
def test_plate_coefficients(r, expected):
    assert reduce_plate().coefficients(r) == pytest.approx(expected)


def test_plate_roots_scale_with_frequency(roots):
    r = 1.7
    found = reduce_plate().roots(r)
    for lam, mu in zip(found, roots.mus):
        assert abs(lam - mu * r * r) <= 1e-12 * r * r


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_unit_thermoelastic_coefficients(r):
    symbol = reduce_thermoelastic_1d(1.0, 1.0, 1.0, 1.0)
    assert symbol.coefficients(r) == pytest.approx((r**2, 2.0 * r**2, r**4))


def test_unit_thermoelastic_roots_at_unit_frequency(roots):
    found = reduce_thermoelastic_1d(1.0, 1.0, 1.0, 1.0).roots(1.0)
    np.testing.assert_allclose(found, roots.mus, atol=1e-12)


@pytest.mark.parametrize(
    "params",
    [(0.0, 1.0, 1.0, 1.0), (1.0, -1.0, 1.0, 1.0), (1.0, 1.0, 1.0, -1.0), (1.0, 1.0, 0.0, 1.0)],
)
def test_sign_conditions(params):
    with pytest.raises(ValueError):
        reduce_thermoelastic_1d(*params)


@pytest.mark.parametrize("params", [(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 0.3, 1.5), (0.7, 3.0, -1.0, -2.0)])
@pytest.mark.parametrize("r", [0.3, 1.0, 2.5])
def test_thermoelastic_roots_are_stable(params, r):
    for lam in reduce_thermoelastic_1d(*params).roots(r):
        assert lam.real < 0.0


@pytest.mark.parametrize("order", [0, 1, 2])
def test_initial_data_reproduced(order):
    symbol = reduce_thermoelastic_1d(2.0, 0.5, 0.3, 1.5)
    state = symbol.initial_state(1.2, DATA)
    assert complex(lagrange_kernels(symbol, 0.0, 1.2, DATA, order)) == pytest.approx(state[order], abs=1e-12)


def test_initial_acceleration():
    r = 1.5
    u0, _, th0 = DATA
    state = reduce_thermoelastic_1d(2.0, 0.5, 0.3, 1.5).initial_state(r, DATA)
    assert state[2] == pytest.approx(-2.0 * r * r * u0 - 1j * 0.3 * r * th0)


@pytest.mark.parametrize("r", [0.4, 1.0, 2.0])
def test_plate_symbol_matches_solution_hat(r):
    t = np.linspace(0.0, 6.0, 7)
    from_symbol = lagrange_kernels(reduce_plate(), t, r, DATA)
    u, _ = solution_hat(t, r, DATA)
    np.testing.assert_allclose(from_symbol, u, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("params", [(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 0.3, 1.5)])
def test_thermoelastic_symbol_matches_system(params):
    symbol = reduce_thermoelastic_1d(*params)
    r = 1.0
    times = [0.5, 2.0, 5.0]
    states = integrate_system(symbol.system(r), DATA, times[-1], t_eval=times)
    for t, state in zip(times, states):
        u = complex(lagrange_kernels(symbol, t, r, DATA))
        assert abs(u - state[0]) <= 1e-7 * max(abs(state[0]), 1.0)


def test_zero_frequency_is_degenerate():
    with pytest.raises(DegenerateRootsError):
        lagrange_kernels(reduce_plate(), 1.0, 0.0, DATA)


def test_invalid_kernel_arguments():
    symbol = reduce_plate()
    with pytest.raises(ValueError):
        lagrange_kernels(symbol, -1.0, 1.0, DATA)
    with pytest.raises(ValueError):
        lagrange_kernels(symbol, 1.0, -1.0, DATA)
    with pytest.raises(ValueError):
        lagrange_kernels(symbol, 1.0, 1.0, DATA, order=-1)


def test_ode_residual_is_small():
    symbol = reduce_thermoelastic_1d(2.0, 0.5, 0.3, 1.5)
    residual = ode_residual(symbol, np.linspace(0.0, 4.0, 9), 1.3, DATA)
    assert np.max(np.abs(residual)) <= 1e-10
