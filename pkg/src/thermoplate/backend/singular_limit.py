"""
Vanishing thermal parameter experiments.

u^eps comes from the exact propagator of the coupled system, u0 and uI1 from
the closed forms in ``profiles``; the two paths share nothing but the data.
Sup-in-time norms are approximated on a logarithmic time grid.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .oracle import integrate_error_system, propagate
from .profiles import eval_thetaI1_hat, eval_u0_hat, eval_uI1_hat
from .quadrature import FULL, N0, DataTriple, NormResult, NormTask, l2_norm
from .rates import RateFit, fit_power_law
from .roots import solve_characteristic_cubic

logger = logging.getLogger(__name__)

DEFAULT_EPS_GRID = tuple(10.0 ** -k for k in (1.0, 1.5, 2.0, 2.5, 3.0))
FIRST_ORDER = 1
SECOND_ORDER = 2
ORDERS = (FIRST_ORDER, SECOND_ORDER)
_CONFORMING_TOL = 1e-14


def default_t_grid(count: int = 61) -> np.ndarray:
    return np.logspace(-2.0, 3.0, count)


@dataclass(frozen=True)
class EpsilonState:
    """Error system state with U_t = V, V_t = W."""

    epsilon: float
    r: float
    U_hat: complex
    V_hat: complex
    W_hat: complex

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"Invalid epsilon {self.epsilon}; the energy needs 0 < eps < 1")
        if self.r < 0.0:
            raise ValueError(f"Invalid frequency r={self.r}; must be >= 0")


@dataclass(frozen=True)
class EnergyValue:
    value: float

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise ValueError(f"Invalid energy {self.value}; must be >= 0")


def energy(state: EpsilonState) -> EnergyValue:
    eps, r2 = state.epsilon, state.r * state.r
    r4 = r2 * r2
    u, v, w = state.U_hat, state.V_hat, state.W_hat
    total = (
        abs(0.5 * r2 * v + eps * w) ** 2
        + eps / (1.0 + eps) * r4 * abs(r2 * u + (1.0 + eps) * v) ** 2
        + 0.25 * r4 * abs(v) ** 2
        + (1.0 - eps) / (2.0 * (1.0 + eps)) * r4 * r4 * abs(u) ** 2
    )
    return EnergyValue(0.5 * total)


def energy_rate(state: EpsilonState) -> float:
    """d/dt of the energy along the homogeneous error system."""
    eps, r2 = state.epsilon, state.r * state.r
    return -0.5 * (1.0 - eps) * r2**3 * abs(state.V_hat) ** 2 - 0.5 * eps * r2 * abs(state.W_hat) ** 2


def energy_state_ratio(state: EpsilonState) -> float:
    """r^4 (|V|^2 + r^4 |U|^2) / E, or 0 for the zero state."""
    e = energy(state).value
    r4 = state.r**4
    top = r4 * (abs(state.V_hat) ** 2 + r4 * abs(state.U_hat) ** 2)
    if e == 0.0:
        if top > 0.0:
            raise ValueError("Invalid state; zero energy with a nonzero displacement")
        return 0.0
    return top / e


def initial_error_state(r: float, epsilon: float, u1_hat: complex, th0_hat: complex) -> EpsilonState:
    """U(0) = U_t(0) = 0 and U_tt(0) = r^2 (u1 + theta0)."""
    return EpsilonState(epsilon, r, 0.0, 0.0, r * r * (u1_hat + th0_hat))


def error_trajectory(state: EpsilonState, t_eval: Sequence[float]) -> List[EpsilonState]:
    ys = integrate_error_system(state.r, state.epsilon, (state.U_hat, state.V_hat, state.W_hat), t_eval)
    return [EpsilonState(state.epsilon, state.r, complex(y[0]), complex(y[1]), complex(y[2])) for y in ys]


def heat_layer(t, epsilon: float, r, g_hat):
    """Initial layer e^{-r^2 t / eps} g-hat of the temperature."""
    if not epsilon > 0.0:
        raise ValueError(f"Invalid epsilon {epsilon}; must be > 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("Invalid time; t must be non-negative")
    r = np.asarray(r, dtype=float)
    return np.exp(-r * r * t / epsilon) * g_hat


@dataclass(frozen=True)
class ErrorNorms:
    epsilon: float
    n: int
    order: int
    sup_energy: float
    sup_l2: Optional[float]
    sup_temperature: float
    t_at_sup: float
    # worst relative quadrature tolerance over all norms and times
    achieved_tol: float = 0.0
    converged: bool = True


@dataclass(frozen=True)
class SweepResult:
    rows: Tuple[ErrorNorms, ...]
    energy_slope: Optional[RateFit]
    l2_slope: Optional[RateFit]
    temperature_slope: Optional[RateFit]


class _ErrorField:
    """
    Error multipliers at one time, shared by all norms of that time: the
    quadrature of each norm visits the same nodes, so evaluations are cached.
    """

    def __init__(self, data: DataTriple, epsilon: float, order: int, layer: bool = False):
        self.data = data
        self.epsilon = epsilon
        self.order = order
        self.layer = layer
        self._cache: Dict[Tuple, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def _evaluate(self, t: float, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        u0, u1, th0 = self.data.at(r)
        u_eps, v_eps, th_eps = propagate(t, r, (u0, u1, th0), self.epsilon)
        base, base_rate = eval_u0_hat(t, r, u0, u1)
        value = u_eps - base
        rate = v_eps - base_rate
        theta = th_eps + base_rate
        if self.order == SECOND_ORDER:
            corr, corr_rate = eval_uI1_hat(t, r, u0, u1)
            value = value - self.epsilon * corr
            rate = rate - self.epsilon * corr_rate
            theta = theta - self.epsilon * eval_thetaI1_hat(t, r, u0, u1)
        if self.layer:
            theta = theta - heat_layer(t, self.epsilon, r, u1 + th0)
        return value, rate, theta

    def __call__(self, t: float, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        key = (float(t), r.shape, hash(r.tobytes()))
        if key not in self._cache:
            self._cache[key] = self._evaluate(t, r)
        return self._cache[key]

    def value(self, t, r):
        return self(t, r)[0]

    def scaled_value(self, t, r):
        return r * r * self(t, r)[0]

    def rate(self, t, r):
        return self(t, r)[1]

    def theta(self, t, r):
        return self(t, r)[2]


def _check_l2_branch(n: int, data: DataTriple) -> None:
    if n < 3:
        raise ValueError(f"Invalid dimension {n} for the L2 error; the displacement bound needs n >= 3")
    if data.u1.mean != 0.0:
        raise ValueError(
            f"Invalid data {data.u1.name!r}; the L2 error needs u1 with vanishing mean, got {data.u1.mean}"
        )


def _is_conforming(data: DataTriple) -> bool:
    r = np.linspace(0.0, N0, 1025)
    return bool(np.all(np.abs(data.th0(r) + data.u1(r)) <= _CONFORMING_TOL))


def _norms_at(
    t: float, n: int, data: DataTriple, epsilon: float, order: int, include_l2: bool, layer: bool, rtol: float
) -> Tuple[float, Optional[float], float, NormResult]:
    field = _ErrorField(data, epsilon, order, layer)
    breakpoints = (data.support,) if data.support is not None else ()
    # half the eps = 1 rate a1
    decay = 0.5 * solve_characteristic_cubic().a1

    results: List[NormResult] = []

    def norm(multiplier) -> float:
        task = NormTask(n=n, multiplier=multiplier, zone=FULL, decay=decay, breakpoints=breakpoints)
        result = l2_norm(task, t, rtol)
        results.append(result)
        return result.norm

    energy_norm = norm(field.rate) + norm(field.scaled_value)
    l2 = norm(field.value) if include_l2 else None
    temperature = norm(field.theta)
    logger.debug(
        "eps=%.3g n=%d t=%.4g energy=%.6e l2=%s theta=%.6e", epsilon, n, t, energy_norm, l2, temperature
    )
    worst = max(results, key=lambda res: (not res.converged, res.achieved_tol))
    return energy_norm, l2, temperature, worst


def _sup_errors(
    epsilon: float,
    n: int,
    data: DataTriple,
    t_grid: Optional[Sequence[float]],
    order: int,
    include_l2: bool,
    layer: bool = False,
    threads: int = 1,
    rtol: float = 1e-8,
) -> ErrorNorms:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"Invalid epsilon {epsilon}; must lie in (0, 1)")
    if n < 1:
        raise ValueError(f"Invalid dimension {n}; must be >= 1")
    times = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if times.size == 0 or np.any(times <= 0.0):
        raise ValueError("Invalid time grid; need at least one positive time")

    def one(t: float):
        return _norms_at(float(t), n, data, epsilon, order, include_l2, layer, rtol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, times))
    else:
        results = [one(t) for t in times]
    energies = [e for e, _, _, _ in results]
    worst = int(np.argmax(energies))
    quality = [q for _, _, _, q in results]
    converged = all(q.converged for q in quality)
    if not converged:
        logger.warning("eps=%.3g n=%d: quadrature missed its tolerance at some times", epsilon, n)
    return ErrorNorms(
        epsilon=epsilon,
        n=n,
        order=order,
        sup_energy=max(energies),
        sup_l2=max(l2 for _, l2, _, _ in results) if include_l2 else None,  # type: ignore[type-var]
        sup_temperature=max(th for _, _, th, _ in results),
        t_at_sup=float(times[worst]),
        achieved_tol=max(q.achieved_tol for q in quality),
        converged=converged,
    )


def first_order_error(
    epsilon: float,
    n: int,
    data: DataTriple,
    t_grid: Optional[Sequence[float]] = None,
    include_l2: bool = False,
    threads: int = 1,
    rtol: float = 1e-8,
) -> ErrorNorms:
    """
    Sup over ``t_grid`` of ||U_t|| + ||r^2 U||, ||U|| (when ``include_l2``) and
    ||theta^eps - theta0|| for U = u^eps - u0.

    The L2 branch holds for n >= 3 with u1 of vanishing mean; other requests
    are rejected.
    """
    if include_l2:
        _check_l2_branch(n, data)
    return _sup_errors(epsilon, n, data, t_grid, FIRST_ORDER, include_l2, threads=threads, rtol=rtol)


def second_order_error(
    epsilon: float,
    n: int,
    data: DataTriple,
    t_grid: Optional[Sequence[float]] = None,
    include_l2: bool = False,
    threads: int = 1,
    rtol: float = 1e-8,
) -> ErrorNorms:
    """
    Sup norms of U^s = u^eps - u0 - eps uI1; needs theta0 = -u1, and the L2
    branch the same n >= 3, mean-zero u1 data as the first order.
    """
    if not _is_conforming(data):
        raise ValueError("Invalid data; the second-order error needs theta0 = -u1")
    if include_l2:
        _check_l2_branch(n, data)
    return _sup_errors(epsilon, n, data, t_grid, SECOND_ORDER, include_l2, threads=threads, rtol=rtol)


def temperature_layer_error(
    epsilon: float,
    n: int,
    data: DataTriple,
    t_grid: Optional[Sequence[float]] = None,
    threads: int = 1,
    rtol: float = 1e-8,
) -> float:
    """Sup over t of ||theta^eps - theta0 - theta^{L,0}||."""
    result = _sup_errors(epsilon, n, data, t_grid, FIRST_ORDER, False, layer=True, threads=threads, rtol=rtol)
    return result.sup_temperature


def _slope(eps: Sequence[float], values: Sequence[Optional[float]]) -> Optional[RateFit]:
    pairs = [(e, v) for e, v in zip(eps, values) if v is not None and v > 0.0]
    if len(pairs) < 2:
        return None
    return fit_power_law([p[0] for p in pairs], [p[1] for p in pairs])


def singular_limit_sweep(
    order: int,
    n: int,
    data: DataTriple,
    eps_values: Sequence[float] = DEFAULT_EPS_GRID,
    t_grid: Optional[Sequence[float]] = None,
    include_l2: bool = False,
    threads: int = 1,
    rtol: float = 1e-8,
) -> SweepResult:
    """Sup errors over an epsilon grid with log-log slopes against epsilon."""
    if order not in ORDERS:
        raise ValueError(f"Invalid order {order}; expected one of {ORDERS}")
    if not eps_values:
        raise ValueError("Invalid epsilon grid; must not be empty")
    run = first_order_error if order == FIRST_ORDER else second_order_error
    rows = tuple(
        run(eps, n, data, t_grid, include_l2=include_l2, threads=threads, rtol=rtol) for eps in eps_values
    )
    result = SweepResult(
        rows=rows,
        energy_slope=_slope(eps_values, [row.sup_energy for row in rows]),
        l2_slope=_slope(eps_values, [row.sup_l2 for row in rows]),
        temperature_slope=_slope(eps_values, [row.sup_temperature for row in rows]),
    )
    if result.energy_slope is not None:
        logger.info("order %d, n=%d: energy error slope %.4f", order, n, result.energy_slope.exponent)
    return result


def single_frequency_error(t: float, r: float, epsilon: float, data: Tuple[complex, complex, complex], order: int):
    """|U| (or |U^s|) at one (t, r)."""
    u0, u1, th0 = data
    u_eps = propagate(t, r, data, epsilon)[0]
    value = u_eps - eval_u0_hat(t, r, u0, u1)[0]
    if order == SECOND_ORDER:
        value = value - epsilon * eval_uI1_hat(t, r, u0, u1)[0]
    return float(np.abs(value))
