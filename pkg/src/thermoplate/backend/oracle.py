"""
Per-frequency time integration used as ground truth for the closed forms.

``integrate_system`` is classical RK4 with step-doubling error control for a
linear system y' = A y; on a linear system one RK4 step is the matrix
polynomial I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24, which is cached per step
size. ``propagate`` evaluates the coupled epsilon-system exactly through the
matrix exponential and is vectorised over frequencies.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

logger = logging.getLogger(__name__)

STEP_TOL = 1e-10
MIN_STEP = 1e-14
# dt <= STIFF_CAP * eps / r^2 resolves the thermal mode
STIFF_CAP = 0.1
# exp(B s) by power series while ||B s|| stays below this
SERIES_NORM = 0.5
SERIES_TERMS = 20


class StiffnessError(RuntimeError):
    """Step size underflow in the RK4 integrator."""


@dataclass(frozen=True)
class FrequencyODE:
    """u_t = v, v_t = -r^4 u + r^2 theta, theta_t = -(r^2/eps)(theta + v)."""

    r: float
    epsilon: float
    state: Tuple[complex, complex, complex]

    def __post_init__(self) -> None:
        if self.r < 0.0 or not math.isfinite(self.r):
            raise ValueError(f"Invalid frequency r={self.r}; must be finite and >= 0")
        if not self.epsilon > 0.0:
            raise ValueError(f"Invalid epsilon {self.epsilon}; must be > 0")
        if len(self.state) != 3 or not all(np.isfinite(complex(x)) for x in self.state):
            raise ValueError("Invalid state; expected three finite values (u, v, theta)")

    def matrix(self) -> np.ndarray:
        return coupled_matrix(self.r, self.epsilon)

    def step_cap(self) -> float:
        if self.r == 0.0:
            return math.inf
        return STIFF_CAP * min(self.epsilon, 1.0) / (self.r * self.r)


def coupled_matrix(r: float, epsilon: float = 1.0) -> np.ndarray:
    r2 = r * r
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [-r2 * r2, 0.0, r2],
            [0.0, -r2 / epsilon, -r2 / epsilon],
        ],
        dtype=complex,
    )


def third_order_matrix(r: float) -> np.ndarray:
    """Companion matrix of u''' + r^2 u'' + 2 r^4 u' + r^6 u = 0."""
    r2 = r * r
    return np.array(
        [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-(r2**3), -2.0 * r2 * r2, -r2]],
        dtype=complex,
    )


def error_system_matrix(r: float, epsilon: float) -> np.ndarray:
    """eps W_t + r^2 W + (1 + eps) r^4 V + r^6 U = 0 with U_t = V, V_t = W."""
    r2 = r * r
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [-(r2**3) / epsilon, -(1.0 + epsilon) * r2 * r2 / epsilon, -r2 / epsilon],
        ],
        dtype=complex,
    )


def _rk4_propagator(a: np.ndarray, h: float) -> np.ndarray:
    ha = h * a
    eye = np.eye(a.shape[0], dtype=complex)
    return eye + ha @ (eye + ha @ (eye / 2.0 + ha @ (eye / 6.0 + ha / 24.0)))


def integrate_system(
    a: np.ndarray,
    y0: Sequence[complex],
    t_end: float,
    dt_initial: Optional[float] = None,
    dt_max: Optional[float] = None,
    tol: float = STEP_TOL,
    t_eval: Optional[Sequence[float]] = None,
    label: str = "",
) -> np.ndarray:
    """
    Integrate y' = a y from 0 to ``t_end``.

    The local error of each step h is estimated from one step of h against two
    of h/2 and must stay below ``tol`` times the size of the current state, so
    the bound stays relative while the solution decays. Accepted steps keep the
    Richardson-extrapolated value. Returns the final state, or the states at
    the increasing times ``t_eval``.
    """
    a = np.asarray(a, dtype=complex)
    y = np.asarray(y0, dtype=complex).copy()
    if not t_end >= 0.0:
        raise ValueError(f"Invalid end time {t_end}; must be >= 0")
    times = [t_end] if t_eval is None else [float(x) for x in t_eval]
    if any(b < a_ for a_, b in zip(times, times[1:])) or (times and times[0] < 0.0):
        raise ValueError("Invalid output times; must be non-negative and increasing")
    h_max = dt_max if dt_max is not None else math.inf
    norm_a = float(np.max(np.sum(np.abs(a), axis=1)))
    h = dt_initial if dt_initial is not None else min(h_max, 0.1 / norm_a if norm_a > 0 else 1.0)
    h = min(h, h_max)
    tiny = np.finfo(float).tiny
    cache: Dict[float, np.ndarray] = {}

    def prop(step: float) -> np.ndarray:
        if step not in cache:
            if len(cache) > 64:
                cache.clear()
            cache[step] = _rk4_propagator(a, step)
        return cache[step]

    out = []
    t = 0.0
    for target in times:
        while t < target:
            step = min(h, target - t)
            full = prop(step) @ y
            half = prop(step / 2.0)
            double = half @ (half @ y)
            err = float(np.max(np.abs(double - full))) / 15.0
            scale = max(float(np.max(np.abs(y))), tiny)
            if err <= tol * scale:
                y = double + (double - full) / 15.0
                t = target if step == target - t else t + step
                if err < tol * scale / 64.0 and step == h:
                    h = min(2.0 * h, h_max)
            else:
                h = step / 2.0
                if h < MIN_STEP:
                    raise StiffnessError(f"Step size underflow at t={t:.6g} ({label or 'linear system'})")
        out.append(y.copy())
    return out[-1] if t_eval is None else np.array(out)


def integrate(
    ode: FrequencyODE, t_end: float, dt_initial: Optional[float] = None, t_eval=None
) -> np.ndarray:
    """State (u, v, theta) of the coupled epsilon-system at ``t_end``."""
    cap = ode.step_cap()
    return integrate_system(
        ode.matrix(),
        ode.state,
        t_end,
        dt_initial=min(dt_initial, cap) if dt_initial is not None else (cap if math.isfinite(cap) else None),
        dt_max=cap if math.isfinite(cap) else None,
        t_eval=t_eval,
        label=f"r={ode.r}, eps={ode.epsilon}",
    )


def integrate_third_order(r: float, t_end: float, data: Sequence[complex], t_eval=None) -> np.ndarray:
    """(u, u_t, u_tt) of the reduced third-order equation from (u0, u1, u_tt(0))."""
    cap = STIFF_CAP / (r * r) if r > 0.0 else None
    return integrate_system(
        third_order_matrix(r), data, t_end, dt_initial=cap, dt_max=cap, t_eval=t_eval, label=f"r={r}"
    )


def integrate_error_system(
    r: float, epsilon: float, state: Sequence[complex], t_eval: Sequence[float]
) -> np.ndarray:
    """Homogeneous error system (U, V, W) sampled at ``t_eval``."""
    cap = STIFF_CAP * epsilon / (r * r) if r > 0.0 else None
    return integrate_system(
        error_system_matrix(r, epsilon),
        state,
        float(t_eval[-1]),
        dt_initial=cap,
        dt_max=cap,
        t_eval=t_eval,
        label=f"r={r}, eps={epsilon}",
    )


def damped_plate_matrix(r: float) -> np.ndarray:
    """(u0, u0_t) of u_tt + r^2 u_t + r^4 u = 0."""
    r2 = r * r
    return np.array([[0.0, 1.0], [-r2 * r2, -r2]], dtype=complex)


def corrector_matrix(r: float) -> np.ndarray:
    """
    (uI1, uI1_t, u0, u0_t) of uI1_tt + r^2 uI1_t + r^4 uI1 = -r^4 u0 - r^2 u0_t
    coupled to the damped plate.
    """
    r2 = r * r
    r4 = r2 * r2
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [-r4, -r2, -r4, -r2],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -r4, -r2],
        ],
        dtype=complex,
    )


def _scaled_matrix(epsilon: float) -> np.ndarray:
    # variables (u, du/ds, theta / r^2) in s = r^2 t
    return np.array(
        [[0.0, 1.0, 0.0], [-1.0, 0.0, 1.0], [0.0, -1.0 / epsilon, -1.0 / epsilon]]
    )


def _batched_expm(b: np.ndarray, s: np.ndarray) -> np.ndarray:
    flat = s.ravel()
    out = np.empty((flat.size, 3, 3))
    norm_b = float(np.max(np.sum(np.abs(b), axis=1)))
    short = flat * norm_b <= SERIES_NORM
    if np.any(short):
        # power series keeps small entries to full relative accuracy
        bs = b[None, :, :] * flat[short, None, None]
        term = np.broadcast_to(np.eye(3), bs.shape).copy()
        total = term.copy()
        for k in range(1, SERIES_TERMS):
            term = term @ bs / k
            total += term
        out[short] = total
    if np.any(~short):
        out[~short] = expm(b[None, :, :] * flat[~short, None, None])
    return out.reshape(s.shape + (3, 3))


def propagate(t, r, data: Sequence, epsilon: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    (u, v, theta) of the coupled epsilon-system at (t, r), vectorised over r.

    In s = r^2 t the system for (u, du/ds, theta / r^2) does not depend on r,
    so one 3x3 exponential per node covers it; the data slots entering with
    r^-2 are divided by s and multiplied by t instead.
    """
    if not epsilon > 0.0:
        raise ValueError(f"Invalid epsilon {epsilon}; must be > 0")
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(t < 0.0) or np.any(r < 0.0):
        raise ValueError("Invalid arguments; t and r must be non-negative")
    t, r = np.broadcast_arrays(t, r)
    r2 = r * r
    s = r2 * t
    u0, u1, th0 = (np.asarray(d, dtype=complex) for d in data)
    phi = _batched_expm(_scaled_matrix(epsilon), s)
    live = s > 0.0
    safe = np.where(live, s, 1.0)
    # phi[..., 0, 1] / r^2 -> t and phi[..., 0, 2] / r^2 -> 0 as s -> 0
    u_from_u1 = np.where(live, t * phi[..., 0, 1] / safe, t)
    u_from_th0 = np.where(live, t * phi[..., 0, 2] / safe, 0.0)
    u = phi[..., 0, 0] * u0 + u_from_u1 * u1 + u_from_th0 * th0
    v = r2 * phi[..., 1, 0] * u0 + phi[..., 1, 1] * u1 + phi[..., 1, 2] * th0
    theta = r2 * phi[..., 2, 0] * u0 + phi[..., 2, 1] * u1 + phi[..., 2, 2] * th0
    return u, v, theta
