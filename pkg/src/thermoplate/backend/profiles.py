"""
Asymptotic profile multipliers J0..J3, combined data Psi0/Psi1, and the
structurally damped plate u0 with its Duhamel corrector uI1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import quad_vec

from .kernels import _sinc, one_minus_exp_ratio
from .quadrature import RadialData
from .roots import CharRoots, solve_characteristic_cubic

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
OMEGA = SQRT3 / 2.0
# Duhamel quadrature absolute tolerance and the s beyond which the corrector
# is below s e^{-s/2} < 1e-30 and is returned as zero
DUHAMEL_TOL = 1e-11
DUHAMEL_S_CUT = 150.0


@dataclass(frozen=True)
class CombinedData:
    """Psi0 = 2 a1 u1 + theta0, Psi1 = (a0^2 + a2^2 - a1^2) u1 + (a0 - a1) theta0."""

    u1: RadialData
    th0: RadialData
    roots: CharRoots

    @classmethod
    def from_data(cls, u1: RadialData, th0: RadialData, roots: CharRoots | None = None) -> "CombinedData":
        return cls(u1=u1, th0=th0, roots=roots or solve_characteristic_cubic())

    @property
    def coefficients(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        a0, a1, a2 = self.roots.a0, self.roots.a1, self.roots.a2
        return ((2.0 * a1, 1.0), (a0 * a0 + a2 * a2 - a1 * a1, a0 - a1))

    def psi0_hat(self, r) -> np.ndarray:
        (cu, ct), _ = self.coefficients
        return cu * self.u1(r) + ct * self.th0(r)

    def psi1_hat(self, r) -> np.ndarray:
        _, (cu, ct) = self.coefficients
        return cu * self.u1(r) + ct * self.th0(r)

    @property
    def p_psi0(self) -> float:
        (cu, ct), _ = self.coefficients
        return cu * self.u1.mean + ct * self.th0.mean

    @property
    def p_psi1(self) -> float:
        _, (cu, ct) = self.coefficients
        return cu * self.u1.mean + ct * self.th0.mean


def eval_J(j: int, t, r, roots: CharRoots | None = None) -> np.ndarray:
    """
    Profile multiplier J_j(t, r), j = 0..3.

    J0 and J1 are written as t times a smooth function of s = r^2 t; J2 and J3
    are (r^-2 d_t^2 + r^2) of J0 and J1, expanded analytically, which removes
    every r^-2.
    """
    if j not in (0, 1, 2, 3):
        raise ValueError(f"Invalid profile index {j}; expected 0..3")
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("Invalid profile time; t must be non-negative")
    if np.any(r < 0.0):
        raise ValueError("Invalid profile frequency; r must be non-negative")
    roots = roots or solve_characteristic_cubic()
    a0, a1, a2, d, delta = roots.a0, roots.a1, roots.a2, roots.d, roots.delta
    s = r * r * t
    decay = np.exp(-a1 * s)
    if j == 0:
        half = 0.5 * a2
        sin_sq_over_s = s * half * half * _sinc(half * s) ** 2
        return t / d * decay * (2.0 * sin_sq_over_s - delta * one_minus_exp_ratio(delta * s))
    if j == 1:
        return t / d * decay * _sinc(a2 * s)
    cos, sin = np.cos(a2 * s), np.sin(a2 * s)
    if j == 2:
        return (
            (a0 * a0 + 1.0) * np.exp(-a0 * s)
            - ((a1 * a1 - a2 * a2 + 1.0) * cos + 2.0 * a1 * a2 * sin) * decay
        ) / d
    return ((a1 * a1 - a2 * a2 + 1.0) * sin - 2.0 * a1 * a2 * cos) * decay / (a2 * d)


def eval_u0_hat(t, r, u0_hat, u1_hat) -> Tuple[np.ndarray, np.ndarray]:
    """Structurally damped plate u0-hat and its time derivative."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(t < 0.0) or np.any(r < 0.0):
        raise ValueError("Invalid arguments; t and r must be non-negative")
    r2 = r * r
    s = r2 * t
    phase = OMEGA * s
    cos, sin = np.cos(phase), np.sin(phase)
    decay = np.exp(-0.5 * s)
    u0_hat = np.asarray(u0_hat, dtype=complex)
    u1_hat = np.asarray(u1_hat, dtype=complex)
    # 2/sqrt(3) sin(w s) / r^2 = t sinc(w s)
    value = (sin / SQRT3 + cos) * decay * u0_hat + t * _sinc(phase) * decay * u1_hat
    rate = -2.0 / SQRT3 * r2 * sin * decay * u0_hat + (cos - sin / SQRT3) * decay * u1_hat
    return value, rate


def _damped_slots(sigma: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # (A + A')(sigma) and (B + B')(sigma) without the e^{-sigma/2} factor, where
    # u0 = A u0_hat + B u1_hat / r^2 in the scaled time sigma = r^2 tau
    cos, sin = np.cos(OMEGA * sigma), np.sin(OMEGA * sigma)
    slot0 = cos + sin / SQRT3 - 2.0 / SQRT3 * sin
    slot1 = 2.0 / SQRT3 * sin + cos - sin / SQRT3
    return slot0, slot1


def _duhamel_factors(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    h0, h1, k0, k1 with
    uI1 = s h0 u0_hat + t h1 u1_hat and uI1_t = r^2 s k0 u0_hat + s k1 u1_hat.
    """
    s = np.asarray(s, dtype=float)
    flat = s.ravel()
    out = np.zeros((4, flat.size))
    live = (flat > 0.0) & (flat <= DUHAMEL_S_CUT)
    if np.any(live):
        sl = flat[live]

        def integrand(x: float) -> np.ndarray:
            lag = sl * (1.0 - x)
            kern = np.sin(OMEGA * lag)
            kern_dt = OMEGA * np.cos(OMEGA * lag) - 0.5 * kern
            slot0, slot1 = _damped_slots(sl * x)
            return np.stack([kern * slot0, kern * slot1, kern_dt * slot0, kern_dt * slot1])

        res, err = quad_vec(integrand, 0.0, 1.0, epsabs=DUHAMEL_TOL, epsrel=0.0, norm="max", limit=20000)
        if err > DUHAMEL_TOL:
            logger.warning("Duhamel quadrature reached %.3e, above %.1e", err, DUHAMEL_TOL)
        out[:, live] = -2.0 / SQRT3 * np.exp(-0.5 * sl) * res
    # s = 0 and s > DUHAMEL_S_CUT stay zero
    return tuple(o.reshape(s.shape) for o in out)  # type: ignore[return-value]


def eval_uI1_hat(t, r, u0_hat, u1_hat) -> Tuple[np.ndarray, np.ndarray]:
    """
    Second-order corrector uI1-hat and its time derivative.

    Evaluates the Duhamel integral of the forcing -(r^2 u0 + u0_t) against the
    damped oscillator kernel with adaptive Gauss-Kronrod quadrature (absolute
    tolerance 1e-11) on the scaled interval [0, 1], vectorised over all
    frequencies at once.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(t < 0.0) or np.any(r < 0.0):
        raise ValueError("Invalid arguments; t and r must be non-negative")
    t, r = np.broadcast_arrays(t, r)
    r2 = r * r
    s = r2 * t
    h0, h1, k0, k1 = _duhamel_factors(s)
    u0_hat = np.asarray(u0_hat, dtype=complex)
    u1_hat = np.asarray(u1_hat, dtype=complex)
    value = s * h0 * u0_hat + t * h1 * u1_hat
    rate = r2 * s * k0 * u0_hat + s * k1 * u1_hat
    return value, rate


def eval_thetaI1_hat(t, r, u0_hat, u1_hat) -> np.ndarray:
    """thetaI1 = r^-2 (uI1_tt + r^4 uI1) = -uI1_t - r^2 u0 - u0_t."""
    r2 = np.asarray(r, dtype=float) ** 2
    _, corrector_rate = eval_uI1_hat(t, r, u0_hat, u1_hat)
    value, rate = eval_u0_hat(t, r, u0_hat, u1_hat)
    return -corrector_rate - r2 * value - rate


def corrector_bound_constant(t_grid, r_grid) -> Tuple[float, float]:
    """
    Fitted C for |uI1| <= C t e^{-s/2} (r^2 |u0| + |u1|) and
    |uI1_t| <= C t r^2 e^{-s/2} (r^2 |u0| + |u1|), over both unit data slots.
    """
    tt, rr = np.meshgrid(np.asarray(t_grid, dtype=float), np.asarray(r_grid, dtype=float))
    r2 = rr * rr
    envelope = tt * np.exp(-0.5 * r2 * tt)
    c_value, c_rate = 0.0, 0.0
    for u0, u1 in ((1.0, 0.0), (0.0, 1.0)):
        value, rate = eval_uI1_hat(tt, rr, u0, u1)
        scale = envelope * (r2 * abs(u0) + abs(u1))
        mask = scale > 0
        if np.any(mask):
            c_value = max(c_value, float(np.max(np.abs(value[mask]) / scale[mask])))
            mask_rate = mask & (r2 > 0)
            if np.any(mask_rate):
                c_rate = max(
                    c_rate, float(np.max(np.abs(rate[mask_rate]) / (r2 * scale)[mask_rate]))
                )
    return c_value, c_rate


def exponential_structure_residual(j: int, r: float, t_grid) -> float:
    """
    Relative least-squares residual of J_j(., r) against the span of
    e^{-a0 s}, cos(a2 s) e^{-a1 s}, sin(a2 s) e^{-a1 s} over ``t_grid``.
    """
    roots = solve_characteristic_cubic()
    t = np.asarray(t_grid, dtype=float)
    s = r * r * t
    basis = np.stack(
        [
            np.exp(-roots.a0 * s),
            np.cos(roots.a2 * s) * np.exp(-roots.a1 * s),
            np.sin(roots.a2 * s) * np.exp(-roots.a1 * s),
        ],
        axis=1,
    )
    target = eval_J(j, t, r)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    resid = basis @ coef - target
    return float(np.linalg.norm(resid) / max(np.linalg.norm(target), np.finfo(float).tiny))
