"""
Fourier-side solution kernels of the reduced third-order plate equation.

All evaluators broadcast over numpy arrays of ``t`` and ``r``. Two modes are
kept side by side:

* ``"lagrange-sum"`` sums the exponentials of the three roots lambda_j = mu_j r^2
  with Lagrange interpolation weights. It is exact in exact arithmetic but loses
  digits like log10(1 / (r^2 t)) per power of r^-2 as r -> 0.
* ``"stabilized"`` writes every kernel as ``t**j`` times a smooth function of
  s = r^2 t (sin^2 half-angle forms and (1 - e^-x)/x factors), so it stays
  accurate down to and including r = 0.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .roots import CharRoots, solve_characteristic_cubic

logger = logging.getLogger(__name__)

LAGRANGE = "lagrange-sum"
STABILIZED = "stabilized"
MODES = (LAGRANGE, STABILIZED)

# Below this argument the (1 - e^-x)/x factor switches to its Taylor series
SERIES_SWITCH = 1e-4
# Below this s the K2 difference quotient uses its Taylor series
K2_SERIES_SWITCH = 1e-3


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with value 1 at 0."""
    return np.sinc(np.asarray(x) / np.pi)


def one_minus_exp_ratio(x: np.ndarray) -> np.ndarray:
    """(1 - e^-x)/x, with the series 1 - x/2 + x^2/6 for small |x|."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_SWITCH
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x / 2.0 + x * x / 6.0, -np.expm1(-safe) / safe)


def lagrange_sum(
    lams: Sequence[np.ndarray], t: np.ndarray, j: int, order: int = 0
) -> np.ndarray:
    """
    Kernel j of a third-order ODE with distinct characteristic roots ``lams``,
    differentiated ``order`` times in t. The largest real part is factored out
    of the exponentials before summing.
    """
    trio = tuple(np.asarray(lam, dtype=complex) for lam in lams)
    t = np.asarray(t, dtype=float)
    # for the plate this is e^{-a1 r^2 t}
    shift = np.maximum.reduce([lam.real * t for lam in trio])
    total = np.zeros(np.broadcast(*trio, t).shape, dtype=complex)
    for idx in range(3):
        lj = trio[idx]
        lk, ll = (trio[m] for m in range(3) if m != idx)
        denom = (lj - lk) * (lj - ll)
        if j == 0:
            numer = lk * ll
        elif j == 1:
            numer = -(lk + ll)
        else:
            numer = np.ones_like(lj)
        total = total + np.exp(lj * t - shift) * lj**order * numer / denom
    return total * np.exp(shift)


def _companion_step(
    k: Tuple[np.ndarray, np.ndarray, np.ndarray], c2, c1, c0
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # d/dt (K0, K1, K2) for y''' + c2 y'' + c1 y' + c0 y = 0
    k0, k1, k2 = k
    return (-c0 * k2, k0 - c1 * k2, k1 - c2 * k2)


@dataclass(frozen=True)
class KernelSet:
    roots: CharRoots = field(default_factory=solve_characteristic_cubic)
    mode: str = STABILIZED

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"Invalid kernel mode {self.mode!r}; expected one of {MODES}")

    # stabilized building blocks, all functions of s = r^2 t
    def _k0(self, s: np.ndarray) -> np.ndarray:
        a0, a1, a2, d = self.roots.a0, self.roots.a1, self.roots.a2, self.roots.d
        decay = np.exp(-a1 * s)
        return (
            (a1 * a1 + a2 * a2) / d * np.exp(-a0 * s)
            + (a0 * a0 - 2.0 * a0 * a1) / d * np.cos(a2 * s) * decay
            + a0 * (a0 * a1 - a1 * a1 + a2 * a2) / (a2 * d) * np.sin(a2 * s) * decay
        )

    def _g1(self, s: np.ndarray) -> np.ndarray:
        # K1 = t * g1(s)
        a0, a1, a2, d = self.roots.a0, self.roots.a1, self.roots.a2, self.roots.d
        decay = np.exp(-a1 * s)
        half = 0.5 * a2
        sin_sq_over_s = s * half * half * _sinc(half * s) ** 2
        return decay * (
            4.0 * a1 / d * sin_sq_over_s
            + 2.0 * a1 * (a1 - a0) / d * one_minus_exp_ratio(self.roots.delta * s)
            + (a0 * a0 + a2 * a2 - a1 * a1) / d * _sinc(a2 * s)
        )

    def _g2(self, s: np.ndarray) -> np.ndarray:
        # K2 = t^2 * g2(s)
        a1, a2, d, delta = self.roots.a1, self.roots.a2, self.roots.d, self.roots.delta
        half = 0.5 * a2
        sin_sq_over_s2 = half * half * _sinc(half * s) ** 2
        small = s < K2_SERIES_SWITCH
        safe = np.where(small, 1.0, s)
        direct = (_sinc(a2 * safe) - one_minus_exp_ratio(delta * safe)) / safe
        series = (
            delta / 2.0
            - (a2 * a2 + delta * delta) * s / 6.0
            + delta**3 * s * s / 24.0
            + (a2**4 - delta**4) * s**3 / 120.0
        )
        quotient = np.where(small, series, direct)
        return np.exp(-a1 * s) / d * (2.0 * sin_sq_over_s2 + delta * quotient)

    def _stabilized(self, t: np.ndarray, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        s = r * r * t
        return (self._k0(s), t * self._g1(s), t * t * self._g2(s))

    def _lagrange(self, t: np.ndarray, r: np.ndarray, order: int) -> Tuple[np.ndarray, ...]:
        r2 = r * r
        origin = r2 == 0.0
        safe = np.where(origin, 1.0, r2)
        lams = [mu * safe for mu in self.roots.mus]
        out = []
        for j in range(3):
            # conjugate pair: the imaginary part is rounding residue
            value = lagrange_sum(lams, t, j, order).real
            out.append(np.where(origin, _origin_limit(j, order, t), value))
        return tuple(out)

    def kernels(self, t, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(K0, K1, K2) at (t, r)."""
        t, r = _check_args(t, r)
        if self.mode == LAGRANGE:
            return self._lagrange(t, r, 0)  # type: ignore[return-value]
        return self._stabilized(t, r)

    def derivatives(self, order: int, t, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Time derivatives of (K0, K1, K2) of the given order (0, 1 or 2)."""
        if order not in (0, 1, 2):
            raise ValueError(f"Invalid derivative order {order}; expected 0, 1 or 2")
        t, r = _check_args(t, r)
        if self.mode == LAGRANGE:
            return self._lagrange(t, r, order)  # type: ignore[return-value]
        r2 = r * r
        ks = self._stabilized(t, r)
        for _ in range(order):
            ks = _companion_step(ks, r2, 2.0 * r2 * r2, r2 * r2 * r2)
        return ks

    def kernel(self, j: int, t, r) -> np.ndarray:
        return self.derivatives(0, t, r)[_check_index(j)]

    def kernel_dt(self, j: int, order: int, t, r) -> np.ndarray:
        return self.derivatives(order, t, r)[_check_index(j)]

    @property
    def multipliers(self) -> "SolutionMultipliers":
        return SolutionMultipliers(self)


def _check_index(j: int) -> int:
    if j not in (0, 1, 2):
        raise ValueError(f"Invalid kernel index {j}; expected 0, 1 or 2")
    return j


def _check_args(t, r) -> Tuple[np.ndarray, np.ndarray]:
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
        raise ValueError("Invalid kernel arguments; t and r must be finite")
    if np.any(t < 0.0) or np.any(r < 0.0):
        raise ValueError("Invalid kernel arguments; t and r must be non-negative")
    return t, r


def _origin_limit(j: int, order: int, t: np.ndarray) -> np.ndarray:
    # r = 0: K0 = 1, K1 = t, K2 = t^2 / 2
    table = {
        (0, 0): np.ones_like(t),
        (1, 0): t,
        (2, 0): 0.5 * t * t,
        (1, 1): np.ones_like(t),
        (2, 1): t,
        (2, 2): np.ones_like(t),
    }
    return table.get((j, order), np.zeros_like(t))


class SolutionMultipliers:
    """
    Multipliers of (u0, u1, theta0) for u-hat and theta-hat.

    The theta-hat slots are (r^-2 d_t^2 + r^2) of the u-hat slots. In the
    stabilized mode the lift is carried out with the companion recurrence,
    which gives r^6 K2, r^4 K2 - r^2 K1 and K0 - r^2 K1 and needs no r^-2.
    """

    def __init__(self, kernels: KernelSet) -> None:
        self.kernels = kernels

    def u(self, t, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        k0, k1, k2 = self.kernels.kernels(t, r)
        r2 = np.asarray(r, dtype=float) ** 2
        return (k0 - r2 * r2 * k2, k1, r2 * k2)

    def theta(self, t, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        r = np.asarray(r, dtype=float)
        r2 = r * r
        if self.kernels.mode == STABILIZED:
            k0, k1, k2 = self.kernels.kernels(t, r)
            return (r2**3 * k2, r2 * r2 * k2 - r2 * k1, k0 - r2 * k1)
        m0, m1, m2 = self.u(t, r)
        d0, d1, d2 = self.kernels.derivatives(2, t, r)
        origin = r2 == 0.0
        safe = np.where(origin, 1.0, r2)
        lift0 = (d0 - r2 * r2 * d2) / safe + r2 * m0
        lift1 = d1 / safe + r2 * m1
        lift2 = d2 + r2 * r2 * self.kernels.kernel(2, t, r)
        return (
            np.where(origin, 0.0, lift0),
            np.where(origin, 0.0, lift1),
            np.where(origin, 1.0, lift2),
        )


def eval_kernel(j: int, t, r, mode: str = STABILIZED) -> np.ndarray:
    return KernelSet(mode=mode).kernel(j, t, r)


def eval_kernel_dt(j: int, order: int, t, r, mode: str = STABILIZED) -> np.ndarray:
    return KernelSet(mode=mode).kernel_dt(j, order, t, r)


def solution_hat(
    t, r, data: Sequence[complex], kernels: KernelSet | None = None
) -> Tuple[np.ndarray, np.ndarray]:
    """(u-hat, theta-hat) at (t, r) for data (u0-hat, u1-hat, theta0-hat)."""
    if len(data) != 3:
        raise ValueError(f"Invalid data triple of length {len(data)}; expected (u0, u1, theta0)")
    mult = (kernels or KernelSet()).multipliers
    u0, u1, th0 = (np.asarray(d, dtype=complex) for d in data)
    mu = mult.u(t, r)
    mth = mult.theta(t, r)
    return (
        mu[0] * u0 + mu[1] * u1 + mu[2] * th0,
        mth[0] * u0 + mth[1] * u1 + mth[2] * th0,
    )


def pointwise_bound_constant(t_grid, r_grid, c: float | None = None) -> float:
    """
    Smallest C with |K1| <= C (t + |sin(a2 r^2 t)| / r^2) e^{-c r^2 t} on the grid.

    ``c`` defaults to a1 / 2.
    """
    roots = solve_characteristic_cubic()
    c = roots.a1 / 2.0 if c is None else c
    tt, rr = np.meshgrid(np.asarray(t_grid, dtype=float), np.asarray(r_grid, dtype=float))
    s = rr * rr * tt
    k1 = KernelSet(roots).kernel(1, tt, rr)
    # |sin(a2 s)| / r^2 = t a2 |sinc(a2 s)|
    envelope = tt * (1.0 + roots.a2 * np.abs(_sinc(roots.a2 * s))) * np.exp(-c * s)
    mask = envelope > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(k1[mask]) / envelope[mask]))
