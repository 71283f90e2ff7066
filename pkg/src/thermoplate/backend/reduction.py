"""
Reduction of 2x2 hyperbolic-parabolic couplings to a third-order equation
u''' + c2(r) u'' + c1(r) u' + c0(r) u = 0 per frequency, and its solution by
Lagrange sums over the characteristic roots.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from .kernels import lagrange_sum
from .oracle import coupled_matrix
from .roots import Roots, characteristic_roots_general

logger = logging.getLogger(__name__)

# roots closer than this times their scale are treated as coincident
DEGENERATE_GAP = 1e-6


class DegenerateRootsError(ValueError):
    """Characteristic roots coincide; no confluent formula is provided."""


@dataclass(frozen=True)
class CoupledSymbol:
    """
    Reduced cubic of a coupled system, with the coefficients as polynomials
    in r. ``accel`` gives u_tt(0) as a combination of (u0, u1, theta0) and
    ``system`` the first-order matrix of (u, u_t, theta).
    """

    name: str
    c2: Polynomial
    c1: Polynomial
    c0: Polynomial
    accel: Tuple[Polynomial, Polynomial, Polynomial]
    system: Callable[[float], np.ndarray]

    def coefficients(self, r: float) -> Tuple[float, float, float]:
        return (float(self.c2(r)), float(self.c1(r)), float(self.c0(r)))

    def roots(self, r: float) -> Roots:
        return characteristic_roots_general(*self.coefficients(r))

    def initial_state(self, r: float, data: Sequence[complex]) -> Tuple[complex, complex, complex]:
        """(u, u_t, u_tt) at t = 0."""
        u0, u1, th0 = (complex(d) for d in data)
        utt = sum(complex(p(r)) * d for p, d in zip(self.accel, (u0, u1, th0)))
        return (u0, u1, utt)


def reduce_plate() -> CoupledSymbol:
    """u_ttt - Delta u_tt + 2 Delta^2 u_t - Delta^3 u = 0."""
    return CoupledSymbol(
        name="plate",
        c2=Polynomial([0.0, 0.0, 1.0]),
        c1=Polynomial([0.0, 0.0, 0.0, 0.0, 2.0]),
        c0=Polynomial([0.0] * 6 + [1.0]),
        accel=(Polynomial([0.0] * 4 + [-1.0]), Polynomial([0.0]), Polynomial([0.0, 0.0, 1.0])),
        system=lambda r: coupled_matrix(r, 1.0),
    )


def reduce_thermoelastic_1d(alpha: float, kappa: float, gamma1: float, gamma2: float) -> CoupledSymbol:
    """
    u_tt - alpha u_xx + gamma1 theta_x = 0, theta_t - kappa theta_xx + gamma2 u_tx = 0
    reduced to u_ttt - kappa u_ttxx - (gamma1 gamma2 + alpha) u_txx + kappa alpha u_xxxx = 0.
    """
    if not alpha > 0.0:
        raise ValueError(f"Invalid alpha {alpha}; must be > 0")
    if not kappa > 0.0:
        raise ValueError(f"Invalid kappa {kappa}; must be > 0")
    if not gamma1 * gamma2 > 0.0:
        raise ValueError(f"Invalid coupling gamma1={gamma1}, gamma2={gamma2}; need gamma1 * gamma2 > 0")

    def system(r: float) -> np.ndarray:
        r2 = r * r
        return np.array(
            [
                [0.0, 1.0, 0.0],
                [-alpha * r2, 0.0, -1j * gamma1 * r],
                [0.0, -1j * gamma2 * r, -kappa * r2],
            ],
            dtype=complex,
        )

    return CoupledSymbol(
        name=f"thermoelastic-1d(alpha={alpha:g}, kappa={kappa:g}, gamma1={gamma1:g}, gamma2={gamma2:g})",
        c2=Polynomial([0.0, 0.0, kappa]),
        c1=Polynomial([0.0, 0.0, gamma1 * gamma2 + alpha]),
        c0=Polynomial([0.0, 0.0, 0.0, 0.0, kappa * alpha]),
        accel=(
            Polynomial([0.0, 0.0, -alpha]),
            Polynomial([0.0]),
            Polynomial([0.0, -1j * gamma1]),
        ),
        system=system,
    )


def _distinct_roots(symbol: CoupledSymbol, r: float) -> Roots:
    lams = symbol.roots(r)
    scale = max(abs(lam) for lam in lams)
    gap = min(abs(a - b) for a, b in itertools.combinations(lams, 2))
    if scale == 0.0 or gap < DEGENERATE_GAP * scale:
        raise DegenerateRootsError(
            f"Invalid frequency r={r} for {symbol.name}; roots {lams} coincide (gap {gap:.3e})"
        )
    return lams


def lagrange_kernels(symbol: CoupledSymbol, t, r: float, data: Sequence[complex], order: int = 0) -> np.ndarray:
    """
    ``order``-th time derivative of u(t) at one frequency r from the Lagrange
    sums of the kernels K0, K1, K2 against (u0, u1, u_tt(0)).
    """
    if r < 0.0:
        raise ValueError(f"Invalid frequency r={r}; must be >= 0")
    if order < 0:
        raise ValueError(f"Invalid derivative order {order}; must be >= 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("Invalid time; t must be non-negative")
    lams = _distinct_roots(symbol, r)
    state = symbol.initial_state(r, data)
    return sum(lagrange_sum(lams, t, j, order) * state[j] for j in range(3))


def ode_residual(symbol: CoupledSymbol, t, r: float, data: Sequence[complex]) -> np.ndarray:
    """u''' + c2 u'' + c1 u' + c0 u of the Lagrange-sum solution."""
    c2, c1, c0 = symbol.coefficients(r)
    d = [lagrange_kernels(symbol, t, r, data, k) for k in range(4)]
    return d[3] + c2 * d[2] + c1 * d[1] + c0 * d[0]
