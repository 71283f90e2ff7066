from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

logger = logging.getLogger(__name__)

# Scaled plate cubic mu^3 + mu^2 + 2 mu + 1 = 0 (lambda = mu r^2)
PLATE_COEFFS = (1.0, 2.0, 1.0)
RESIDUAL_TOL = 1e-10
VIETA_TOL = 1e-10

Roots = Tuple[complex, complex, complex]


class CubicSolverError(RuntimeError):
    """Computed roots fail the residual or Vieta consistency check."""


@dataclass(frozen=True)
class CharRoots:
    mu_real: float
    mu_complex_re: float
    mu_complex_im: float
    a0: float
    a1: float
    a2: float
    alpha_plus: float
    alpha_minus: float

    @property
    def mus(self) -> Roots:
        """Scaled roots ordered (real, lower, upper)."""
        return (
            complex(self.mu_real, 0.0),
            complex(self.mu_complex_re, -self.mu_complex_im),
            complex(self.mu_complex_re, self.mu_complex_im),
        )

    @property
    def delta(self) -> float:
        return self.a0 - self.a1

    @property
    def d(self) -> float:
        """(a0 - a1)^2 + a2^2, the common denominator of the profile multipliers."""
        return self.delta**2 + self.a2**2

    def radical_constants(self) -> Tuple[float, float, float]:
        """a0, a1, a2 recomputed from alpha_plus / alpha_minus."""
        return (
            (1.0 + self.alpha_minus) / 3.0,
            (2.0 - self.alpha_minus) / 6.0,
            math.sqrt(3.0) * self.alpha_plus / 6.0,
        )

    def to_row(self) -> Tuple[float, float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.alpha_plus, self.alpha_minus)


def _real_cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _poly(c2: complex, c1: complex, c0: complex, lam: complex) -> complex:
    return ((lam + c2) * lam + c1) * lam + c0


def _newton_polish(c2: complex, c1: complex, c0: complex, lam: complex) -> complex:
    deriv = (3.0 * lam + 2.0 * c2) * lam + c1
    if deriv == 0:
        return lam
    return lam - _poly(c2, c1, c0, lam) / deriv


def _real_cubic(c2: float, c1: float, c0: float) -> Roots:
    # depressed cubic x^3 + p x + q with lambda = x - c2/3
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p == 0.0 and q == 0.0:
        return (complex(-shift), complex(-shift), complex(-shift))
    if disc > 0.0:
        # Cardano, one real root; sign choice avoids cancellation in A
        big = -math.copysign(_real_cbrt(abs(q) / 2.0 + math.sqrt(disc)), q)
        small = -p / (3.0 * big) if big != 0.0 else 0.0
        x1 = big + small
        re = -0.5 * (big + small)
        im = 0.5 * math.sqrt(3.0) * abs(big - small)
        return (complex(x1 - shift), complex(re - shift, -im), complex(re - shift, im))
    # trigonometric method, three real roots
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m) if p != 0.0 else 0.0
    phi = math.acos(max(-1.0, min(1.0, arg))) / 3.0
    xs = sorted(m * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3))
    return tuple(complex(x - shift) for x in xs)  # type: ignore[return-value]


def _complex_cubic(c2: complex, c1: complex, c0: complex) -> Roots:
    d0 = c2 * c2 - 3.0 * c1
    d1 = 2.0 * c2**3 - 9.0 * c2 * c1 + 27.0 * c0
    root = cmath.sqrt(d1 * d1 - 4.0 * d0**3)
    big = (d1 + root) / 2.0
    if abs(d1 - root) > abs(d1 + root):
        big = (d1 - root) / 2.0
    if big == 0:
        return (-c2 / 3.0, -c2 / 3.0, -c2 / 3.0)
    cc = big ** (1.0 / 3.0)
    unit = complex(-0.5, 0.5 * math.sqrt(3.0))
    out = []
    for k in range(3):
        ck = cc * unit**k
        out.append(-(c2 + ck + d0 / ck) / 3.0)
    return tuple(out)  # type: ignore[return-value]


def characteristic_roots_general(c2: complex, c1: complex, c0: complex) -> Roots:
    """
    Roots of lambda^3 + c2 lambda^2 + c1 lambda + c0.

    Real coefficients go through the trigonometric method (three real roots)
    or Cardano (one real root plus a conjugate pair); complex coefficients use
    the general Cardano formula. Every root gets one Newton step. For real
    coefficients the non-real roots are returned as an exact conjugate pair,
    lower imaginary part first.
    """
    for c in (c2, c1, c0):
        if not cmath.isfinite(complex(c)):
            raise ValueError(f"Invalid cubic coefficient {c!r}; coefficients must be finite")
    real = all(complex(c).imag == 0.0 for c in (c2, c1, c0))
    if real:
        r2, r1, r0 = (complex(c).real for c in (c2, c1, c0))
        roots = [_newton_polish(r2, r1, r0, lam) for lam in _real_cubic(r2, r1, r0)]
        if roots[1].imag != 0.0 or roots[2].imag != 0.0:
            pair = roots[2] if roots[2].imag > 0 else roots[1]
            pair = complex(pair.real, abs(pair.imag))
            roots = [complex(roots[0].real, 0.0), pair.conjugate(), pair]
    else:
        c2, c1, c0 = complex(c2), complex(c1), complex(c0)
        roots = [_newton_polish(c2, c1, c0, lam) for lam in _complex_cubic(c2, c1, c0)]
    for lam in roots:
        resid = abs(_poly(c2, c1, c0, lam))
        if resid > RESIDUAL_TOL * max(1.0, abs(lam) ** 3):
            raise CubicSolverError(
                f"Cubic residual {resid:.3e} at root {lam!r} for coefficients ({c2}, {c1}, {c0})"
            )
    return tuple(roots)  # type: ignore[return-value]


def alpha_constants() -> Tuple[float, float]:
    """alpha_plus, alpha_minus from the closed radical formula."""
    s69 = 3.0 * math.sqrt(69.0)
    hi = _real_cbrt((s69 + 11.0) / 2.0)
    lo = _real_cbrt((s69 - 11.0) / 2.0)
    return hi + lo, hi - lo


@lru_cache(maxsize=None)
def solve_characteristic_cubic() -> CharRoots:
    """Roots of the scaled plate cubic; computed once and shared."""
    mu1, _, mu3 = characteristic_roots_general(*PLATE_COEFFS)
    a0, a1, a2 = -mu1.real, -mu3.real, mu3.imag
    alpha_plus, alpha_minus = alpha_constants()
    roots = CharRoots(
        mu_real=mu1.real,
        mu_complex_re=mu3.real,
        mu_complex_im=a2,
        a0=a0,
        a1=a1,
        a2=a2,
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
    )
    checks = {
        "trace": abs(mu1.real + 2.0 * mu3.real + 1.0),
        "product": abs(a0 * (a1 * a1 + a2 * a2) - 1.0),
        "pairs": abs(2.0 * a0 * a1 + a1 * a1 + a2 * a2 - 2.0),
    }
    bad = {k: v for k, v in checks.items() if v > VIETA_TOL}
    if bad or not (a0 > a1 > 0.0 and a2 > 0.0):
        raise CubicSolverError(f"Plate cubic failed consistency checks: {bad or roots}")
    logger.debug("plate roots a0=%.15g a1=%.15g a2=%.15g", a0, a1, a2)
    return roots
