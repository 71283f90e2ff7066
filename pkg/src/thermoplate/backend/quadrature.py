"""
L2 norms of radial Fourier multipliers applied to radial data.

The radial integral is taken in w = r sqrt(t), where the profile oscillation
sin(a2 w^2) has a t-independent wavelength. [0, w_end] is split into panels
whose breakpoints sit at every half period of the phase (w_k = sqrt(k pi / nu))
plus a uniform floor of MIN_PANELS panels and any data breakpoints. Each panel
gets a fixed Gauss-Legendre rule; panels are bisected globally until two
successive sums agree to the requested relative tolerance.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma

from .roots import solve_characteristic_cubic

logger = logging.getLogger(__name__)

EPS0 = 0.1  # inner zone |xi| <= EPS0
N0 = 10.0  # full zone cut-off |xi| <= N0
INNER = "inner"
FULL = "full"
ZONES = (INNER, FULL)

GAUSS_ORDER = 16
MIN_PANELS = 64
MAX_LEVELS = 8
# squared-integrand level below which an exponentially decaying tail is dropped
TAIL_LEVEL = 1e-32

Multiplier = Callable[[float, np.ndarray], np.ndarray]
Profile = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RadialData:
    profile: Profile
    mean: float
    lip: float = 0.0
    support: Optional[float] = None  # profile vanishes for r > support
    name: str = ""

    def __post_init__(self) -> None:
        if self.lip < 0.0:
            raise ValueError(f"Invalid Lipschitz bound {self.lip}; must be >= 0")
        at_origin = complex(np.asarray(self.profile(np.zeros(1)))[0])
        if at_origin != complex(self.mean):
            raise ValueError(
                f"Invalid radial data {self.name!r}; profile(0) = {at_origin} differs from mean {self.mean}"
            )

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.broadcast_to(np.asarray(self.profile(r)), r.shape)

    def negated(self) -> "RadialData":
        profile = self.profile
        return RadialData(
            profile=lambda r: -np.asarray(profile(r)),
            mean=-self.mean,
            lip=self.lip,
            support=self.support,
            name=f"-{self.name}" if self.name else "",
        )

    def check(self, r_samples) -> bool:
        """|profile(r) - mean| <= lip r on the samples."""
        r = np.asarray(r_samples, dtype=float)
        gap = np.abs(self(r) - self.mean)
        return bool(np.all(gap <= self.lip * r * (1.0 + 1e-12) + 1e-15))


@dataclass(frozen=True)
class DataTriple:
    u0: RadialData
    u1: RadialData
    th0: RadialData

    def at(self, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.u0(r), self.u1(r), self.th0(r))

    def conforming(self) -> "DataTriple":
        """Same displacement data with theta0 = -u1."""
        return DataTriple(self.u0, self.u1, self.u1.negated())

    @property
    def support(self) -> Optional[float]:
        supports = [d.support for d in (self.u0, self.u1, self.th0)]
        if any(s is None for s in supports):
            return None
        return max(supports)  # type: ignore[type-var]


@dataclass(frozen=True)
class NormTask:
    """
    ||chi_zone m(t, .) f||_{L2} in dimension n on the Fourier side.

    ``data`` may be omitted when the multiplier already contains the data.
    ``decay`` is a rate c with |m(t, r)| <~ e^{-c r^2 t}; when given, the tail
    beyond the level TAIL_LEVEL is not integrated. ``phase`` is the coefficient
    nu of the oscillation sin(nu r^2 t) used to place panel breakpoints.
    """

    n: int
    multiplier: Multiplier
    data: Optional[RadialData] = None
    r_max: Optional[float] = None
    zone: str = INNER
    decay: Optional[float] = None
    phase: float = field(default_factory=lambda: solve_characteristic_cubic().a2)
    breakpoints: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"Invalid dimension {self.n}; must be >= 1")
        if self.zone not in ZONES:
            raise ValueError(f"Invalid zone {self.zone!r}; expected one of {ZONES}")
        if self.r_max is not None and not self.r_max > 0.0:
            raise ValueError(f"Invalid r_max {self.r_max}; must be > 0")

    @property
    def radius(self) -> float:
        if self.r_max is not None:
            return self.r_max
        return EPS0 if self.zone == INNER else N0

    def integrand(self, t: float, w: np.ndarray) -> np.ndarray:
        r = w / math.sqrt(t)
        values = self.multiplier(t, r)
        if self.data is not None:
            values = values * self.data(r)
        return np.abs(values) ** 2 * w ** (self.n - 1)


@dataclass(frozen=True)
class NormResult:
    norm: float
    achieved_tol: float
    converged: bool
    tail_bound: float = 0.0


def sphere_area(n: int) -> float:
    """omega_{n-1} = 2 pi^{n/2} / Gamma(n/2), the area of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / float(gamma(n / 2.0))


def _panels(task: NormTask, t: float, w_end: float) -> np.ndarray:
    points = [np.linspace(0.0, w_end, MIN_PANELS + 1)]
    if task.phase > 0.0:
        k_max = int(task.phase * w_end * w_end / math.pi)
        points.append(np.sqrt(np.arange(1, k_max + 1) * math.pi / task.phase))
    extra = list(task.breakpoints)
    if task.data is not None and task.data.support is not None:
        extra.append(task.data.support)
    if extra:
        points.append(np.asarray(extra, dtype=float) * math.sqrt(t))
    merged = np.unique(np.concatenate(points))
    return merged[(merged >= 0.0) & (merged <= w_end)]


def _bisect(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(edges.size + mids.size)
    out[0::2] = edges
    out[1::2] = mids
    return out


def _panel_sum(task: NormTask, t: float, edges: np.ndarray) -> float:
    nodes, weights = leggauss(GAUSS_ORDER)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    w = (half * nodes[None, :] + 0.5 * (a + b)).ravel()
    values = task.integrand(t, w)
    if not np.all(np.isfinite(values)):
        raise ValueError(
            "Integrand is not finite; a multiplier with an r^-2 singularity near r = 0 "
            "needs the stabilized kernel mode"
        )
    return float(np.sum(values.reshape(half.shape[0], -1) * weights[None, :] * half))


def l2_norm(task: NormTask, t: float, rtol: float = 1e-8) -> NormResult:
    """
    (omega_{n-1} int_0^{r_max} |m(t, r) f(r)|^2 r^{n-1} dr)^{1/2}.

    r^{n-1} dr becomes t^{-n/2} w^{n-1} dw after w = r sqrt(t).
    """
    if not t > 0.0:
        raise ValueError(f"Invalid time {t}; the substituted norm needs t > 0")
    if not rtol > 0.0:
        raise ValueError(f"Invalid tolerance {rtol}; must be > 0")
    w_max = task.radius * math.sqrt(t)
    w_end = w_max
    if task.decay is not None and task.decay > 0.0:
        w_end = min(w_max, math.sqrt(-math.log(TAIL_LEVEL) / (2.0 * task.decay)))
    edges = _panels(task, t, w_end)
    previous = _panel_sum(task, t, edges)
    total, err, converged = previous, math.inf, False
    for _ in range(MAX_LEVELS):
        edges = _bisect(edges)
        total = _panel_sum(task, t, edges)
        err = abs(total - previous)
        if err <= rtol * abs(total) or total == 0.0:
            converged = True
            break
        previous = total
    scale = sphere_area(task.n) * t ** (-task.n / 2.0)
    norm = math.sqrt(max(total, 0.0) * scale)
    achieved = 0.5 * err / abs(total) if total > 0.0 else 0.0
    tail = 0.0
    if task.zone == FULL and task.decay is not None:
        tail = math.exp(-task.decay * task.radius**2 * t)
    if not converged:
        logger.warning(
            "L2 norm (n=%d, t=%.6g) reached relative tolerance %.3e only", task.n, t, achieved
        )
    return NormResult(norm=norm, achieved_tol=achieved, converged=converged, tail_bound=tail)


def plancherel_l2(task: NormTask, t: float, rtol: float = 1e-8) -> NormResult:
    """Physical-space L2 norm for f-hat(xi) = int e^{-i x . xi} f(x) dx."""
    result = l2_norm(task, t, rtol)
    factor = (2.0 * math.pi) ** (-task.n / 2.0)
    return NormResult(
        norm=result.norm * factor,
        achieved_tol=result.achieved_tol,
        converged=result.converged,
        tail_bound=result.tail_bound * factor,
    )
