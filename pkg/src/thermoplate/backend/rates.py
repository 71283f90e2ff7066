from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..utils.presets import preset_data
from .kernels import KernelSet
from .profiles import CombinedData, eval_J
from .quadrature import INNER, DataTriple, Multiplier, NormTask, l2_norm
from .roots import solve_characteristic_cubic

logger = logging.getLogger(__name__)

SOLUTION = "u"
TEMPERATURE = "theta"
FIELDS = (SOLUTION, TEMPERATURE)

GROWTH = "growth"
BOUNDED = "bounded"
DECAY = "decay"
VERDICT_TOL = 0.05

Sample = Tuple[float, float]


class NormSample(NamedTuple):
    t: float
    norm: float
    achieved_tol: float
    converged: bool


@dataclass(frozen=True)
class RateFit:
    exponent: float
    intercept: float  # log of the prefactor
    max_residual: float
    t_range: Tuple[float, float]
    stderr: float = 0.0
    samples: int = 0
    # worst quadrature tolerance of the fitted norms
    achieved_tol: float = 0.0
    converged: bool = True

    def predict(self, t: float) -> float:
        return math.exp(self.intercept) * t**self.exponent

    def confidence_interval(self, level: float = 0.95) -> Tuple[float, float]:
        if self.samples <= 2 or self.stderr == 0.0:
            return (self.exponent, self.exponent)
        half = float(stats.t.ppf(0.5 + level / 2.0, self.samples - 2)) * self.stderr
        return (self.exponent - half, self.exponent + half)


@dataclass(frozen=True)
class Classification:
    n: int
    verdict: str
    target_exponent: float
    fitted_exponent: float
    max_residual: float
    mismatch: bool
    converged: bool = True


@dataclass(frozen=True)
class Table1Row:
    label: str
    dimensions: Tuple[int, ...]
    pure_plates: str
    heat: str
    thermoelastic: str
    crucial_influence: str
    measured: Tuple[float, ...]  # fitted exponents of ||u||^2
    verdict: str
    mismatch: bool


def dyadic_grid(k_min: int = 10, k_max: int = 24) -> np.ndarray:
    return 2.0 ** np.arange(k_min, k_max + 1)


def fit_power_law(x: Sequence[float], y: Sequence[float]) -> RateFit:
    """Least-squares line through (log x, log y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("Invalid samples; need at least two (x, y) pairs of equal length")
    if np.any(y <= 0.0) or np.any(x <= 0.0):
        raise ValueError("Invalid samples; power-law fits need positive values")
    lx, ly = np.log(x), np.log(y)
    fit = stats.linregress(lx, ly)
    resid = ly - (fit.intercept + fit.slope * lx)
    return RateFit(
        exponent=float(fit.slope),
        intercept=float(fit.intercept),
        max_residual=float(np.max(np.abs(resid))),
        t_range=(float(np.min(x)), float(np.max(x))),
        stderr=float(fit.stderr) if x.size > 2 else 0.0,
        samples=int(x.size),
    )


def fit_rate(samples: Iterable[Sample | NormSample]) -> RateFit:
    samples = list(samples)
    if len(samples) < 4:
        raise ValueError(f"Invalid sweep of {len(samples)} samples; need at least 4")
    ts = [s[0] for s in samples]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("Invalid sweep; times must be strictly increasing")
    norms = [s[1] for s in samples]
    if any(not v > 0.0 for v in norms):
        raise ValueError("Invalid sweep; norms must be positive")
    fit = fit_power_law(ts, norms)
    checked = [s for s in samples if isinstance(s, NormSample)]
    if not checked:
        return fit
    missed = [s.t for s in checked if not s.converged]
    if missed:
        times = ", ".join(format(t, ".4g") for t in missed)
        logger.warning("rate fit uses %d unconverged norms (t=%s)", len(missed), times)
    return replace(fit, achieved_tol=max(s.achieved_tol for s in checked), converged=not missed)


def target_exponent(n: int, field: str = SOLUTION) -> float:
    return (1.0 if field == SOLUTION else 0.0) - n / 4.0


def profile_error_target(n: int, field: str = SOLUTION) -> float:
    return (0.5 if field == SOLUTION else -0.5) - n / 4.0


def _check_field(field: str) -> str:
    if field not in FIELDS:
        raise ValueError(f"Invalid field {field!r}; expected one of {FIELDS}")
    return field


def solution_field(data: DataTriple, field: str = SOLUTION, kernels: KernelSet | None = None) -> Multiplier:
    """(t, r) -> u-hat or theta-hat for the given data."""
    mult = (kernels or KernelSet()).multipliers
    pick = mult.u if _check_field(field) == SOLUTION else mult.theta

    def evaluate(t: float, r: np.ndarray) -> np.ndarray:
        m0, m1, m2 = pick(t, r)
        u0, u1, th0 = data.at(r)
        return m0 * u0 + m1 * u1 + m2 * th0

    return evaluate


def profile_field(data: DataTriple, field: str = SOLUTION) -> Multiplier:
    """(t, r) -> J0 P_Psi0 + J1 P_Psi1, or J2 P_Psi0 + J3 P_Psi1 for theta."""
    combined = CombinedData.from_data(data.u1, data.th0)
    first = 0 if _check_field(field) == SOLUTION else 2

    def evaluate(t: float, r: np.ndarray) -> np.ndarray:
        return eval_J(first, t, r) * combined.p_psi0 + eval_J(first + 1, t, r) * combined.p_psi1

    return evaluate


def profile_error_field(data: DataTriple, field: str = SOLUTION) -> Multiplier:
    exact = solution_field(data, field)
    profile = profile_field(data, field)
    return lambda t, r: exact(t, r) - profile(t, r)


def norm_sweep(
    n: int,
    multiplier: Multiplier,
    times: Sequence[float],
    rtol: float = 1e-8,
    threads: int = 1,
    breakpoints: Tuple[float, ...] = (),
) -> List[NormSample]:
    """Inner-zone norms at each time, in input order, with their quadrature tolerance."""
    task = NormTask(
        n=n,
        multiplier=multiplier,
        zone=INNER,
        decay=solve_characteristic_cubic().a1,
        breakpoints=breakpoints,
    )

    def one(t: float) -> NormSample:
        result = l2_norm(task, float(t), rtol)
        logger.debug("n=%d t=%.6g norm=%.15g tol=%.2e", n, t, result.norm, result.achieved_tol)
        return NormSample(float(t), result.norm, result.achieved_tol, result.converged)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, times))
    return [one(t) for t in times]


def _breakpoints(data: DataTriple) -> Tuple[float, ...]:
    return (data.support,) if data.support is not None else ()


def solution_rate(
    n: int,
    data: DataTriple,
    field: str = SOLUTION,
    times: Optional[Sequence[float]] = None,
    threads: int = 1,
    rtol: float = 1e-8,
) -> RateFit:
    times = dyadic_grid() if times is None else times
    samples = norm_sweep(n, solution_field(data, field), times, rtol, threads, _breakpoints(data))
    return fit_rate(samples)


def profile_norm_rate(
    n: int, data: DataTriple, times: Optional[Sequence[float]] = None, threads: int = 1
) -> RateFit:
    """Rate of ||chi_int (J0 P_Psi0 + J1 P_Psi1)||."""
    times = dyadic_grid() if times is None else times
    return fit_rate(norm_sweep(n, profile_field(data), times, threads=threads))


def profile_error_rate(
    n: int,
    data: DataTriple,
    field: str = SOLUTION,
    times: Optional[Sequence[float]] = None,
    threads: int = 1,
    rtol: float = 1e-8,
) -> RateFit:
    """Rate of ||u - J0 P_Psi0 - J1 P_Psi1|| (or the theta counterpart with J2, J3)."""
    times = dyadic_grid() if times is None else times
    samples = norm_sweep(n, profile_error_field(data, field), times, rtol, threads, _breakpoints(data))
    fit = fit_rate(samples)
    target = profile_error_target(n, field)
    if fit.exponent > target + VERDICT_TOL:
        logger.warning(
            "profile error exponent %.4f above the bound %.4f (n=%d, %s)", fit.exponent, target, n, field
        )
    return fit


def verdict(exponent: float) -> str:
    if exponent > VERDICT_TOL:
        return GROWTH
    if exponent < -VERDICT_TOL:
        return DECAY
    return BOUNDED


def classify(
    n: int, data: Optional[DataTriple] = None, times: Optional[Sequence[float]] = None, threads: int = 1
) -> Classification:
    """Growth / bounded / decay of ||u(t)|| from a measured sweep."""
    if n < 1:
        raise ValueError(f"Invalid dimension {n}; must be >= 1")
    data = data or preset_data("constant-profile")
    fit = solution_rate(n, data, SOLUTION, times, threads)
    target = target_exponent(n)
    mismatch = abs(fit.exponent - target) > VERDICT_TOL
    if mismatch:
        logger.warning("n=%d: fitted exponent %.4f vs %.4f", n, fit.exponent, target)
    return Classification(
        n=n,
        verdict=verdict(fit.exponent),
        target_exponent=target,
        fitted_exponent=fit.exponent,
        max_residual=fit.max_residual,
        mismatch=mismatch,
        converged=fit.converged,
    )


def lower_bound_witness(
    n: int, data: Optional[DataTriple] = None, t_far: float = 1e6, times: Optional[Sequence[float]] = None
) -> float:
    """
    Ratio of the measured ||u(t_far)|| to e^{intercept} t_far^{1 - n/4}
    with the intercept fitted at the exponent 1 - n/4. Above 0.5 witnesses
    the lower bound.
    """
    data = data or preset_data("constant-profile")
    times = dyadic_grid() if times is None else times
    field = solution_field(data)
    samples = norm_sweep(n, field, times, breakpoints=_breakpoints(data))
    target = target_exponent(n)
    intercept = float(np.mean([math.log(v) - target * math.log(t) for t, v, _, _ in samples]))
    far = norm_sweep(n, field, [t_far], breakpoints=_breakpoints(data))[0][1]
    return far / (math.exp(intercept) * t_far**target)


def two_sided_agreement(
    n: int, data: Optional[DataTriple] = None, times: Optional[Sequence[float]] = None
) -> Tuple[RateFit, RateFit]:
    """Fits of the solution norm and of its first-order profile norm."""
    data = data or preset_data("constant-profile")
    return solution_rate(n, data, times=times), profile_norm_rate(n, data, times=times)


_TABLE1_TEXT = (
    ("lower (n <= 3)", (1, 2, 3), "t^{2-n/2}", "t^{-n/2}", "t^{2-n/2}", "pure plates"),
    ("critical (n = 4)", (4,), "log t", "t^{-2}", "1", "pure plates + Fourier law"),
    ("higher (n >= 5)", (5, 6), "--", "t^{-n/2}", "t^{-(n-4)/2}", "Fourier law"),
)


def table1(dims: Sequence[int] = (1, 2, 3, 4, 5, 6), threads: int = 1) -> List[Table1Row]:
    """Dimension classification; the pure plate and heat columns are reference text."""
    found = {n: classify(n, threads=threads) for n in dims}
    rows = []
    for label, members, plates, heat, thermo, influence in _TABLE1_TEXT:
        present = [found[n] for n in members if n in found]
        verdicts = {c.verdict for c in present}
        rows.append(
            Table1Row(
                label=label,
                dimensions=tuple(c.n for c in present),
                pure_plates=plates,
                heat=heat,
                thermoelastic=thermo,
                crucial_influence=influence,
                measured=tuple(2.0 * c.fitted_exponent for c in present),
                verdict="/".join(sorted(verdicts)),
                mismatch=any(c.mismatch for c in present),
            )
        )
    return rows
