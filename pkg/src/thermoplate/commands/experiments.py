"""Sweeps behind the rate, profile and singular-limit experiments."""
from __future__ import annotations

import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..backend import rates
from ..backend.kernels import KernelSet, solution_hat
from ..backend.oracle import FrequencyODE, integrate, integrate_third_order
from ..backend.singular_limit import singular_limit_sweep
from ..utils.config import RunConfig
from ..utils.presets import CONSTANT, GAUSSIAN, preset_data

logger = logging.getLogger(__name__)

Table = Tuple[List[str], List[Sequence]]

ORACLE_POINTS = 50
ORACLE_TRIALS = 3
ORACLE_T_MAX = 20.0
ORACLE_R_RANGE = (0.05, 5.0)


def norms_table(config: RunConfig) -> Table:
    """Inner-zone norms of u-hat (or theta-hat) on the time grid, one row per (n, t)."""
    data = preset_data(config.preset or CONSTANT)
    times = config.t_grid()
    times = rates.dyadic_grid() if times is None else times
    field = rates.solution_field(data, config.field)
    breakpoints = (data.support,) if data.support is not None else ()
    rows = []
    for n in config.dimensions:
        for sample in rates.norm_sweep(n, field, times, config.tol, config.threads, breakpoints):
            rows.append((n, sample.t, sample.norm, sample.achieved_tol, sample.converged))
    return ["n", "t", "norm", "achieved_tol", "converged"], rows


def rates_table(config: RunConfig) -> Table:
    data = preset_data(config.preset or CONSTANT)
    times = config.t_grid()
    rows = []
    for n in config.dimensions:
        fit = rates.solution_rate(n, data, config.field, times, config.threads, config.tol)
        target = rates.target_exponent(n, config.field)
        verdict = rates.verdict(fit.exponent)
        rows.append((n, target, fit.exponent, fit.max_residual, verdict, fit.achieved_tol, fit.converged))
        logger.info("n=%d: exponent %.4f (target %.4f)", n, fit.exponent, target)
    return ["n", "target_exponent", "fitted_exponent", "residual", "verdict", "achieved_tol", "converged"], rows


def table1_table(config: RunConfig) -> Table:
    header = [
        "class",
        "dimensions",
        "pure_plates",
        "heat",
        "thermoelastic",
        "measured_squared_exponents",
        "verdict",
        "crucial_influence",
        "mismatch",
    ]
    rows = [
        (
            row.label,
            row.dimensions,
            row.pure_plates,
            row.heat,
            row.thermoelastic,
            row.measured,
            row.verdict,
            row.crucial_influence,
            row.mismatch,
        )
        for row in rates.table1(config.dimensions, config.threads)
    ]
    return header, rows


def profile_error_table(config: RunConfig) -> Table:
    data = preset_data(config.preset or GAUSSIAN)
    times = config.t_grid()
    rows = []
    for n in config.dimensions:
        err = rates.profile_error_rate(n, data, config.field, times, config.threads, config.tol)
        sol = rates.solution_rate(n, data, config.field, times, config.threads, config.tol)
        rows.append(
            (
                n,
                config.field,
                rates.profile_error_target(n, config.field),
                err.exponent,
                err.max_residual,
                sol.exponent,
                err.exponent - sol.exponent,
                max(err.achieved_tol, sol.achieved_tol),
                err.converged and sol.converged,
            )
        )
    header = [
        "n",
        "field",
        "target_exponent",
        "fitted_exponent",
        "residual",
        "solution_exponent",
        "improvement",
        "achieved_tol",
        "converged",
    ]
    return header, rows


def singular_limit_table(config: RunConfig) -> Table:
    data = preset_data(config.preset or GAUSSIAN)
    if config.order == 2:
        data = data.conforming()
    rows = []
    for n in config.dimensions:
        sweep = singular_limit_sweep(
            config.order,
            n,
            data,
            config.eps_values,
            config.t_grid(),
            include_l2=config.l2,
            threads=config.threads,
            rtol=config.tol,
        )
        slope = sweep.energy_slope.exponent if sweep.energy_slope else None
        l2_slope = sweep.l2_slope.exponent if sweep.l2_slope else None
        for row in sweep.rows:
            rows.append(
                (
                    row.epsilon,
                    n,
                    row.sup_energy,
                    row.sup_l2,
                    slope,
                    row.sup_temperature,
                    l2_slope,
                    row.achieved_tol,
                    row.converged,
                )
            )
    header = [
        "eps",
        "n",
        "sup_energy_err",
        "sup_l2_err",
        "fitted_slope",
        "sup_temperature_err",
        "l2_slope",
        "achieved_tol",
        "converged",
    ]
    return header, rows


def _relative(a: complex, b: complex, scale: float) -> float:
    return abs(a - b) / max(abs(b), scale)


def oracle_points(seed: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seeded (t, r) grid and complex data triples for the oracle comparison."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, ORACLE_T_MAX, ORACLE_POINTS)
    r = rng.uniform(*ORACLE_R_RANGE, ORACLE_POINTS)
    data = rng.standard_normal((ORACLE_TRIALS, 3)) + 1j * rng.standard_normal((ORACLE_TRIALS, 3))
    return t, r, data


def oracle_compare_table(config: RunConfig) -> Table:
    """
    Closed-form u-hat against RK4 of the coupled system (eps = 1) and of the
    third-order equation, relative to max(|u|, max |data|).
    """
    kernels = KernelSet(mode=config.mode)
    ts, rs, triples = oracle_points(config.seed)
    rows = []
    for trial, triple in enumerate(triples):
        scale = float(np.max(np.abs(triple)))
        for t, r in zip(ts, rs):
            closed = complex(solution_hat(t, r, triple, kernels)[0])
            coupled = complex(integrate(FrequencyODE(r, 1.0, tuple(triple)), t)[0])
            r2 = r * r
            u_tt = -r2 * r2 * triple[0] + r2 * triple[2]
            third = complex(integrate_third_order(r, t, (triple[0], triple[1], u_tt))[0])
            rows.append(
                (
                    trial,
                    t,
                    r,
                    closed.real,
                    closed.imag,
                    coupled.real,
                    coupled.imag,
                    _relative(closed, coupled, scale),
                    _relative(third, coupled, scale),
                )
            )
    worst = max(row[7] for row in rows)
    logger.info("oracle comparison: worst relative error %.3e", worst)
    header = ["trial", "t", "r", "u_re", "u_im", "u_oracle_re", "u_oracle_im", "rel_err", "rel_err_third_order"]
    return header, rows
