"""Point evaluations: roots, kernels, profiles and the 1D thermoelastic reduction."""
from __future__ import annotations

import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..backend.kernels import KernelSet
from ..backend.oracle import integrate_system
from ..backend.profiles import eval_J, eval_u0_hat, eval_uI1_hat
from ..backend.reduction import lagrange_kernels, reduce_thermoelastic_1d
from ..backend.roots import solve_characteristic_cubic
from ..utils.config import RunConfig
from ..utils.presets import GAUSSIAN, preset_data

logger = logging.getLogger(__name__)

Table = Tuple[List[str], List[Sequence]]


def _grid(config: RunConfig):
    return itertools.product(config.t_values, config.r_values)


def roots_table(config: RunConfig) -> Table:
    return ["a0", "a1", "a2", "alpha_plus", "alpha_minus"], [solve_characteristic_cubic().to_row()]


def kernels_table(config: RunConfig) -> Table:
    """K_j, their first two time derivatives and the u/theta multipliers; ``mode`` closes the row."""
    kernels = KernelSet(mode=config.mode)
    mult = kernels.multipliers
    header = ["t", "r"]
    for prefix in ("K", "dtK", "dt2K"):
        header += [f"{prefix}{j}" for j in range(3)]
    header += [f"u_mult{j}" for j in range(3)] + [f"theta_mult{j}" for j in range(3)] + ["mode"]
    rows = []
    for t, r in _grid(config):
        cells: List = [t, r]
        for order in range(3):
            cells += [float(k) for k in kernels.derivatives(order, t, r)]
        cells += [float(m) for m in mult.u(t, r)]
        cells += [float(m) for m in mult.theta(t, r)]
        rows.append(cells + [config.mode])
    return header, rows


def profiles_table(config: RunConfig) -> Table:
    """J0..J3 and the damped plate multipliers of (u0, u1) with its first-order corrector."""
    header = ["t", "r", "J0", "J1", "J2", "J3"]
    header += ["u0_mult0", "u0_mult1", "dt_u0_mult0", "dt_u0_mult1", "uI1_mult0", "uI1_mult1"]
    rows = []
    for t, r in _grid(config):
        cells: List = [t, r] + [float(eval_J(j, t, r)) for j in range(4)]
        (v0, d0), (v1, d1) = (eval_u0_hat(t, r, *slot) for slot in ((1.0, 0.0), (0.0, 1.0)))
        cells += [complex(v0).real, complex(v1).real, complex(d0).real, complex(d1).real]
        cells += [complex(eval_uI1_hat(t, r, *slot)[0]).real for slot in ((1.0, 0.0), (0.0, 1.0))]
        rows.append(cells)
    return header, rows


def thermo1d_table(config: RunConfig) -> Table:
    """Roots of the reduced cubic and u from the Lagrange sums against the coupled system."""
    symbol = reduce_thermoelastic_1d(config.alpha, config.kappa, config.gamma1, config.gamma2)
    data = preset_data(config.preset or GAUSSIAN)
    header = ["r", "t"]
    for k in range(1, 4):
        header += [f"root{k}_re", f"root{k}_im"]
    header += ["u_re", "u_im", "u_system_re", "u_system_im", "rel_err"]
    rows = []
    for r in config.r_values:
        lams = symbol.roots(r)
        triple = tuple(complex(np.asarray(d)) for d in data.at(r))
        times = sorted(config.t_values)
        direct = integrate_system(symbol.system(r), triple, times[-1], t_eval=times, label=symbol.name)
        scale = max(abs(x) for x in triple) or 1.0
        for t, state in zip(times, direct):
            u = complex(lagrange_kernels(symbol, t, r, triple))
            ref = complex(state[0])
            cells: List = [r, t]
            for lam in lams:
                cells += [lam.real, lam.imag]
            cells += [u.real, u.imag, ref.real, ref.imag, abs(u - ref) / max(abs(ref), scale)]
            rows.append(cells)
    logger.info("%s: %d rows", symbol.name, len(rows))
    return header, rows
