"""Named radial data triples (u0, u1, theta0) on the Fourier side."""
from __future__ import annotations

import difflib
from functools import lru_cache
from typing import Callable, Dict, List

import numpy as np
from scipy.optimize import minimize_scalar

from ..backend.quadrature import DataTriple, RadialData

GAUSSIAN = "gaussian"
INDICATOR = "indicator"
MEAN_ZERO = "mean-zero-gaussian-derivative"
CONSTANT = "constant-profile"
LIPSCHITZ_GAUSSIAN = "lipschitz-gaussian"
PRESETS = (GAUSSIAN, INDICATOR, MEAN_ZERO, CONSTANT, LIPSCHITZ_GAUSSIAN)


@lru_cache(maxsize=None)
def gaussian_lip() -> float:
    """sup_r (1 - e^{-r^2}) / r, attained near r = 1.12."""
    res = minimize_scalar(
        lambda r: np.expm1(-r * r) / r, bounds=(1e-3, 5.0), method="bounded", options={"xatol": 1e-10}
    )
    return float(-res.fun)


def _gaussian(name: str = GAUSSIAN) -> RadialData:
    return RadialData(profile=lambda r: np.exp(-r * r), mean=1.0, lip=gaussian_lip(), name=name)


def _indicator() -> RadialData:
    # |f - 1| / r <= 1 / r <= 1 beyond the support
    return RadialData(profile=lambda r: np.where(r <= 1.0, 1.0, 0.0), mean=1.0, lip=1.0, support=1.0, name=INDICATOR)


def _constant() -> RadialData:
    return RadialData(profile=np.ones_like, mean=1.0, lip=0.0, name=CONSTANT)


def _lipschitz_gaussian() -> RadialData:
    return RadialData(profile=lambda r: (1.0 + r) * np.exp(-r * r), mean=1.0, lip=1.0, name=LIPSCHITZ_GAUSSIAN)


def _mean_zero() -> DataTriple:
    return DataTriple(
        u0=_gaussian(),
        u1=RadialData(profile=lambda r: r * np.exp(-r * r), mean=0.0, lip=1.0, name="r-gaussian"),
        th0=RadialData(profile=lambda r: (r * r - r) * np.exp(-r * r), mean=0.0, lip=1.0, name="r2-r-gaussian"),
    )


def _same(make: Callable[[], RadialData]) -> Callable[[], DataTriple]:
    return lambda: DataTriple(make(), make(), make())


_BUILDERS: Dict[str, Callable[[], DataTriple]] = {
    GAUSSIAN: _same(_gaussian),
    INDICATOR: _same(_indicator),
    MEAN_ZERO: _mean_zero,
    CONSTANT: _same(_constant),
    LIPSCHITZ_GAUSSIAN: _same(_lipschitz_gaussian),
}


def suggest(name: str, choices, max_suggestions: int = 3) -> List[str]:
    return difflib.get_close_matches(name, list(choices), n=max_suggestions, cutoff=0.5)


def preset_data(name: str) -> DataTriple:
    """
    The data triple registered under ``name``:

    * ``gaussian``: e^{-r^2} in every slot (mean 1, lip about 0.638)
    * ``indicator``: the unit ball indicator (mean 1, lip 1, support 1)
    * ``mean-zero-gaussian-derivative``: u1 = r e^{-r^2} with vanishing mean
    * ``constant-profile``: 1 in every slot (lip 0)
    * ``lipschitz-gaussian``: (1 + r) e^{-r^2} (mean 1, lip 1)
    """
    try:
        return _BUILDERS[name]()
    except KeyError:
        hint = suggest(name, PRESETS)
        more = f"; did you mean {', '.join(hint)}?" if hint else f"; expected one of {PRESETS}"
        raise ValueError(f"Invalid preset {name!r}{more}") from None
