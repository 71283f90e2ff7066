from typing import Callable, Dict, List, Sequence, Tuple

from ..utils.config import RunConfig
from .experiments import (
    norms_table,
    oracle_compare_table,
    profile_error_table,
    rates_table,
    singular_limit_table,
    table1_table,
)
from .spectral import kernels_table, profiles_table, roots_table, thermo1d_table

Command = Callable[[RunConfig], Tuple[List[str], List[Sequence]]]

COMMANDS: Dict[str, Command] = {
    "roots": roots_table,
    "kernels": kernels_table,
    "profiles": profiles_table,
    "norms": norms_table,
    "rates": rates_table,
    "table1": table1_table,
    "profile-error": profile_error_table,
    "singular-limit": singular_limit_table,
    "oracle-compare": oracle_compare_table,
    "thermo1d": thermo1d_table,
}
