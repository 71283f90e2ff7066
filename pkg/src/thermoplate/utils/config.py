"""
Run configuration: a flat ``key = value`` text file.

    # comments run to the end of the line
    experiment = rates
    dimensions = 1, 2, 3
    preset = constant-profile

Lists are comma separated. Keys may use ``-`` or ``_``. Command-line flags
override file values through ``RunConfig.merged``.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .presets import PRESETS, suggest

EXPERIMENTS = (
    "roots",
    "kernels",
    "profiles",
    "norms",
    "rates",
    "table1",
    "profile-error",
    "singular-limit",
    "oracle-compare",
    "thermo1d",
)
T_SCALES = ("log", "linear")
KERNEL_MODES = ("stabilized", "lagrange-sum")
FIELDS = ("u", "theta")
OUTPUT_ENV = "THERMOPLATE_OUTPUT_DIR"
DEFAULT_OUTPUT = "results"


@dataclass
class RunConfig:
    experiment: str = "table1"
    dimensions: Tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    # unset grid bounds fall back to the experiment's own time grid
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    t_count: Optional[int] = None
    t_scale: str = "log"
    eps_values: Tuple[float, ...] = tuple(10.0 ** -k for k in (1.0, 1.5, 2.0, 2.5, 3.0))
    preset: Optional[str] = None
    field: str = "u"
    tol: float = 1e-8
    threads: int = 1
    output_dir: Optional[str] = None
    order: int = 1
    l2: bool = False
    mode: str = "stabilized"
    seed: int = 0
    r_values: Tuple[float, ...] = (0.5, 1.0, 2.0)
    t_values: Tuple[float, ...] = (0.0, 1.0, 5.0)
    alpha: float = 1.0
    kappa: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 1.0

    def validate(self) -> "RunConfig":
        _choice("experiment", self.experiment, EXPERIMENTS)
        if self.preset is not None:
            _choice("preset", self.preset, PRESETS)
        _choice("t_scale", self.t_scale, T_SCALES)
        _choice("mode", self.mode, KERNEL_MODES)
        _choice("field", self.field, FIELDS)
        if not self.dimensions or any(n < 1 for n in self.dimensions):
            raise ValueError(f"Invalid dimensions {self.dimensions}; need a non-empty list of n >= 1")
        if not self.eps_values or any(not 0.0 < e < 1.0 for e in self.eps_values):
            raise ValueError(f"Invalid eps_values {self.eps_values}; need a non-empty list in (0, 1)")
        if not self.tol > 0.0:
            raise ValueError(f"Invalid tol {self.tol}; must be > 0")
        if self.threads < 1:
            raise ValueError(f"Invalid threads {self.threads}; must be >= 1")
        if self.order not in (1, 2):
            raise ValueError(f"Invalid order {self.order}; expected 1 or 2")
        if not self.r_values or not self.t_values:
            raise ValueError("Invalid r_values/t_values; lists must not be empty")
        if self.t_count is not None:
            self.t_grid()
        return self

    def t_grid(self) -> Optional[np.ndarray]:
        """The configured time grid, or None when the experiment default applies."""
        if self.t_count is None and self.t_min is None and self.t_max is None:
            return None
        if not self.t_count or self.t_min is None or self.t_max is None:
            raise ValueError("Invalid t-grid; t_min, t_max and a positive t_count are all required")
        if not 0.0 < self.t_min <= self.t_max:
            raise ValueError(f"Invalid t-grid [{self.t_min}, {self.t_max}]; need 0 < t_min <= t_max")
        if self.t_scale == "log":
            return np.geomspace(self.t_min, self.t_max, self.t_count)
        return np.linspace(self.t_min, self.t_max, self.t_count)

    def merged(self, **overrides) -> "RunConfig":
        """Copy with every override that is not None applied."""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format(value)}")
        return "\n".join(lines) + "\n"


def _choice(key: str, value: str, choices) -> None:
    if value not in choices:
        hint = suggest(value, choices)
        more = f"; did you mean {', '.join(hint)}?" if hint else f"; expected one of {tuple(choices)}"
        raise ValueError(f"Invalid {key} {value!r}{more}")


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"Invalid boolean {text!r}")


def _list(item: Callable[[str], object]) -> Callable[[str], tuple]:
    return lambda text: tuple(item(part.strip()) for part in text.split(",") if part.strip())


_PARSERS: Dict[str, Callable[[str], object]] = {
    "experiment": str,
    "dimensions": _list(int),
    "t_min": float,
    "t_max": float,
    "t_count": int,
    "t_scale": str,
    "eps_values": _list(float),
    "preset": str,
    "field": str,
    "tol": float,
    "threads": int,
    "output_dir": str,
    "order": int,
    "l2": _bool,
    "mode": str,
    "seed": int,
    "r_values": _list(float),
    "t_values": _list(float),
    "alpha": float,
    "kappa": float,
    "gamma1": float,
    "gamma2": float,
}


def parse_config(text: str) -> RunConfig:
    values: Dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"Invalid config line {lineno}: {raw!r}; expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _PARSERS:
            hint = suggest(key, _PARSERS)
            more = f"; did you mean {', '.join(hint)}?" if hint else ""
            raise ValueError(f"Invalid config key {key!r} on line {lineno}{more}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ValueError(f"Invalid value for {key} on line {lineno}: {value!r} ({exc})") from None
    return RunConfig(**values).validate()  # type: ignore[arg-type]


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())


def resolve_output_dir(config: RunConfig) -> str:
    """``output_dir`` from flags or file, else $THERMOPLATE_OUTPUT_DIR, else ./results; created."""
    path = config.output_dir or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    os.makedirs(path, exist_ok=True)
    return path
