"""
Run configuration: flat `key = value` documents and their validated model.

A document holds one pair per line; `#` starts a comment and blank lines are
ignored:

```
# Solitary wave on a large torus.
k_modes = 1024
torus_scale = 0.1
scheme = both
tau_list = dyadic:2^-7..2^-13:x0.5
t_final = 1.0
ic = soliton c=1 a=0
reference = exact
```

Every key can also be given on the command line (as `--k-modes`, `--torus-scale`
and so on); command-line values win over file values.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Extra, ValidationError, root_validator, validator

from kdvexp.constants import DEFAULT_NORMS
from kdvexp.enums import AlphaPolicy, Nonlinearity, NormKind, NyquistPolicy, Variant
from kdvexp.exceptions import ConfigError, KdvError
from kdvexp.experiments import InitialCondition, ReferenceSpec
from kdvexp.scheme import SchemeConfig
from kdvexp.spectral import Grid
from kdvexp.util import parse_real, parse_tau_list

logger = logging.getLogger(__name__)

COMMAND_LINE = "command line"
"""
The location reported for errors in values given as flags.
"""

Location = Union[int, str]
Entries = Dict[str, Tuple[str, Location]]


class RunConfig(BaseModel):
    """
    The validated configuration of a `simulate` or `converge` run.
    """

    k_modes: int
    torus_scale: float = 1.0
    scheme: str = "expint1"
    """
    `expint1`, `expint2` or `both`.
    """

    tau: Optional[float] = None
    tau_list: Optional[List[float]] = None
    t_final: float
    ic: str
    """
    The initial-condition spec; see `kdvexp.experiments.InitialCondition.parse`.
    """

    alpha_policy: AlphaPolicy = AlphaPolicy.AutoShift
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist
    dealias: bool = False
    nonlinearity: Optional[Nonlinearity] = None
    """
    The sign convention; defaults to the initial condition's natural one.
    """

    snapshots: int = 2
    snapshot_times: Optional[List[float]] = None
    out: Optional[Path] = None
    plot: bool = True
    reference: Optional[ReferenceSpec] = None
    norms: List[NormKind] = list(DEFAULT_NORMS)
    seed: int = 0
    exact_overlay: bool = False

    class Config:
        extra = Extra.forbid

    @validator("k_modes")
    def _k_modes_valid(cls, value: int) -> int:
        if value < 4 or value % 2 != 0:
            raise ValueError(f"must be even and at least 4, got {value}")
        return value

    @validator("torus_scale")
    def _torus_scale_valid(cls, value: float) -> float:
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"must be positive and finite, got {value}")
        return value

    @validator("scheme")
    def _scheme_valid(cls, value: str) -> str:
        value = value.lower()
        if value != "both" and value not in {v.value for v in Variant}:
            raise ValueError(f"expected expint1, expint2 or both, got {value!r}")
        return value

    @validator("tau", "t_final", pre=True)
    def _parse_real(cls, value: object) -> object:
        return parse_real(value) if isinstance(value, str) else value

    @validator("tau")
    def _tau_valid(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not (math.isfinite(value) and value > 0):
            raise ValueError(f"must be positive and finite, got {value}")
        return value

    @validator("t_final")
    def _t_final_valid(cls, value: float) -> float:
        if not (math.isfinite(value) and value >= 0):
            raise ValueError(f"must be nonnegative and finite, got {value}")
        return value

    @validator("tau_list", pre=True)
    def _parse_tau_list(cls, value: object) -> object:
        return parse_tau_list(value) if isinstance(value, str) else value

    @validator("snapshots")
    def _snapshots_valid(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"must be at least 1, got {value}")
        return value

    @validator("snapshot_times", pre=True)
    def _parse_snapshot_times(cls, value: object) -> object:
        if isinstance(value, str):
            return [parse_real(t) for t in value.split(",") if t.strip()]
        return value

    @validator("reference", pre=True)
    def _parse_reference(cls, value: object) -> object:
        return ReferenceSpec.parse(value) if isinstance(value, str) else value

    @validator("norms", pre=True)
    def _parse_norms(cls, value: object) -> object:
        if isinstance(value, str):
            return [n.strip().lower() for n in value.split(",") if n.strip()]
        return value

    @validator("norms")
    def _norms_nonempty(cls, value: List[NormKind]) -> List[NormKind]:
        if not value:
            raise ValueError("at least one norm is required")
        return value

    @root_validator(skip_on_failure=True)
    def _check_consistency(cls, values: dict) -> dict:
        # The initial condition depends on the grid, so it's validated here.
        try:
            grid = Grid(values["k_modes"], values["torus_scale"])
            InitialCondition.parse(values["ic"], grid)
        except KdvError as e:
            raise ValueError(f"ic: {e}")

        times = values.get("snapshot_times")
        if times is not None:
            if any(b < a for a, b in zip(times, times[1:])):
                raise ValueError(f"snapshot_times: must be sorted, got {times}")
            if times and (times[0] < 0 or times[-1] > values["t_final"]):
                raise ValueError(f"snapshot_times: must lie within [0, t_final], got {times}")
        return values

    @property
    def grid(self) -> Grid:
        return Grid(self.k_modes, self.torus_scale)

    @property
    def variants(self) -> List[Variant]:
        if self.scheme == "both":
            return [Variant.ExpInt1, Variant.ExpInt2]
        return [Variant(self.scheme)]

    def initial_condition(self) -> InitialCondition:
        return InitialCondition.parse(self.ic, self.grid)

    def effective_nonlinearity(self) -> Nonlinearity:
        return self.nonlinearity or self.initial_condition().natural_nonlinearity

    def scheme_config(self, variant: Variant, tau: float) -> SchemeConfig:
        return SchemeConfig(
            variant=variant,
            tau=tau,
            alpha_policy=self.alpha_policy,
            nyquist_policy=self.nyquist,
            dealias=self.dealias,
            nonlinearity=self.effective_nonlinearity(),
        )

    def snapshot_schedule(self) -> List[float]:
        """
        The times at which a `simulate` run records snapshots.
        """
        if self.snapshot_times:
            return list(self.snapshot_times)
        if self.snapshots == 1:
            return [self.t_final]
        return [float(t) for t in np.linspace(0.0, self.t_final, self.snapshots)]


def read_entries(text: str) -> Entries:
    """
    Splits a configuration document into its entries, keeping the line of each.

    Raises:
        ConfigError: If a line isn't a `key = value` pair, or a key repeats
    """
    entries: Entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue

        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"expected `key = value`, got {line!r}", line=lineno)
        if key in entries:
            raise ConfigError(
                f"duplicate key {key!r} (first set on line {entries[key][1]})", line=lineno
            )
        entries[key] = (value.strip(), lineno)

    return entries


def parse_config(text: str, overrides: Optional[Dict[str, str]] = None) -> RunConfig:
    """
    Parses and validates a configuration document, applying `overrides` on top.
    """
    return build_run_config(read_entries(text), overrides)


def load_config(path: Path, overrides: Optional[Dict[str, str]] = None) -> RunConfig:
    """
    Reads, parses and validates a configuration file.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"couldn't read {path}: {e.strerror}")
    return parse_config(text, overrides)


def build_run_config(entries: Entries, overrides: Optional[Dict[str, str]] = None) -> RunConfig:
    """
    Validates configuration entries (and command-line overrides) into a `RunConfig`.

    Raises:
        ConfigError: For unknown keys, missing keys and malformed values, with the
            line (or "command line") the value came from
    """
    merged = dict(entries)
    for key, value in (overrides or {}).items():
        merged[key] = (value, COMMAND_LINE)
    logger.debug(f"configuration keys: {sorted(merged)}")

    try:
        return RunConfig(**{key: value for key, (value, _) in merged.items()})
    except ValidationError as e:
        # Unknown keys are reported first: they usually explain the other errors.
        error = min(e.errors(), key=lambda err: err["type"] != "value_error.extra")
        key = str(error["loc"][0]) if error["loc"] else "__root__"
        message = error["msg"]
        if key == "__root__":
            # Cross-field errors name their key as a message prefix.
            key = message.partition(":")[0]
        elif error["type"] == "value_error.extra":
            message = f"unknown key {key!r}"
        elif error["type"] == "value_error.missing":
            message = f"missing required key {key!r}"
        else:
            message = f"{key}: {message}"
        location = merged[key][1] if key in merged else None
        raise ConfigError(message, line=location)


def read_seed(path: Path) -> int:
    """
    Reads just the `seed` key of a configuration file (0 when absent), without
    validating the rest of the run.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"couldn't read {path}: {e.strerror}")

    value, line = read_entries(text).get("seed", ("0", None))
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"seed: expected an integer, got {value!r}", line=line)
