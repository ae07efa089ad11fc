"""
The time-stepping schemes supported by kdvexp.
"""

import math
from typing import Optional

from pydantic import BaseModel, Extra, validator

from kdvexp.constants import MEAN_TOLERANCE
from kdvexp.enums import AlphaPolicy, Nonlinearity, NyquistPolicy, Variant
from kdvexp.exceptions import KdvError, MeanViolationError
from kdvexp.spectral import SpectralField


class SchemeConfig(BaseModel):
    """
    The configuration shared by every scheme.
    """

    variant: Variant
    """
    The integrator to step with.
    """

    tau: float
    """
    The time step. Must be positive and finite.
    """

    alpha_policy: AlphaPolicy = AlphaPolicy.AutoShift
    """
    How initial data with a nonzero mean is handled.
    """

    nyquist_policy: NyquistPolicy = NyquistPolicy.ZeroNyquist
    """
    How odd multipliers treat the Nyquist mode.
    """

    dealias: bool = False
    """
    Whether quadratic terms are formed with 3/2 zero padding.
    """

    nonlinearity: Nonlinearity = Nonlinearity.Plus
    """
    The sign convention of the equation being solved.
    """

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    @validator("tau")
    def _tau_positive(cls, value: float) -> float:
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"time step must be positive and finite, got {value}")
        return value


def require_zero_mean(u: SpectralField) -> None:
    """
    Checks the zero-mean precondition of the steppers.

    Raises:
        MeanViolationError: If the zero mode of `u` isn't negligible
    """
    if abs(u.zero_mode) > MEAN_TOLERANCE * u.scale:
        raise MeanViolationError(
            f"stepper requires a zero-mean field, got zero mode {u.zero_mode}; "
            "evolve with the auto_shift policy instead"
        )


class Scheme:
    """
    A generic one-step scheme for the twisted KdV equation.
    """

    variant: Variant

    def __init__(self, config: SchemeConfig):
        if config.variant is not self.variant:
            raise KdvError(f"{type(self).__name__} can't run a {config.variant} configuration")
        self._config = config

    @property
    def config(self) -> SchemeConfig:
        return self._config

    @property
    def order(self) -> int:
        return self.variant.order

    def step(
        self, u: SpectralField, tau: float, *, alpha: float = 0.0
    ) -> SpectralField:  # pragma: no cover
        """
        Advances the untwisted zero-mean field `u` by `tau`.

        Args:
            u: The current field
            tau: The step to take (the configured step, or a shorter final one)
            alpha: The mean that was split off the solution, if any
        """
        raise NotImplementedError

    def _step(
        self, u: SpectralField, tau: Optional[float] = None, *, alpha: float = 0.0
    ) -> SpectralField:
        return self.step(u, self._config.tau if tau is None else tau, alpha=alpha)

    def step_twisted(
        self, v: SpectralField, t_n: float, tau: float
    ) -> SpectralField:  # pragma: no cover
        """
        Advances the twisted field `v`, given at time `t_n`, by `tau`.
        """
        raise NotImplementedError
