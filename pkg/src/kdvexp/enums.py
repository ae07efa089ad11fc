"""
Enumerations for kdvexp.
"""

from __future__ import annotations

import enum

from kdvexp.util import assert_never


@enum.unique
class Variant(str, enum.Enum):
    """
    An enumeration of the supported exponential-type integrators.
    """

    ExpInt1: str = "expint1"
    ExpInt2: str = "expint2"

    @property
    def order(self) -> int:
        """
        Returns the formal convergence order of this integrator.
        """
        if self is Variant.ExpInt1:
            return 1
        elif self is Variant.ExpInt2:
            return 2
        else:
            assert_never(self)  # pragma: no cover

    def __str__(self) -> str:
        return self.value


@enum.unique
class AlphaPolicy(str, enum.Enum):
    """
    How an evolution treats initial data with a nonzero mean.
    """

    RequireZeroMean: str = "require_zero_mean"
    """
    Reject initial data whose zero mode isn't (numerically) zero.
    """

    AutoShift: str = "auto_shift"
    """
    Split off the mean and evolve the zero-mean remainder with shifted propagators.
    """

    def __str__(self) -> str:
        return self.value


@enum.unique
class NyquistPolicy(str, enum.Enum):
    """
    How odd Fourier multipliers treat the unpaired mode `-K/2`.
    """

    ZeroNyquist: str = "zero"
    """
    Odd multipliers see an effective wavenumber of zero at `-K/2`, which keeps
    real fields real.
    """

    PaperExact: str = "paper_exact"
    """
    Odd multipliers use the true wavenumber at `-K/2`, like every other mode. Real
    fields with a live Nyquist mode then pick up imaginary parts.
    """

    def __str__(self) -> str:
        return self.value


@enum.unique
class Nonlinearity(str, enum.Enum):
    """
    The sign convention of the quadratic term.
    """

    Plus: str = "plus"
    """
    `u_t + u_xxx = (1/2) (u^2)_x`, the form the integrators are written for.
    """

    Minus: str = "minus"
    """
    `u_t + u_xxx + (1/2) (u^2)_x = 0`, the form solved by the solitary waves.
    """

    @property
    def sign(self) -> float:
        if self is Nonlinearity.Plus:
            return 1.0
        elif self is Nonlinearity.Minus:
            return -1.0
        else:
            assert_never(self)  # pragma: no cover

    def __str__(self) -> str:
        return self.value


@enum.unique
class NormKind(str, enum.Enum):
    """
    The discrete Sobolev norms an error can be measured in.
    """

    L2: str = "l2"
    H1: str = "h1"
    H2: str = "h2"

    @property
    def order(self) -> float:
        """
        Returns the Sobolev index `r` of this norm.
        """
        if self is NormKind.L2:
            return 0.0
        elif self is NormKind.H1:
            return 1.0
        elif self is NormKind.H2:
            return 2.0
        else:
            assert_never(self)  # pragma: no cover

    def __str__(self) -> str:
        return self.value


@enum.unique
class InitialKind(str, enum.Enum):
    """
    The families of initial conditions.
    """

    Sech2Sin: str = "sech2sin"
    """
    `2 sech^2(x/2) sin(x)` on the unit torus.
    """

    Soliton: str = "soliton"
    """
    The solitary wave `3c sech^2(sqrt(c)/2 (x - a))`.
    """

    CustomSpectrum: str = "spectrum"
    """
    A real field given by an explicit list of nonnegative-mode coefficients.
    """

    def __str__(self) -> str:
        return self.value


@enum.unique
class ReferenceKind(str, enum.Enum):
    """
    What a convergence study measures its errors against.
    """

    ExactSoliton: str = "exact"
    FineTau: str = "fine"

    def __str__(self) -> str:
        return self.value
