"""
The `ExpInt1` scheme: the first-order exponential-type integrator.

With `E = exp(-tau d^3/dx^3)` and `D^-1` the regularized antiderivative, one step reads

    u' = E u + (1/6) (E D^-1 u)^2 - (1/6) E (D^-1 u)^2

in the untwisted variable. The stiff linear part is integrated exactly, so no
step size restriction applies.
"""

import logging

from kdvexp.enums import NyquistPolicy, Variant
from kdvexp.scheme import Scheme, require_zero_mean
from kdvexp.spectral import (
    SpectralField,
    apply_inverse_derivative,
    pointwise_square,
    propagate_shifted_airy,
)

logger = logging.getLogger(__name__)


def step_expint1(
    u: SpectralField,
    tau: float,
    *,
    alpha: float = 0.0,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
) -> SpectralField:
    """
    Takes one untwisted step of size `tau`.

    With a nonzero `alpha` the propagators are shifted to `exp(-tau (d^3 - alpha d))`,
    which evolves the zero-mean part of a solution whose mean is `alpha`.
    """
    require_zero_mean(u)

    def flow(field: SpectralField) -> SpectralField:
        return propagate_shifted_airy(field, -tau, alpha, nyquist=nyquist)

    antiderivative = apply_inverse_derivative(u, nyquist=nyquist)
    gain = pointwise_square(flow(antiderivative), dealias=dealias)
    loss = flow(pointwise_square(antiderivative, dealias=dealias))
    # Pairs with k1 + k2 = 0 cancel exactly; don't let their rounding accumulate in mode 0.
    return flow(u) + (gain - loss).without_mean() * (1 / 6)


def step_expint1_twisted(
    v: SpectralField,
    t_n: float,
    tau: float,
    *,
    alpha: float = 0.0,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
) -> SpectralField:
    """
    Takes one step of size `tau` in the twisted variable, from time `t_n`.

    The update is the difference of two boundary terms
    `(1/6) T(t) (T(-t) D^-1 v)^2` at `t = t_n + tau` and `t = t_n`, with
    `T(t) = exp(t (d^3 - alpha d))`.
    """
    require_zero_mean(v)
    antiderivative = apply_inverse_derivative(v, nyquist=nyquist)

    def boundary(t: float) -> SpectralField:
        twisted = propagate_shifted_airy(antiderivative, -t, alpha, nyquist=nyquist)
        return propagate_shifted_airy(
            pointwise_square(twisted, dealias=dealias), t, alpha, nyquist=nyquist
        )

    return v + (boundary(t_n + tau) - boundary(t_n)).without_mean() * (1 / 6)


def step_expint1_shifted(
    u: SpectralField,
    alpha: float,
    t_n: float,
    tau: float,
    *,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
) -> SpectralField:
    """
    Takes one step for the zero-mean part `u` of a solution with mean `alpha`,
    by twisting at `t_n`, stepping, and untwisting at `t_n + tau`.
    """
    v = propagate_shifted_airy(u, t_n, alpha, nyquist=nyquist)
    v = step_expint1_twisted(v, t_n, tau, alpha=alpha, nyquist=nyquist, dealias=dealias)
    return propagate_shifted_airy(v, -(t_n + tau), alpha, nyquist=nyquist)


class ExpInt1(Scheme):
    """
    The first-order exponential-type integrator.
    """

    variant = Variant.ExpInt1

    def step(self, u: SpectralField, tau: float, *, alpha: float = 0.0) -> SpectralField:
        return step_expint1(
            u,
            tau,
            alpha=alpha,
            nyquist=self._config.nyquist_policy,
            dealias=self._config.dealias,
        )

    def step_twisted(self, v: SpectralField, t_n: float, tau: float) -> SpectralField:
        return step_expint1_twisted(
            v, t_n, tau, nyquist=self._config.nyquist_policy, dealias=self._config.dealias
        )
