"""
The `ExpInt2` scheme: the second-order exponential-type integrator.

The scheme is assembled in the twisted variable `v = exp(t d^3) u`. On top of the
first-order boundary terms it carries the contribution of the linear-in-time
correction `v + s v'`, where `v' = (1/2) exp(t d^3) d/dx (exp(-t d^3) v)^2`:

    (tau/3) T(t1) [(T(-t1) D^-1 v) (T(-t1) D^-1 v')]
      - (1/9) T(t1) D^-1 [(T(-t1) D^-2 v) (T(-t1) D^-2 v')]
      + (1/9) T(t0) D^-1 [(T(-t0) D^-2 v) (T(-t0) D^-2 v')]

with `t0 = t_n`, `t1 = t_n + tau` and `T(t) = exp(t (d^3 - alpha d))`. The untwisted
map doesn't depend on `t_n`, so untwisted steps are taken from `t_n = 0`.

The bracketed products are always formed on a padded grid, whatever `dealias` says.
`v'` is twice as wide as `v`, so their pair sums can wrap, and the last three terms
only cancel to `O(tau^2)` for pairs that land on `k1 + k2`.
"""

import logging

from kdvexp.enums import NyquistPolicy, Variant
from kdvexp.scheme import Scheme, require_zero_mean
from kdvexp.spectral import (
    SpectralField,
    apply_derivative,
    apply_inverse_derivative,
    pointwise_product,
    pointwise_square,
    propagate_shifted_airy,
)

logger = logging.getLogger(__name__)


def compute_nonlinearity(
    u: SpectralField,
    *,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
) -> SpectralField:
    """
    Returns `(1/2) d/dx (u^2)`, the untwisted time derivative of the twisted variable.
    """
    return apply_derivative(pointwise_square(u, dealias=dealias), nyquist=nyquist) * 0.5


def step_expint2_twisted(
    v: SpectralField,
    t_n: float,
    tau: float,
    *,
    alpha: float = 0.0,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
) -> SpectralField:
    """
    Takes one second-order step of size `tau` in the twisted variable, from time `t_n`.
    """
    require_zero_mean(v)

    def flow(field: SpectralField, t: float) -> SpectralField:
        return propagate_shifted_airy(field, t, alpha, nyquist=nyquist)

    def antiderivative(field: SpectralField) -> SpectralField:
        return apply_inverse_derivative(field, nyquist=nyquist)

    # v' from the current (twisted) iterate.
    derivative = flow(compute_nonlinearity(flow(v, -t_n), nyquist=nyquist, dealias=dealias), t_n)

    v1 = antiderivative(v)
    w1 = antiderivative(derivative)
    v2 = antiderivative(v1)
    w2 = antiderivative(w1)

    def square_term(t: float) -> SpectralField:
        return flow(pointwise_square(flow(v1, -t), dealias=dealias), t)

    def correction_term(t: float) -> SpectralField:
        product = pointwise_product(flow(v2, -t), flow(w2, -t), dealias=True)
        return flow(antiderivative(product), t)

    t_next = t_n + tau
    cross = flow(pointwise_product(flow(v1, -t_next), flow(w1, -t_next), dealias=True), t_next)

    update = (
        (square_term(t_next) - square_term(t_n)) * (1 / 6)
        + cross * (tau / 3)
        - (correction_term(t_next) - correction_term(t_n)) * (1 / 9)
    )
    # No kernel reaches k1 + k2 = 0.
    return v + update.without_mean()


def step_expint2(
    u: SpectralField,
    tau: float,
    *,
    alpha: float = 0.0,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
) -> SpectralField:
    """
    Takes one untwisted second-order step of size `tau`.

    This is the twisted step from `t_n = 0`, untwisted at `tau`.
    """
    v = step_expint2_twisted(u, 0.0, tau, alpha=alpha, nyquist=nyquist, dealias=dealias)
    return propagate_shifted_airy(v, -tau, alpha, nyquist=nyquist)


class ExpInt2(Scheme):
    """
    The second-order exponential-type integrator.
    """

    variant = Variant.ExpInt2

    def step(self, u: SpectralField, tau: float, *, alpha: float = 0.0) -> SpectralField:
        return step_expint2(
            u,
            tau,
            alpha=alpha,
            nyquist=self._config.nyquist_policy,
            dealias=self._config.dealias,
        )

    def step_twisted(self, v: SpectralField, t_n: float, tau: float) -> SpectralField:
        return step_expint2_twisted(
            v, t_n, tau, nyquist=self._config.nyquist_policy, dealias=self._config.dealias
        )
