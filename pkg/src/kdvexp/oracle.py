"""
Brute-force reference implementations of the quadratic terms and of whole steps.

Everything here works on explicit lists of mode pairs `(k1, k2)` instead of on
grid products, so its cost is quadratic in the number of modes. The functions
refuse grids with more than `kdvexp.constants.ORACLE_MAX_MODES` modes.

Each pair contributes to the grid index of `k1 + k2`. With `aliased=True` sums
outside of the band wrap around modulo `K`, exactly as they do in a grid
product; with `aliased=False` they're dropped. Odd multipliers see the effective
wavenumbers of the chosen `kdvexp.enums.NyquistPolicy`.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass

import numpy as np
import scipy.integrate
from pydantic import BaseModel, validator

from kdvexp.constants import ORACLE_MAX_MODES
from kdvexp.enums import NyquistPolicy
from kdvexp.exceptions import AccuracyError, KdvError
from kdvexp.scheme import require_zero_mean
from kdvexp.spectral import Grid, SpectralField, same_grid, sobolev_norm

logger = logging.getLogger(__name__)


class OracleReport(BaseModel):
    """
    The difference between two fields, as seen by a self-test.
    """

    max_abs_coeff_diff: float
    """
    The largest per-mode coefficient difference.
    """

    h1_diff: float
    """
    The discrete `H^1` norm of the difference.
    """

    modes_compared: int
    notes: str = ""

    @validator("max_abs_coeff_diff", "h1_diff")
    def _nonnegative(cls, value: float) -> float:
        if not value >= 0:
            raise ValueError(f"differences are nonnegative, got {value}")
        return value


@dataclass(frozen=True)
class _Pairs:
    """
    Every ordered pair of modes on a grid, flattened.
    """

    first: np.ndarray
    second: np.ndarray
    target: np.ndarray
    """
    The grid index `k1 + k2` lands on, after wrapping.
    """

    in_band: np.ndarray
    """
    Whether `k1 + k2` lies in the band without wrapping.
    """

    kappa1: np.ndarray
    kappa2: np.ndarray
    kappa_target: np.ndarray

    faithful: np.ndarray
    """
    Whether the target's effective wavenumber is `kappa1 + kappa2`, so that the
    phase difference factors as `3 kappa1 kappa2 (kappa1 + kappa2)`.
    """

    def phase(self, alpha: float) -> np.ndarray:
        """
        The phase difference `psi` of each pair, shift included.
        """
        k1, k2, km = self.kappa1, self.kappa2, self.kappa_target
        general = km**3 - k1**3 - k2**3 + alpha * (km - k1 - k2)
        return np.where(self.faithful, 3 * k1 * k2 * (k1 + k2), general)


@functools.lru_cache(maxsize=16)
def _pairs(grid: Grid, nyquist: NyquistPolicy) -> _Pairs:
    num_modes = grid.num_modes
    half = num_modes // 2
    first, second = np.meshgrid(np.arange(num_modes), np.arange(num_modes), indexing="ij")
    first, second = first.ravel(), second.ravel()

    sums = grid.modes[first] + grid.modes[second]
    target = (sums + half) % num_modes
    kappa = grid.odd_wavenumbers(nyquist)
    kappa_target = kappa[target]

    faithful = (sums == grid.modes[target]) & (kappa_target == grid.wavenumbers[target])
    return _Pairs(
        first=first,
        second=second,
        target=target,
        in_band=(-half <= sums) & (sums < half),
        kappa1=kappa[first],
        kappa2=kappa[second],
        kappa_target=kappa_target,
        faithful=faithful,
    )


def _require_small(grid: Grid) -> None:
    if grid.num_modes > ORACLE_MAX_MODES:
        raise KdvError(
            f"oracles are limited to {ORACLE_MAX_MODES} modes, got {grid.num_modes}"
        )


def _accumulate(grid: Grid, targets: np.ndarray, terms: np.ndarray) -> np.ndarray:
    out = np.zeros(grid.num_modes, dtype=np.complex128)
    np.add.at(out, targets, terms)
    return out


def _flow(coeffs: np.ndarray, kappa: np.ndarray, t: float, alpha: float) -> np.ndarray:
    """
    `exp(t (d^3 - alpha d))` on raw coefficients.
    """
    return coeffs * np.exp(-1j * t * (kappa**3 + alpha * kappa))


def direct_convolution_square(xi: SpectralField, *, aliased: bool = True) -> SpectralField:
    """
    Squares `xi` by summing `xi_{k1} xi_{k2}` over every pair of modes.
    """
    grid = xi.grid
    _require_small(grid)
    pairs = _pairs(grid, NyquistPolicy.PaperExact)
    mask = np.ones_like(pairs.in_band) if aliased else pairs.in_band
    terms = xi.coeffs[pairs.first[mask]] * xi.coeffs[pairs.second[mask]]
    return SpectralField(grid, _accumulate(grid, pairs.target[mask], terms), real=False)


def _first_order_sum(
    v: SpectralField,
    t_n: float,
    tau: float,
    alpha: float,
    nyquist: NyquistPolicy,
    aliased: bool,
) -> np.ndarray:
    grid = v.grid
    pairs = _pairs(grid, nyquist)
    mask = (pairs.kappa1 != 0) & (pairs.kappa2 != 0) & (grid.modes[pairs.target] != 0)
    if not aliased:
        mask &= pairs.in_band

    psi = pairs.phase(alpha)[mask]
    kernel = (np.exp(-1j * (t_n + tau) * psi) - np.exp(-1j * t_n * psi)) / (
        -3 * pairs.kappa1[mask] * pairs.kappa2[mask]
    )
    terms = kernel * v.coeffs[pairs.first[mask]] * v.coeffs[pairs.second[mask]]
    return 0.5 * _accumulate(grid, pairs.target[mask], terms)


def oracle_first_order_step(
    v: SpectralField,
    t_n: float,
    tau: float,
    alpha: float = 0.0,
    *,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    aliased: bool = True,
) -> SpectralField:
    """
    Evaluates one first-order step of the twisted variable mode by mode.

    Each pair with nonzero wavenumbers adds
    `(1/2) (exp(-i (t_n + tau) psi) - exp(-i t_n psi)) / (-3 kappa1 kappa2) v_k1 v_k2`
    to its target mode, unless that is the zero mode.
    """
    _require_small(v.grid)
    require_zero_mean(v)
    update = _first_order_sum(v, t_n, tau, alpha, nyquist, aliased)
    return SpectralField(v.grid, v.coeffs + update, real=False)


def oracle_second_order_step(
    v: SpectralField,
    tau: float,
    alpha: float = 0.0,
    *,
    t_n: float = 0.0,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    aliased: bool = True,
) -> SpectralField:
    """
    Evaluates one second-order step mode by mode, from the twisted `v` at `t_n`.

    Returns the *untwisted* value at `t_n + tau`, directly comparable with
    `kdvexp.schemes.expint2.step_expint2`.

    `aliased` only applies to the first-order terms and to `v'`. The terms pairing
    `v` with `v'` never wrap, and skip the Nyquist mode, like the padded products of
    the stepper.
    """
    grid = v.grid
    _require_small(grid)
    require_zero_mean(v)

    pairs = _pairs(grid, nyquist)
    kappa = grid.odd_wavenumbers(nyquist)
    t_next = t_n + tau

    # v' = (1/2) T(t_n) d/dx (T(-t_n) v)^2, squared by brute force.
    untwisted = SpectralField(grid, _flow(v.coeffs, kappa, -t_n, alpha))
    square = direct_convolution_square(untwisted, aliased=aliased).coeffs
    derivative = _flow(0.5j * kappa * square, kappa, t_n, alpha)

    # Unwrapped pairs, off the Nyquist and zero modes.
    mask = (pairs.kappa1 != 0) & (pairs.kappa2 != 0) & pairs.in_band & (pairs.target != 0)
    mask &= pairs.kappa_target != 0

    k1, k2, km = pairs.kappa1[mask], pairs.kappa2[mask], pairs.kappa_target[mask]
    psi = pairs.phase(alpha)[mask]
    products = v.coeffs[pairs.first[mask]] * derivative[pairs.second[mask]]
    boundary = (tau / 3) * np.exp(-1j * t_next * psi) / (-k1 * k2) * products
    correction = (
        (np.exp(-1j * t_next * psi) - np.exp(-1j * t_n * psi)) / (9j * km * k1**2 * k2**2)
    ) * products

    update = _first_order_sum(v, t_n, tau, alpha, nyquist, aliased)
    update += _accumulate(grid, pairs.target[mask], boundary - correction)

    return SpectralField(grid, _flow(v.coeffs + update, kappa, -t_next, alpha), real=False)


def oracle_quadrature_step(
    v: SpectralField,
    t_n: float,
    tau: float,
    tol: float = 1e-10,
    alpha: float = 0.0,
    *,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    aliased: bool = True,
) -> SpectralField:
    """
    Integrates the frozen Duhamel term
    `(1/2) int_0^tau T(t_n + s) d/dx (T(-(t_n + s)) v)^2 ds` numerically, mode by mode.

    Raises:
        AccuracyError: If the adaptive quadrature doesn't reach `tol`
    """
    grid = v.grid
    _require_small(grid)
    require_zero_mean(v)
    if tau == 0:
        return SpectralField(grid, v.coeffs.copy(), real=False)

    pairs = _pairs(grid, nyquist)
    mask = np.ones_like(pairs.in_band) if aliased else pairs.in_band
    targets = pairs.target[mask]
    psi = pairs.phase(alpha)[mask]
    weights = 0.5j * pairs.kappa_target[mask]
    weights = weights * v.coeffs[pairs.first[mask]] * v.coeffs[pairs.second[mask]]

    def integrand(s: float) -> np.ndarray:
        coeffs = _accumulate(grid, targets, weights * np.exp(-1j * (t_n + s) * psi))
        return np.concatenate([coeffs.real, coeffs.imag])

    result, error, info = scipy.integrate.quad_vec(
        integrand, 0.0, tau, epsabs=0.1 * tol, epsrel=0.0, norm="max", full_output=True
    )
    logger.debug(f"quadrature: {info.neval} evaluations, error estimate {error:.3e}")
    if not info.success or error > tol:
        raise AccuracyError(
            f"quadrature reached only {error:.3e} (wanted {tol:.3e}): {info.message}"
        )

    num_modes = grid.num_modes
    return SpectralField(grid, v.coeffs + result[:num_modes] + 1j * result[num_modes:], real=False)


def compare_fields(a: SpectralField, b: SpectralField, *, notes: str = "") -> OracleReport:
    """
    Measures the difference between two fields on the same grid.

    Raises:
        GridMismatchError: If the fields live on different grids
    """
    grid = same_grid(a, b)
    difference = SpectralField(grid, a.coeffs - b.coeffs)
    return OracleReport(
        max_abs_coeff_diff=float(np.max(np.abs(difference.coeffs))),
        h1_diff=sobolev_norm(difference, 1.0),
        modes_compared=grid.num_modes,
        notes=notes,
    )
