"""
Fourier pseudospectral machinery on the (rescaled) torus `[-pi/L, pi/L]`.

Fields are stored as coefficient vectors indexed by the mode set
`B = {-K/2, ..., K/2 - 1}` in increasing order, normalized so that the function
`exp(i kappa_k x)` has coefficient one. Every operator here is a pure function of
its inputs; the symbol caches are `functools.lru_cache`s and are safe to share
between threads.

Fields tagged as real are kept *exactly* Hermitian: the symbols of the odd
operators are built so that `symbol(-k) == conj(symbol(k))` bit for bit, and
products of real fields go through real-to-complex transforms.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.fft

from kdvexp.constants import MEAN_TOLERANCE, SYMMETRY_TOLERANCE
from kdvexp.enums import NyquistPolicy
from kdvexp.exceptions import GridMismatchError, KdvError, SymmetryError
from kdvexp.protocols import GridProtocol

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class Grid:
    """
    A uniform discretization of the torus `[-pi/L, pi/L]` with `K` points.
    """

    num_modes: int
    """
    The number of Fourier modes (and grid points) `K`. Must be even and at least 4.
    """

    torus_scale: float = 1.0
    """
    The torus scale `L`. `L = 1` is the standard torus; `L < 1` stretches it.
    """

    def __post_init__(self) -> None:
        if isinstance(self.num_modes, bool) or not isinstance(self.num_modes, (int, np.integer)):
            raise KdvError(f"number of modes must be an integer, got {self.num_modes!r}")
        if self.num_modes < 4 or self.num_modes % 2 != 0:
            raise KdvError(f"number of modes must be even and at least 4, got {self.num_modes}")
        if not (math.isfinite(self.torus_scale) and self.torus_scale > 0):
            raise KdvError(f"torus scale must be positive and finite, got {self.torus_scale}")

    @property
    def length(self) -> float:
        """
        The length `2 pi / L` of the torus.
        """
        return 2 * math.pi / self.torus_scale

    @functools.cached_property
    def modes(self) -> np.ndarray:
        """
        The integer mode set `B`, in increasing order.
        """
        modes = np.arange(-self.num_modes // 2, self.num_modes // 2)
        modes.setflags(write=False)
        return modes

    @functools.cached_property
    def wavenumbers(self) -> np.ndarray:
        """
        The effective wavenumbers `kappa_k = L k`.
        """
        kappa = self.torus_scale * self.modes.astype(np.float64)
        kappa.setflags(write=False)
        return kappa

    @functools.cached_property
    def points(self) -> np.ndarray:
        """
        The grid points `x_a = 2 pi a / (K L)` for `a` in `B`.
        """
        x = (2 * math.pi / (self.num_modes * self.torus_scale)) * self.modes.astype(np.float64)
        x.setflags(write=False)
        return x

    def index(self, mode: int) -> int:
        """
        Returns the position of `mode` in a coefficient vector.
        """
        half = self.num_modes // 2
        if not -half <= mode < half:
            raise KdvError(f"mode {mode} is outside of the band [{-half}, {half})")
        return mode + half

    def odd_wavenumbers(self, nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist) -> np.ndarray:
        """
        Returns the wavenumbers that odd Fourier multipliers use under `nyquist`.
        """
        return _odd_wavenumbers(self, nyquist)


@functools.lru_cache(maxsize=64)
def _odd_wavenumbers(grid: Grid, nyquist: NyquistPolicy) -> np.ndarray:
    kappa = np.array(grid.wavenumbers)
    if nyquist is NyquistPolicy.ZeroNyquist:
        kappa[0] = 0.0
    kappa.setflags(write=False)
    return kappa


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    A field on a `Grid`, represented by its Fourier coefficients.
    """

    grid: Grid
    coeffs: np.ndarray
    real: bool = False
    """
    Whether this field represents a real-valued function.
    """

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.num_modes,):
            raise KdvError(
                f"expected {self.grid.num_modes} coefficients, got shape {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros(grid.num_modes, dtype=np.complex128), real=True)

    @classmethod
    def from_modes(
        cls, grid: Grid, modes: dict[int, Scalar], *, real: bool = False
    ) -> SpectralField:
        """
        Builds a field from a sparse `{mode: coefficient}` mapping.

        With `real=True` the mapping is completed to a Hermitian vector; only
        nonnegative modes (and the Nyquist mode) may then be given.
        """
        coeffs = np.zeros(grid.num_modes, dtype=np.complex128)
        for mode, value in modes.items():
            coeffs[grid.index(mode)] = value
            if real and 0 < mode:
                coeffs[grid.index(-mode)] = np.conj(value)
            elif real and mode < 0 and mode != -grid.num_modes // 2:
                raise KdvError(f"real fields are given by their nonnegative modes, got {mode}")

        if real:
            half = grid.num_modes // 2
            coeffs[half] = coeffs[half].real
            coeffs[0] = coeffs[0].real
        return cls(grid, coeffs, real=real)

    def coefficient(self, mode: int) -> complex:
        return complex(self.coeffs[self.grid.index(mode)])

    @property
    def zero_mode(self) -> complex:
        return complex(self.coeffs[self.grid.num_modes // 2])

    @property
    def scale(self) -> float:
        """
        The largest coefficient magnitude, floored at one; the yardstick for
        relative tolerances.
        """
        return max(1.0, float(np.max(np.abs(self.coeffs))))

    def hermitian_defect(self) -> float:
        """
        Returns the largest violation of `xi_{-k} = conj(xi_k)` (including the
        imaginary parts of the zero and Nyquist modes).
        """
        c = self.coeffs
        half = self.grid.num_modes // 2
        pairs = np.abs(c[1:half] - np.conj(c[:half:-1])) if half > 1 else np.zeros(0)
        unpaired = max(abs(c[0].imag), abs(c[half].imag))
        return float(max(unpaired, pairs.max(initial=0.0)))

    def is_hermitian(self, tolerance: float = SYMMETRY_TOLERANCE) -> bool:
        return self.hermitian_defect() <= tolerance * self.scale

    def without_mean(self) -> SpectralField:
        coeffs = self.coeffs.copy()
        coeffs[self.grid.num_modes // 2] = 0.0
        return SpectralField(self.grid, coeffs, real=self.real)

    def _check_grid(self, other: SpectralField) -> None:
        same_grid(self, other)

    def __add__(self, other: SpectralField) -> SpectralField:
        self._check_grid(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, real=self.real and other.real)

    def __sub__(self, other: SpectralField) -> SpectralField:
        self._check_grid(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, real=self.real and other.real)

    def __neg__(self) -> SpectralField:
        return SpectralField(self.grid, -self.coeffs, real=self.real)

    def __mul__(self, scalar: Scalar) -> SpectralField:
        real = self.real and complex(scalar).imag == 0
        return SpectralField(self.grid, self.coeffs * scalar, real=real)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class RealField:
    """
    A real field sampled at the points of a `Grid`.
    """

    grid: Grid
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.shape != (self.grid.num_modes,):
            raise KdvError(f"expected {self.grid.num_modes} samples, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise KdvError("samples must be finite")
        object.__setattr__(self, "samples", samples)


def _from_half(half: np.ndarray, num_modes: int) -> np.ndarray:
    """
    Expands a real-to-complex half spectrum into an exactly Hermitian coefficient
    vector in mode order.
    """
    mid = num_modes // 2
    full = np.empty(num_modes, dtype=np.complex128)
    full[mid:] = half[:mid]
    full[mid] = half[0].real
    full[0] = half[mid].real
    full[1:mid] = np.conj(half[mid - 1 : 0 : -1])
    return full


def _to_half(coeffs: np.ndarray) -> np.ndarray:
    mid = coeffs.shape[0] // 2
    half = np.empty(mid + 1, dtype=np.complex128)
    half[:mid] = coeffs[mid:]
    half[mid] = coeffs[0]
    return half


def _hermitian_projection(coeffs: np.ndarray) -> np.ndarray:
    mid = coeffs.shape[0] // 2
    projected = coeffs.copy()
    positive = 0.5 * (coeffs[mid + 1 :] + np.conj(coeffs[mid - 1 : 0 : -1]))
    projected[mid + 1 :] = positive
    projected[1:mid] = np.conj(positive[::-1])
    projected[mid] = coeffs[mid].real
    projected[0] = coeffs[0].real
    return projected


def forward_transform(f: RealField) -> SpectralField:
    """
    Transforms grid samples into Fourier coefficients.

    `xi_k = (1/K) sum_a f(x_a) exp(-i k 2 pi a / K)`.
    """
    num_modes = f.grid.num_modes
    half = scipy.fft.rfft(scipy.fft.ifftshift(f.samples)) / num_modes
    return SpectralField(f.grid, _from_half(half, num_modes), real=True)


def forward_transform_complex(grid: Grid, samples: np.ndarray) -> SpectralField:
    """
    Like `forward_transform`, but for complex samples (in grid-point order).
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.shape != (grid.num_modes,):
        raise KdvError(f"expected {grid.num_modes} samples, got shape {samples.shape}")
    coeffs = scipy.fft.fftshift(scipy.fft.fft(scipy.fft.ifftshift(samples))) / grid.num_modes
    return SpectralField(grid, coeffs, real=False)


def inverse_transform(xi: SpectralField) -> RealField:
    """
    Evaluates a field at the grid points.

    Raises:
        SymmetryError: If `xi` doesn't represent a real function
    """
    if not xi.is_hermitian():
        raise SymmetryError(
            f"field is not Hermitian (defect {xi.hermitian_defect():.3e}); "
            "use inverse_transform_complex for complex samples"
        )
    num_modes = xi.grid.num_modes
    samples = scipy.fft.irfft(_to_half(xi.coeffs), n=num_modes) * num_modes
    return RealField(xi.grid, scipy.fft.fftshift(samples))


def inverse_transform_complex(xi: SpectralField) -> np.ndarray:
    """
    Evaluates a (possibly complex) field at the grid points.
    """
    num_modes = xi.grid.num_modes
    samples = scipy.fft.ifft(scipy.fft.ifftshift(xi.coeffs)) * num_modes
    return scipy.fft.fftshift(samples)


@functools.lru_cache(maxsize=256)
def _phase_symbol(grid: Grid, t: float, alpha: float, nyquist: NyquistPolicy) -> np.ndarray:
    logger.debug(f"building propagator symbol: K={grid.num_modes} t={t} alpha={alpha}")
    kappa = _odd_wavenumbers(grid, nyquist)
    theta = t * (kappa**3 + alpha * kappa)
    symbol = np.empty(grid.num_modes, dtype=np.complex128)
    symbol.real = np.cos(theta)
    symbol.imag = -np.sin(theta)
    symbol.setflags(write=False)
    return symbol


@functools.lru_cache(maxsize=64)
def _derivative_symbol(grid: Grid, nyquist: NyquistPolicy) -> np.ndarray:
    symbol = np.zeros(grid.num_modes, dtype=np.complex128)
    symbol.imag = _odd_wavenumbers(grid, nyquist)
    symbol.setflags(write=False)
    return symbol


@functools.lru_cache(maxsize=64)
def _inverse_derivative_symbol(grid: Grid, nyquist: NyquistPolicy) -> np.ndarray:
    kappa = _odd_wavenumbers(grid, nyquist)
    nonzero = kappa != 0
    symbol = np.zeros(grid.num_modes, dtype=np.complex128)
    symbol.imag[nonzero] = -1.0 / kappa[nonzero]
    symbol.setflags(write=False)
    return symbol


def _apply_odd_symbol(
    xi: SpectralField, symbol: np.ndarray, nyquist: NyquistPolicy
) -> SpectralField:
    # An odd symbol keeps a real field real unless it acts on a live Nyquist mode.
    real = xi.real and (nyquist is NyquistPolicy.ZeroNyquist or xi.coeffs[0] == 0)
    return SpectralField(xi.grid, xi.coeffs * symbol, real=real)


def propagate_airy(
    xi: SpectralField, t: float, *, nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist
) -> SpectralField:
    """
    Applies the free (Airy) flow `exp(-t d^3/dx^3)`: `xi_k -> exp(i t kappa_k^3) xi_k`.
    """
    return _apply_odd_symbol(xi, _phase_symbol(xi.grid, -float(t), 0.0, nyquist), nyquist)


def propagate_shifted_airy(
    xi: SpectralField,
    t: float,
    alpha: float,
    *,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
) -> SpectralField:
    """
    Applies `exp(t (d^3/dx^3 - alpha d/dx))`:
    `xi_k -> exp(-i t (kappa_k^3 + alpha kappa_k)) xi_k`.

    With `alpha = 0` this is `propagate_airy(xi, -t)`.
    """
    return _apply_odd_symbol(xi, _phase_symbol(xi.grid, float(t), float(alpha), nyquist), nyquist)


def apply_derivative(
    xi: SpectralField, *, nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist
) -> SpectralField:
    """
    Applies `d/dx`: `xi_k -> i kappa_k xi_k`.
    """
    return _apply_odd_symbol(xi, _derivative_symbol(xi.grid, nyquist), nyquist)


def apply_inverse_derivative(
    xi: SpectralField, *, nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist
) -> SpectralField:
    """
    Applies the regularized antiderivative: `xi_k -> xi_k / (i kappa_k)`, with the
    zero mode mapped to zero.
    """
    return _apply_odd_symbol(xi, _inverse_derivative_symbol(xi.grid, nyquist), nyquist)


def pointwise_product(
    xi: SpectralField, eta: SpectralField, *, dealias: bool = False
) -> SpectralField:
    """
    Multiplies two fields pointwise on the grid.

    Without dealiasing this is the circular convolution of the coefficient
    vectors (pair sums wrap modulo `K`). With `dealias=True` the product is formed
    on a grid padded to `3K/2` points and truncated back, so every mode except
    Nyquist (which is zeroed) is alias-free.
    """
    xi._check_grid(eta)
    num_modes = xi.grid.num_modes

    if dealias:
        return _dealiased_product(xi, eta)

    if xi.real and eta.real:
        a = scipy.fft.irfft(_to_half(xi.coeffs), n=num_modes)
        b = a if eta is xi else scipy.fft.irfft(_to_half(eta.coeffs), n=num_modes)
        half = scipy.fft.rfft(a * b) * num_modes
        return SpectralField(xi.grid, _from_half(half, num_modes), real=True)

    a = scipy.fft.ifft(scipy.fft.ifftshift(xi.coeffs))
    b = a if eta is xi else scipy.fft.ifft(scipy.fft.ifftshift(eta.coeffs))
    coeffs = scipy.fft.fftshift(scipy.fft.fft(a * b)) * num_modes
    return SpectralField(xi.grid, coeffs, real=False)


def _dealiased_product(xi: SpectralField, eta: SpectralField) -> SpectralField:
    padded_modes = 3 * xi.grid.num_modes // 2
    positions = xi.grid.modes % padded_modes

    def padded_samples(field: SpectralField) -> np.ndarray:
        padded = np.zeros(padded_modes, dtype=np.complex128)
        padded[positions] = field.coeffs
        return scipy.fft.ifft(padded)

    a = padded_samples(xi)
    b = a if eta is xi else padded_samples(eta)
    coeffs = (scipy.fft.fft(a * b) * padded_modes)[positions]
    coeffs[0] = 0.0

    real = xi.real and eta.real
    if real:
        coeffs = _hermitian_projection(coeffs)
    return SpectralField(xi.grid, coeffs, real=real)


def pointwise_square(xi: SpectralField, *, dealias: bool = False) -> SpectralField:
    """
    Squares a field pointwise on the grid. See `pointwise_product`.
    """
    return pointwise_product(xi, xi, dealias=dealias)


def sobolev_norm(xi: SpectralField, r: float) -> float:
    """
    The discrete `H^r` norm `sqrt((2 pi / L) sum_k (1 + kappa_k^2)^r |xi_k|^2)`.

    For `r = 0` this agrees with the continuum `L^2` norm of band-limited functions.
    """
    if r < 0:
        raise KdvError(f"Sobolev index must be nonnegative, got {r}")
    weights = (1.0 + xi.grid.wavenumbers**2) ** r
    return math.sqrt(xi.grid.length * float(np.sum(weights * np.abs(xi.coeffs) ** 2)))


def split_mean(xi: SpectralField) -> Tuple[float, SpectralField]:
    """
    Splits a real field into its mean `alpha` and a zero-mean remainder.

    Raises:
        SymmetryError: If the zero mode has a non-negligible imaginary part
    """
    mean = xi.zero_mode
    if abs(mean.imag) > MEAN_TOLERANCE * xi.scale:
        raise SymmetryError(f"zero mode has an imaginary part: {mean}")
    return mean.real, xi.without_mean()


def add_mean(xi: SpectralField, alpha: float) -> SpectralField:
    """
    The inverse of `split_mean`: adds the constant `alpha` to `xi`.
    """
    coeffs = xi.coeffs.copy()
    coeffs[xi.grid.num_modes // 2] += alpha
    return SpectralField(xi.grid, coeffs, real=xi.real)


def random_real_field(
    grid: Grid,
    rng: np.random.Generator,
    *,
    band: Optional[int] = None,
    amplitude: float = 0.1,
    zero_mean: bool = True,
) -> SpectralField:
    """
    Draws a random real field supported on `|k| <= band`.

    Coefficients have independent uniformly distributed phases and magnitudes of
    at most `amplitude`. The Nyquist mode is left empty.
    """
    half = grid.num_modes // 2
    band = half - 1 if band is None else band
    if not 0 <= band < half:
        raise KdvError(f"band must lie in [0, {half}), got {band}")

    modes = {}
    for mode in range(0 if not zero_mean else 1, band + 1):
        magnitude = amplitude * rng.uniform(0.0, 1.0)
        if mode == 0:
            modes[mode] = complex(magnitude * rng.choice([-1.0, 1.0]))
        else:
            modes[mode] = magnitude * np.exp(2j * math.pi * rng.uniform(0.0, 1.0))
    return SpectralField.from_modes(grid, modes, real=True)


def same_grid(*items: GridProtocol) -> Grid:
    """
    Returns the grid shared by `items`.

    Raises:
        GridMismatchError: If the items don't all live on the same grid
    """
    grids = {item.grid for item in items}
    if len(grids) != 1:
        raise GridMismatchError(f"grid mismatch: {' vs. '.join(str(g) for g in grids)}")
    return grids.pop()
