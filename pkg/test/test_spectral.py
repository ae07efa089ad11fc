import math

import numpy as np
import pytest
from hypothesis import given, seed
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kdvexp import spectral
from kdvexp.enums import NyquistPolicy
from kdvexp.exceptions import GridMismatchError, KdvError, SymmetryError
from kdvexp.spectral import Grid, RealField, SpectralField


@pytest.mark.parametrize(
    ("num_modes", "torus_scale"), [(7, 1.0), (2, 1.0), (0, 1.0), (8, 0.0), (8, -1.0), (8, math.inf)]
)
def test_grid_invalid(num_modes, torus_scale):
    with pytest.raises(KdvError):
        Grid(num_modes, torus_scale)


def test_grid_layout():
    grid = Grid(8, 0.5)

    assert grid.modes.tolist() == [-4, -3, -2, -1, 0, 1, 2, 3]
    assert grid.wavenumbers.tolist() == [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]
    assert grid.length == pytest.approx(4 * math.pi)
    assert grid.points[grid.index(0)] == 0.0
    assert grid.points[0] == pytest.approx(-2 * math.pi)

    with pytest.raises(KdvError):
        grid.index(4)


def test_grid_odd_wavenumbers():
    grid = Grid(8)

    assert grid.odd_wavenumbers(NyquistPolicy.ZeroNyquist)[0] == 0.0
    assert grid.odd_wavenumbers(NyquistPolicy.PaperExact)[0] == -4.0
    assert np.array_equal(grid.odd_wavenumbers()[1:], grid.wavenumbers[1:])


def test_grid_arrays_readonly():
    grid = Grid(8)

    with pytest.raises(ValueError):
        grid.modes[0] = 1


def test_field_shape_checked():
    with pytest.raises(KdvError):
        SpectralField(Grid(8), np.zeros(6))


def test_from_modes_real():
    grid = Grid(8)
    xi = SpectralField.from_modes(grid, {0: 2.0, 1: 1 + 2j}, real=True)

    assert xi.real
    assert xi.coefficient(1) == 1 + 2j
    assert xi.coefficient(-1) == 1 - 2j
    assert xi.zero_mode == 2.0
    assert xi.hermitian_defect() == 0.0

    with pytest.raises(KdvError):
        SpectralField.from_modes(grid, {-1: 1.0}, real=True)


def test_forward_transform_constant():
    grid = Grid(16)
    xi = spectral.forward_transform(RealField(grid, np.ones(16)))

    assert xi.real
    assert xi.zero_mode == pytest.approx(1.0, abs=1e-15)
    assert np.max(np.abs(xi.without_mean().coeffs)) < 1e-15


def test_forward_transform_cosine():
    grid = Grid(8)
    xi = spectral.forward_transform(RealField(grid, np.cos(grid.points)))

    assert xi.coefficient(1) == pytest.approx(0.5, abs=1e-15)
    assert xi.coefficient(-1) == pytest.approx(0.5, abs=1e-15)
    rest = [xi.coefficient(k) for k in grid.modes if abs(k) != 1]
    assert max(abs(c) for c in rest) < 1e-15


def test_inverse_transform_examples():
    grid = Grid(8)

    one = spectral.inverse_transform(SpectralField.from_modes(grid, {0: 1.0}, real=True))
    assert np.allclose(one.samples, 1.0, atol=1e-15)

    cosine = SpectralField.from_modes(grid, {1: 0.5}, real=True)
    assert np.allclose(spectral.inverse_transform(cosine).samples, np.cos(grid.points), atol=1e-15)


def test_inverse_transform_rejects_broken_pair():
    broken = SpectralField.from_modes(Grid(8), {1: 1.0})

    with pytest.raises(SymmetryError):
        spectral.inverse_transform(broken)

    # The complex evaluation still works.
    samples = spectral.inverse_transform_complex(broken)
    assert np.allclose(samples, np.exp(1j * broken.grid.points), atol=1e-14)


@seed(1)
@given(samples=arrays(np.float64, (64,), elements=st.floats(min_value=-10.0, max_value=10.0)))
def test_transform_round_trip(samples):
    grid = Grid(64)
    xi = spectral.forward_transform(RealField(grid, samples))

    assert xi.hermitian_defect() == 0.0
    assert np.allclose(spectral.inverse_transform(xi).samples, samples, rtol=0.0, atol=1e-12)


@seed(2)
@given(samples=arrays(np.float64, (32,), elements=st.floats(min_value=-10.0, max_value=10.0)))
def test_parseval(samples):
    grid = Grid(32)
    xi = spectral.forward_transform(RealField(grid, samples))

    continuum = grid.length / grid.num_modes * float(np.sum(samples**2))
    assert spectral.sobolev_norm(xi, 0.0) ** 2 == pytest.approx(continuum, rel=1e-12, abs=1e-12)


def test_complex_transform_round_trip(rng):
    grid = Grid(16)
    samples = rng.normal(size=16) + 1j * rng.normal(size=16)

    xi = spectral.forward_transform_complex(grid, samples)
    assert not xi.real
    assert np.allclose(spectral.inverse_transform_complex(xi), samples, atol=1e-13)


def test_propagate_airy_identity(field):
    assert np.array_equal(spectral.propagate_airy(field, 0.0).coeffs, field.coeffs)
    assert np.array_equal(spectral.propagate_shifted_airy(field, 0.0, 3.0).coeffs, field.coeffs)


def test_propagate_shifted_airy_unshifted(field):
    for t in (0.37, -2.0, 5.0):
        shifted = spectral.propagate_shifted_airy(field, t, 0.0)
        assert np.array_equal(shifted.coeffs, spectral.propagate_airy(field, -t).coeffs)


def test_propagate_shifted_airy_single_mode():
    xi = SpectralField.from_modes(Grid(8), {1: 1.0})
    moved = spectral.propagate_shifted_airy(xi, 1.0, 2.0)

    assert moved.coefficient(1) == pytest.approx(np.exp(-3j), abs=1e-15)


def test_propagate_airy_single_mode():
    xi = SpectralField.from_modes(Grid(8, 0.5), {2: 1.0})
    moved = spectral.propagate_airy(xi, 0.25)

    assert moved.coefficient(2) == pytest.approx(np.exp(0.25j), abs=1e-15)


@seed(3)
@given(
    draw=st.integers(min_value=0, max_value=2**32 - 1),
    t=st.floats(min_value=-10.0, max_value=10.0),
)
def test_propagate_airy_isometry(draw, t):
    xi = spectral.random_real_field(Grid(64), np.random.default_rng(draw), amplitude=1.0)
    moved = spectral.propagate_airy(xi, t)

    assert moved.real
    assert moved.hermitian_defect() == 0.0
    for r in (0.0, 1.0, 2.0):
        before = spectral.sobolev_norm(xi, r)
        assert spectral.sobolev_norm(moved, r) == pytest.approx(before, rel=1e-13)


def test_apply_derivative_examples():
    grid = Grid(16)

    constant = SpectralField.from_modes(grid, {0: 4.0}, real=True)
    assert not np.any(spectral.apply_derivative(constant).coeffs)

    mode = SpectralField.from_modes(grid, {3: 1.0})
    assert spectral.apply_derivative(mode).coefficient(3) == 3j


def test_apply_derivative_nyquist_policies():
    grid = Grid(16)
    xi = SpectralField.from_modes(grid, {1: 0.3, -8: 0.2}, real=True)

    zeroed = spectral.apply_derivative(xi)
    assert zeroed.real
    assert zeroed.coefficient(-8) == 0.0
    assert zeroed.is_hermitian()

    exact = spectral.apply_derivative(xi, nyquist=NyquistPolicy.PaperExact)
    assert not exact.real
    assert exact.coefficient(-8) == pytest.approx(-1.6j)
    assert not exact.is_hermitian()


def test_apply_inverse_derivative_examples():
    grid = Grid(16)

    constant = SpectralField.from_modes(grid, {0: 4.0}, real=True)
    assert not np.any(spectral.apply_inverse_derivative(constant).coeffs)

    mode = SpectralField.from_modes(grid, {2: 1.0})
    assert spectral.apply_inverse_derivative(mode).coefficient(2) == pytest.approx(1 / 2j)


def test_inverse_derivative_inverts_derivative(field):
    back = spectral.apply_derivative(spectral.apply_inverse_derivative(field))

    assert np.allclose(back.coeffs, field.coeffs, atol=1e-16)


def test_pointwise_square_examples():
    grid = Grid(16)

    one = SpectralField.from_modes(grid, {0: 1.0}, real=True)
    square = spectral.pointwise_square(one)
    assert square.zero_mode == pytest.approx(1.0, abs=1e-15)
    assert np.max(np.abs(square.without_mean().coeffs)) < 1e-15

    wave = SpectralField.from_modes(grid, {1: 1.0})
    square = spectral.pointwise_square(wave)
    assert not square.real
    assert square.coefficient(2) == pytest.approx(1.0, abs=1e-15)
    assert np.sum(np.abs(square.coeffs) > 1e-15) == 1


def test_pointwise_square_keeps_real_fields_exactly_real(field):
    square = spectral.pointwise_square(field)

    assert square.real
    assert square.hermitian_defect() == 0.0


def test_pointwise_product_matches_samples(rng):
    grid = Grid(16)
    a = spectral.random_real_field(grid, rng, amplitude=1.0)
    b = spectral.random_real_field(grid, rng, amplitude=1.0)

    product = spectral.pointwise_product(a, b)
    expected = spectral.inverse_transform(a).samples * spectral.inverse_transform(b).samples
    assert np.allclose(spectral.inverse_transform(product).samples, expected, atol=1e-13)


def test_pointwise_square_dealias():
    grid = Grid(16)
    wave = SpectralField.from_modes(grid, {5: 1.0})

    # 5 + 5 = 10 wraps onto -6 on the grid...
    aliased = spectral.pointwise_square(wave)
    assert aliased.coefficient(-6) == pytest.approx(1.0, abs=1e-15)

    # ...and is dropped with padding.
    dealiased = spectral.pointwise_square(wave, dealias=True)
    assert np.max(np.abs(dealiased.coeffs)) < 1e-15


def test_pointwise_square_dealias_agrees_in_band(field):
    plain = spectral.pointwise_square(field)
    padded = spectral.pointwise_square(field, dealias=True)

    assert padded.real
    assert padded.hermitian_defect() == 0.0
    assert np.allclose(padded.coeffs, plain.coeffs, atol=1e-15)


def test_pointwise_product_grid_mismatch():
    a = SpectralField.zeros(Grid(8))
    b = SpectralField.zeros(Grid(16))

    with pytest.raises(GridMismatchError):
        spectral.pointwise_product(a, b)
    with pytest.raises(GridMismatchError):
        _ = a + b


def test_sobolev_norm_examples():
    grid = Grid(8)

    one = SpectralField.from_modes(grid, {0: 1.0}, real=True)
    for r in (0.0, 1.0, 2.5):
        assert spectral.sobolev_norm(one, r) == pytest.approx(math.sqrt(2 * math.pi))

    wave = SpectralField.from_modes(grid, {1: 1.0})
    assert spectral.sobolev_norm(wave, 1.0) == pytest.approx(2 * math.sqrt(math.pi))

    assert spectral.sobolev_norm(SpectralField.zeros(grid), 2.0) == 0.0

    with pytest.raises(KdvError):
        spectral.sobolev_norm(one, -1.0)


def test_split_mean():
    grid = Grid(16)
    xi = spectral.forward_transform(RealField(grid, 3 + np.sin(grid.points)))

    alpha, rest = spectral.split_mean(xi)
    assert alpha == pytest.approx(3.0, abs=1e-15)
    assert rest.zero_mode == 0.0
    assert rest.coefficient(1) == pytest.approx(-0.5j, abs=1e-15)
    assert np.array_equal(spectral.add_mean(rest, alpha).coeffs, xi.coeffs)


def test_split_mean_zero_mean(field):
    alpha, rest = spectral.split_mean(field)

    assert alpha == 0.0
    assert np.array_equal(rest.coeffs, field.coeffs)


def test_split_mean_rejects_imaginary_mean():
    xi = SpectralField.from_modes(Grid(8), {0: 1j})

    with pytest.raises(SymmetryError):
        spectral.split_mean(xi)


def test_random_real_field(rng):
    grid = Grid(16)
    xi = spectral.random_real_field(grid, rng, band=3, amplitude=0.5, zero_mean=False)

    assert xi.real
    assert xi.hermitian_defect() == 0.0
    assert all(xi.coefficient(k) == 0 for k in grid.modes if abs(k) > 3)
    assert np.max(np.abs(xi.coeffs)) <= 0.5

    with pytest.raises(KdvError):
        spectral.random_real_field(grid, rng, band=8)


def test_field_arithmetic(field):
    doubled = field + field
    assert np.array_equal(doubled.coeffs, 2 * field.coeffs)
    assert doubled.real

    assert not np.any((field - field).coeffs)
    assert np.array_equal((-field).coeffs, -field.coeffs)
    assert (field * 0.5).real
    assert not (field * 1j).real
    assert np.array_equal((2 * field).coeffs, (field * 2).coeffs)
