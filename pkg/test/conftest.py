import numpy as np
import pytest
import scipy.integrate

from kdvexp.spectral import Grid, SpectralField, pointwise_square, random_real_field

# The widest support whose squares can't wrap onto the Nyquist mode of a 32-mode grid.
BAND = 7


@pytest.fixture
def rng():
    return np.random.default_rng(1729)


@pytest.fixture
def grid():
    return Grid(32)


@pytest.fixture
def field(grid, rng):
    return random_real_field(grid, rng, band=BAND, amplitude=0.1)


@pytest.fixture
def fields(grid, rng):
    return [random_real_field(grid, rng, band=BAND, amplitude=0.1) for _ in range(5)]


@pytest.fixture
def semidiscrete_step():
    """
    Solves the grid equations `xi' = i kappa^3 xi + (1/2) i kappa (xi * xi)` over one
    step with a tight explicit Runge-Kutta method, for comparison with the steppers.
    """

    def step(u, tau, *, dealias=False):
        grid = u.grid
        kappa = grid.odd_wavenumbers()

        def rhs(t, coeffs):
            square = pointwise_square(SpectralField(grid, coeffs), dealias=dealias)
            return 1j * kappa**3 * coeffs + 0.5j * kappa * square.coeffs

        solution = scipy.integrate.solve_ivp(
            rhs, (0.0, tau), u.coeffs, method="DOP853", rtol=1e-13, atol=1e-15
        )
        assert solution.success, solution.message
        return SpectralField(grid, solution.y[:, -1])

    return step


@pytest.fixture(autouse=True)
def kdvexp_env(monkeypatch):
    # Studies run in a predictable number of threads.
    monkeypatch.setenv("KDVEXP_THREADS", "2")
