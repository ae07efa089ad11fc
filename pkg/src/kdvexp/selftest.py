"""
Self-test suites, run by `kdvexp selftest`.

Each suite checks one property of the steppers against an independent computation
and reports the worst deviation it saw.
"""

import logging
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from kdvexp.enums import NormKind
from kdvexp.exceptions import OracleMismatch
from kdvexp.oracle import (
    compare_fields,
    oracle_first_order_step,
    oracle_quadrature_step,
    oracle_second_order_step,
)
from kdvexp.protocols import StepProtocol
from kdvexp.schemes.expint1 import step_expint1, step_expint1_twisted
from kdvexp.schemes.expint2 import step_expint2, step_expint2_twisted
from kdvexp.spectral import (
    Grid,
    SpectralField,
    propagate_airy,
    random_real_field,
    sobolev_norm,
)

logger = logging.getLogger(__name__)

ORACLE_GRID = Grid(32)
ORACLE_BAND = 7
ORACLE_TAUS = (1e-2, 1e-3)
ORACLE_TWIST_TIMES = (0.0, 0.37)
TWIST_TIMES = (0.0, 0.37, 5.0)


class SuiteResult(BaseModel):
    """
    The outcome of one self-test suite.
    """

    name: str
    passed: bool
    worst: float
    """
    The largest deviation seen.
    """

    tolerance: float
    cases: int


def _result(name: str, deviations: Iterable[float], tolerance: float) -> SuiteResult:
    deviations = list(deviations)
    worst = max(deviations, default=0.0)
    return SuiteResult(
        name=name,
        passed=worst <= tolerance,
        worst=worst,
        tolerance=tolerance,
        cases=len(deviations),
    )


def _max_diff(a: SpectralField, b: SpectralField) -> float:
    return compare_fields(a, b).max_abs_coeff_diff


def _fields(rng: np.random.Generator, samples: int) -> List[SpectralField]:
    return [
        random_real_field(ORACLE_GRID, rng, band=ORACLE_BAND, amplitude=0.1)
        for _ in range(samples)
    ]


def key_identity(rng: np.random.Generator, samples: int) -> SuiteResult:
    """
    `k1^3 + k2^3 - (k1 + k2)^3 = -3 (k1 + k2) k1 k2`, exactly, for `|k1|, |k2| <= 1000`.
    """
    k2 = np.arange(-1000, 1001, dtype=np.int64)
    mismatches = 0
    for k1 in range(-1000, 1001):
        lhs = k1**3 + k2**3 - (k1 + k2) ** 3
        rhs = -3 * (k1 + k2) * k1 * k2
        mismatches += int(np.count_nonzero(lhs != rhs))
    return SuiteResult(
        name="key-identity", passed=mismatches == 0, worst=mismatches, tolerance=0, cases=2001**2
    )


def oracle_order1(rng: np.random.Generator, samples: int) -> SuiteResult:
    """
    The first-order stepper (twisted, and untwisted via twisting) against the
    closed-form and quadrature oracles.
    """
    deviations = []
    for v in _fields(rng, samples):
        for tau in ORACLE_TAUS:
            for t_n in ORACLE_TWIST_TIMES:
                closed = oracle_first_order_step(v, t_n, tau)
                quadrature = oracle_quadrature_step(v, t_n, tau, tol=1e-11)
                twisted = step_expint1_twisted(v, t_n, tau)
                untwisted = propagate_airy(
                    step_expint1(propagate_airy(v, t_n), tau), -(t_n + tau)
                )
                deviations += [
                    _max_diff(twisted, closed),
                    _max_diff(untwisted, closed),
                    _max_diff(quadrature, closed),
                ]
    return _result("oracle-order-1", deviations, 1e-10)


def oracle_order2(rng: np.random.Generator, samples: int) -> SuiteResult:
    """
    The second-order stepper against the closed-form oracle.
    """
    deviations = []
    for v in _fields(rng, samples):
        for tau in ORACLE_TAUS:
            for t_n in ORACLE_TWIST_TIMES:
                closed = oracle_second_order_step(v, tau, t_n=t_n)
                twisted = propagate_airy(step_expint2_twisted(v, t_n, tau), t_n + tau)
                untwisted = step_expint2(propagate_airy(v, t_n), tau)
                deviations += [_max_diff(twisted, closed), _max_diff(untwisted, closed)]
    return _result("oracle-order-2", deviations, 1e-10)


def zero_mode(rng: np.random.Generator, samples: int) -> SuiteResult:
    """
    The zero mode stays (numerically) zero over many steps of either scheme.
    """
    deviations = []
    u0 = random_real_field(ORACLE_GRID, rng, band=ORACLE_BAND, amplitude=0.1)
    steppers: Tuple[StepProtocol, ...] = (step_expint1, step_expint2)
    for step in steppers:
        u = u0
        for _ in range(1000):
            u = step(u, 1e-3)
            deviations.append(abs(u.zero_mode))
    return _result("zero-mode", deviations, 1e-12)


def isometry(rng: np.random.Generator, samples: int) -> SuiteResult:
    """
    The Airy flow preserves the discrete `L^2`, `H^1` and `H^2` norms.
    """
    grid = Grid(64)
    deviations = []
    for _ in range(max(samples, 100)):
        xi = random_real_field(grid, rng, amplitude=1.0)
        t = rng.uniform(-10.0, 10.0)
        moved = propagate_airy(xi, t)
        for norm in NormKind:
            before = sobolev_norm(xi, norm.order)
            deviations.append(abs(sobolev_norm(moved, norm.order) - before) / before)
    return _result("isometry", deviations, 1e-13)


def twist_equivalence(rng: np.random.Generator, samples: int) -> SuiteResult:
    """
    Untwisted steps don't depend on the time the twisted step is taken from.
    """
    tau = 1e-2
    deviations = []
    for u in _fields(rng, max(1, samples // 5)):
        for twisted_step in (step_expint1_twisted, step_expint2_twisted):
            results = [
                propagate_airy(twisted_step(propagate_airy(u, -t_n), t_n, tau), t_n + tau)
                for t_n in TWIST_TIMES
            ]
            deviations += [_max_diff(results[0], other) for other in results[1:]]
    return _result("twist-equivalence", deviations, 1e-12)


SUITES: Dict[str, Callable[[np.random.Generator, int], SuiteResult]] = {
    "key-identity": key_identity,
    "oracle-order-1": oracle_order1,
    "oracle-order-2": oracle_order2,
    "zero-mode": zero_mode,
    "isometry": isometry,
    "twist-equivalence": twist_equivalence,
}
"""
Every suite, by name.
"""


def run_selftests(
    seed: int = 0, *, samples: int = 50, suites: Optional[Iterable[str]] = None
) -> List[SuiteResult]:
    """
    Runs the named suites (all of them by default) with a generator seeded by `seed`.

    Raises:
        KeyError: If a suite name is unknown
    """
    names = list(SUITES) if suites is None else list(suites)
    results = []
    for name in names:
        suite = SUITES[name]
        # Every suite gets its own stream, so selecting suites doesn't change the draws.
        rng = np.random.default_rng([seed, list(SUITES).index(name)])
        result = suite(rng, samples)
        logger.info(f"{name}: {'ok' if result.passed else 'FAILED'} (worst {result.worst:.3e})")
        results.append(result)
    return results


def check(results: Iterable[SuiteResult]) -> None:
    """
    Raises:
        OracleMismatch: If any suite failed
    """
    failed = [result.name for result in results if not result.passed]
    if failed:
        raise OracleMismatch(f"self-test suites failed: {', '.join(failed)}")
