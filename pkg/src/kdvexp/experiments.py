"""
Initial conditions, exact solutions, references and convergence studies.
"""

from __future__ import annotations

import logging
import math
import shlex
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator

from kdvexp.constants import DEFAULT_NORMS, MIN_FIT_RECORDS, REFERENCE_TAU_RATIO
from kdvexp.enums import (
    AlphaPolicy,
    InitialKind,
    Nonlinearity,
    NormKind,
    NyquistPolicy,
    ReferenceKind,
    Variant,
)
from kdvexp.evolution import Snapshot, StepperState, Trajectory, run_evolution
from kdvexp.exceptions import ConfigError, DivergenceError, FitError, KdvError
from kdvexp.scheme import SchemeConfig
from kdvexp.spectral import Grid, RealField, SpectralField, forward_transform, sobolev_norm
from kdvexp.util import assert_never, parse_real, thread_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InitialCondition:
    """
    Describes the initial data of a run.

    Instances should be created with `sech2sin`, `soliton`, `spectrum` or `parse`.
    """

    kind: InitialKind
    grid: Grid
    c: float = 1.0
    """
    The speed of a solitary wave.
    """

    a: float = 0.0
    """
    The initial position of a solitary wave.
    """

    coefficients: Tuple[Tuple[int, complex], ...] = ()
    """
    The nonnegative-mode coefficients of a custom spectrum.
    """

    def __post_init__(self) -> None:
        if self.kind is InitialKind.Soliton and not (math.isfinite(self.c) and self.c > 0):
            raise KdvError(f"soliton speed must be positive, got {self.c}")
        if self.kind is InitialKind.Sech2Sin and self.grid.torus_scale != 1.0:
            raise KdvError("sech2sin initial data is defined on the unit torus (torus_scale = 1)")
        if self.kind is InitialKind.CustomSpectrum:
            half = self.grid.num_modes // 2
            outside = [k for k, _ in self.coefficients if not 0 <= k < half]
            if outside:
                raise KdvError(f"spectrum modes must lie in [0, {half}), got {outside}")

    @classmethod
    def sech2sin(cls, grid: Grid) -> InitialCondition:
        return cls(InitialKind.Sech2Sin, grid)

    @classmethod
    def soliton(cls, grid: Grid, c: float = 1.0, a: float = 0.0) -> InitialCondition:
        return cls(InitialKind.Soliton, grid, c=c, a=a)

    @classmethod
    def spectrum(cls, grid: Grid, coefficients: Dict[int, complex]) -> InitialCondition:
        entries = tuple(sorted(coefficients.items()))
        return cls(InitialKind.CustomSpectrum, grid, coefficients=entries)

    @classmethod
    def parse(cls, spec: str, grid: Grid) -> InitialCondition:
        """
        Parses an initial-condition spec:

        * `sech2sin`
        * `soliton c=<c> a=<a>` (both optional, `a` may be a multiple of pi)
        * `spectrum <k>:<coeff> ...` (nonnegative modes, complex coefficients allowed)

        Raises:
            ConfigError: If the spec is malformed
        """
        try:
            kind_name, *args = shlex.split(spec)
        except ValueError as e:
            raise ConfigError(f"malformed initial condition {spec!r}: {e}")

        try:
            kind = InitialKind(kind_name.lower())
        except ValueError:
            raise ConfigError(
                f"unknown initial condition {kind_name!r} "
                f"(supported: {[k.value for k in InitialKind]})"
            )

        try:
            if kind is InitialKind.Sech2Sin:
                if args:
                    raise ConfigError(f"sech2sin takes no parameters, got {args}")
                return cls.sech2sin(grid)
            elif kind is InitialKind.Soliton:
                params = dict(arg.split("=", 1) for arg in args)
                unknown = set(params) - {"c", "a"}
                if unknown:
                    raise ConfigError(f"unknown soliton parameters: {sorted(unknown)}")
                c = parse_real(params.get("c", "1"))
                a = parse_real(params.get("a", "0"))
                return cls.soliton(grid, c=c, a=a)
            elif kind is InitialKind.CustomSpectrum:
                if not args:
                    raise ConfigError("spectrum needs at least one <k>:<coeff> entry")
                coefficients = {}
                for arg in args:
                    mode, value = arg.split(":", 1)
                    coefficients[int(mode)] = complex(value.replace("i", "j"))
                return cls.spectrum(grid, coefficients)
            else:
                assert_never(kind)  # pragma: no cover
        except ConfigError:
            raise
        except ValueError as e:
            # Malformed `key=value` or `k:coeff` pairs, and out-of-range values.
            raise ConfigError(f"malformed initial condition {spec!r}: {e}")

    @property
    def natural_nonlinearity(self) -> Nonlinearity:
        """
        The sign convention the initial data is usually evolved under.
        """
        if self.kind is InitialKind.Soliton:
            return Nonlinearity.Minus
        return Nonlinearity.Plus


def _soliton_samples(x: np.ndarray, t: float, grid: Grid, c: float, a: float) -> np.ndarray:
    # The traveling-wave argument is wrapped back onto [-pi/L, pi/L).
    half_length = grid.length / 2
    y = np.mod(x - c * t - a + half_length, grid.length) - half_length
    with np.errstate(over="ignore"):
        return 3 * c / np.cosh(0.5 * math.sqrt(c) * y) ** 2


def make_initial(ic: InitialCondition) -> SpectralField:
    """
    Samples the initial data on its grid and transforms it.
    """
    grid = ic.grid
    x = grid.points
    if ic.kind is InitialKind.Sech2Sin:
        samples = 2 * np.sin(x) / np.cosh(0.5 * x) ** 2
        return forward_transform(RealField(grid, samples))
    elif ic.kind is InitialKind.Soliton:
        return forward_transform(RealField(grid, _soliton_samples(x, 0.0, grid, ic.c, ic.a)))
    elif ic.kind is InitialKind.CustomSpectrum:
        return SpectralField.from_modes(grid, dict(ic.coefficients), real=True)
    else:
        assert_never(ic.kind)  # pragma: no cover


def exact_soliton(t: float, grid: Grid, c: float, a: float) -> SpectralField:
    """
    Returns the solitary wave `3c sech^2((sqrt(c)/2) (x - ct - a))` at time `t`.

    The wave solves `u_t + u_xxx + (1/2) (u^2)_x = 0`, i.e. the minus convention.
    """
    if not (math.isfinite(c) and c > 0):
        raise KdvError(f"soliton speed must be positive, got {c}")
    return forward_transform(RealField(grid, _soliton_samples(grid.points, t, grid, c, a)))


def exact_soliton_trajectory(trajectory: Trajectory, c: float, a: float) -> Trajectory:
    """
    Returns the exact solitary wave at the snapshot times of `trajectory`.
    """
    grid = trajectory.grid
    return Trajectory(
        grid=grid,
        metadata=trajectory.metadata.copy(),
        snapshots=[
            Snapshot(t=s.t, u=exact_soliton(s.t, grid, c, a), step_index=s.step_index)
            for s in trajectory.snapshots
        ],
    )


def make_reference(
    ic: InitialCondition,
    t_final: float,
    tau_ref: float,
    *,
    smallest_tau: Optional[float] = None,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
    nonlinearity: Optional[Nonlinearity] = None,
) -> SpectralField:
    """
    Computes a reference solution at `t_final` with the second-order scheme and a
    small step `tau_ref`.

    If `smallest_tau` is given, `tau_ref` must be at least
    `kdvexp.constants.REFERENCE_TAU_RATIO` times smaller.

    Raises:
        ConfigError: If `tau_ref` is too coarse for `smallest_tau`
    """
    if smallest_tau is not None and tau_ref * REFERENCE_TAU_RATIO > smallest_tau:
        raise ConfigError(
            f"reference step {tau_ref:g} is less than {REFERENCE_TAU_RATIO:g}x smaller "
            f"than the smallest study step {smallest_tau:g}"
        )

    config = SchemeConfig(
        variant=Variant.ExpInt2,
        tau=tau_ref,
        alpha_policy=AlphaPolicy.AutoShift,
        nyquist_policy=nyquist,
        dealias=dealias,
        nonlinearity=nonlinearity or ic.natural_nonlinearity,
    )
    trajectory = run_evolution(StepperState.initial(make_initial(ic)), config, t_final)
    return trajectory.final.u


class ReferenceSpec(BaseModel):
    """
    What a convergence study measures its errors against.
    """

    kind: ReferenceKind
    tau_ref: Optional[float] = None
    """
    The step of a fine reference; only meaningful for `ReferenceKind.FineTau`.
    """

    @root_validator(skip_on_failure=True)
    def _check_tau(cls, values: dict) -> dict:
        kind, tau_ref = values["kind"], values.get("tau_ref")
        if kind is ReferenceKind.FineTau:
            if tau_ref is None or not (math.isfinite(tau_ref) and tau_ref > 0):
                raise ValueError(f"a fine reference needs a positive step, got {tau_ref}")
        elif tau_ref is not None:
            raise ValueError("an exact reference takes no step")
        return values

    @classmethod
    def parse(cls, spec: str) -> ReferenceSpec:
        """
        Parses `exact` or `fine:<tau_ref>`.
        """
        name, _, tau = spec.strip().partition(":")
        try:
            kind = ReferenceKind(name)
        except ValueError:
            raise ConfigError(f"unknown reference {spec!r} (expected `exact` or `fine:<tau>`)")
        if kind is ReferenceKind.FineTau:
            if not tau:
                raise ConfigError(f"fine reference needs a step: {spec!r}")
            return cls(kind=kind, tau_ref=parse_real(tau))
        elif tau:
            raise ConfigError(f"exact reference takes no step: {spec!r}")
        return cls(kind=kind)

    def __str__(self) -> str:
        if self.kind is ReferenceKind.FineTau:
            return f"fine:{self.tau_ref:g}"
        return str(self.kind)


class ErrorRecord(BaseModel):
    """
    One row of a convergence study: the errors of one scheme at one step.
    """

    tau: float
    scheme: Variant
    errors: Dict[NormKind, float] = {}
    """
    The error at the final time, per norm. Empty for a diverged row.
    """

    diverged_at: Optional[int] = None
    """
    The step at which the evolution diverged, if it did.
    """

    @validator("tau")
    def _tau_positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"time step must be positive, got {value}")
        return value

    @validator("errors")
    def _errors_nonnegative(cls, value: Dict[NormKind, float]) -> Dict[NormKind, float]:
        if any(not error >= 0 for error in value.values()):
            raise ValueError(f"errors must be nonnegative, got {value}")
        return value

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None


class ConvergenceStudy(BaseModel):
    """
    The result of a convergence study.
    """

    reference: ReferenceSpec
    t_final: float
    norms: List[NormKind]
    records: List[ErrorRecord]
    """
    The rows, by decreasing step and then by scheme order.
    """

    fitted_slopes: Dict[Variant, Dict[NormKind, float]] = {}
    """
    The fitted convergence slope per scheme and norm, when enough rows converged.
    """

    def rows(self, scheme: Variant) -> List[ErrorRecord]:
        return [record for record in self.records if record.scheme is scheme]

    def slope(self, scheme: Variant, norm: NormKind) -> Optional[float]:
        return self.fitted_slopes.get(scheme, {}).get(norm)


def fit_slope(points: Sequence[Tuple[float, float]]) -> float:
    """
    Fits the slope of `log(error)` against `log(tau)` by least squares.

    Args:
        points: `(tau, error)` pairs

    Raises:
        FitError: If there are fewer than two points, a nonpositive value, or no
            spread in `tau`
    """
    if len(points) < 2:
        raise FitError(f"a slope needs at least two points, got {len(points)}")

    taus = np.array([tau for tau, _ in points], dtype=np.float64)
    errors = np.array([error for _, error in points], dtype=np.float64)
    if np.any(~np.isfinite(taus)) or np.any(taus <= 0):
        raise FitError(f"steps must be positive and finite, got {taus.tolist()}")
    if np.any(~np.isfinite(errors)) or np.any(errors <= 0):
        raise FitError(f"errors must be positive and finite, got {errors.tolist()}")
    if np.ptp(taus) == 0:
        raise FitError("all points share the same step")

    slope, _ = np.polyfit(np.log(taus), np.log(errors), 1)
    return float(slope)


def convergence_study(
    ic: InitialCondition,
    schemes: Sequence[Variant],
    taus: Sequence[float],
    t_final: float,
    reference: ReferenceSpec,
    norms: Sequence[NormKind] = DEFAULT_NORMS,
    *,
    alpha_policy: AlphaPolicy = AlphaPolicy.AutoShift,
    nyquist: NyquistPolicy = NyquistPolicy.ZeroNyquist,
    dealias: bool = False,
    nonlinearity: Optional[Nonlinearity] = None,
) -> ConvergenceStudy:
    """
    Measures the error at `t_final` of every scheme at every step, and fits the
    convergence slopes.

    Rows are computed in parallel on up to `KDVEXP_THREADS` threads. A diverged row
    is kept (with no errors) but excluded from the fit.
    """
    if not schemes:
        raise KdvError("a study needs at least one scheme")
    if not taus:
        raise KdvError("a study needs at least one time step")
    if not norms:
        raise KdvError("a study needs at least one norm")
    taus = sorted(set(taus), reverse=True)
    nonlinearity = nonlinearity or ic.natural_nonlinearity

    if reference.kind is ReferenceKind.ExactSoliton:
        if ic.kind is not InitialKind.Soliton:
            raise KdvError(f"an exact reference is only available for solitons, not {ic.kind}")
        if nonlinearity is not Nonlinearity.Minus:
            logger.warning("comparing against the exact soliton under the plus convention")
        target = exact_soliton(t_final, ic.grid, ic.c, ic.a)
    elif reference.kind is ReferenceKind.FineTau:
        assert reference.tau_ref is not None
        target = make_reference(
            ic,
            t_final,
            reference.tau_ref,
            smallest_tau=taus[-1],
            nyquist=nyquist,
            dealias=dealias,
            nonlinearity=nonlinearity,
        )
    else:
        assert_never(reference.kind)  # pragma: no cover

    initial = StepperState.initial(make_initial(ic))

    def run_cell(cell: Tuple[float, Variant]) -> ErrorRecord:
        tau, scheme = cell
        config = SchemeConfig(
            variant=scheme,
            tau=tau,
            alpha_policy=alpha_policy,
            nyquist_policy=nyquist,
            dealias=dealias,
            nonlinearity=nonlinearity,
        )
        try:
            final = run_evolution(initial, config, t_final).final.u
        except DivergenceError as e:
            logger.warning(f"{scheme} diverged at tau={tau:g}: {e}; excluding the row from fits")
            return ErrorRecord(tau=tau, scheme=scheme, diverged_at=e.step_index)

        difference = final - target
        errors = {norm: sobolev_norm(difference, norm.order) for norm in norms}
        summary = ", ".join(f"{n}={e:.3e}" for n, e in errors.items())
        logger.info(f"{scheme} tau={tau:g}: {summary}")
        return ErrorRecord(tau=tau, scheme=scheme, errors=errors)

    ordered = sorted(set(schemes), key=lambda s: s.order)
    cells = [(tau, scheme) for tau in taus for scheme in ordered]
    workers = min(thread_count(), len(cells))
    logger.debug(f"running {len(cells)} study cells on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(run_cell, cells))

    study = ConvergenceStudy(
        reference=reference, t_final=t_final, norms=list(norms), records=records
    )
    for scheme in ordered:
        rows = [row for row in study.rows(scheme) if not row.diverged]
        for norm in norms:
            points = [(row.tau, row.errors[norm]) for row in rows if row.errors[norm] > 0]
            if len(points) < MIN_FIT_RECORDS:
                logger.warning(
                    f"{scheme}: only {len(points)} usable rows for {norm}, not fitting a slope"
                )
                continue
            study.fitted_slopes.setdefault(scheme, {})[norm] = fit_slope(points)

    return study
