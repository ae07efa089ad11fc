"""
Time evolution: repeated application of a scheme, with snapshots.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from kdvexp.constants import MEAN_TOLERANCE, STEP_EPSILON
from kdvexp.enums import AlphaPolicy, Nonlinearity, NyquistPolicy, Variant
from kdvexp.exceptions import DivergenceError, KdvError, MeanViolationError
from kdvexp.scheme import SchemeConfig
from kdvexp.spectral import Grid, SpectralField, add_mean, split_mean
from kdvexp.util import load_scheme

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepperState:
    """
    The state of an evolution between two steps.
    """

    u: SpectralField
    """
    The untwisted numerical solution, mean included.
    """

    t: float = 0.0
    """
    The current time, accumulated step by step.
    """

    alpha: float = 0.0
    """
    The conserved mean of `u`.
    """

    step_index: int = 0

    @classmethod
    def initial(cls, u: SpectralField, t: float = 0.0) -> StepperState:
        """
        Creates the state of an evolution starting from `u` at time `t`.
        """
        return cls(u=u, t=t, alpha=u.zero_mode.real, step_index=0)


@dataclass(frozen=True)
class Snapshot:
    t: float
    u: SpectralField
    step_index: int


class TrajectoryMetadata(BaseModel):
    """
    Describes how a `Trajectory` was computed.
    """

    variant: Variant
    tau: float
    num_modes: int
    torus_scale: float
    nyquist_policy: NyquistPolicy
    nonlinearity: Nonlinearity
    dealias: bool

    alpha: float
    """
    The mean split off the initial data (zero unless `auto_shift` found one).
    """

    steps: int = 0
    """
    The number of steps taken, including a partial final step.
    """

    partial_final_step: bool = False
    """
    Whether the last step was shorter than `tau`, to land exactly on the final time.
    """

    final_step: Optional[float] = None
    """
    The size of the last step taken, if any.
    """


@dataclass
class Trajectory:
    """
    A sequence of snapshots of one evolution.
    """

    grid: Grid
    metadata: TrajectoryMetadata
    snapshots: List[Snapshot] = field(default_factory=list)

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]

    @property
    def times(self) -> List[float]:
        return [snapshot.t for snapshot in self.snapshots]


def _check_request(state: StepperState, t_final: float, snapshot_times: Sequence[float]) -> None:
    if not math.isfinite(t_final) or t_final < state.t:
        raise KdvError(f"final time {t_final} precedes the initial time {state.t}")
    if any(b < a for a, b in zip(snapshot_times, snapshot_times[1:])):
        raise KdvError(f"snapshot times must be sorted, got {list(snapshot_times)}")
    if snapshot_times and (snapshot_times[0] < state.t or snapshot_times[-1] > t_final):
        raise KdvError(
            f"snapshot times must lie within [{state.t}, {t_final}], got {list(snapshot_times)}"
        )


def run_evolution(
    state: StepperState,
    config: SchemeConfig,
    t_final: float,
    snapshot_times: Sequence[float] = (),
) -> Trajectory:
    """
    Evolves `state` up to `t_final` with the scheme configured by `config`.

    Snapshots are recorded at the first step time at or after each requested time;
    with no requested times, only the final state is recorded. When `t_final` isn't
    a whole number of steps away, the last step is shortened to land on it exactly.

    Raises:
        MeanViolationError: If the data has a nonzero mean under `require_zero_mean`
        DivergenceError: If a step produces non-finite coefficients
    """
    _check_request(state, t_final, snapshot_times)
    requested = list(snapshot_times) if snapshot_times else [t_final]

    grid = state.u.grid
    tau = config.tau
    scheme = load_scheme(config.variant.name, config)

    # The minus convention is the plus convention for -u.
    sign = config.nonlinearity.sign
    u = state.u if sign > 0 else -state.u

    if config.alpha_policy is AlphaPolicy.AutoShift:
        alpha, u = split_mean(u)
    elif abs(u.zero_mode) > MEAN_TOLERANCE * u.scale:
        raise MeanViolationError(
            f"initial data has mean {u.zero_mode.real:g}; use the auto_shift policy to evolve it"
        )
    else:
        alpha, u = 0.0, u.without_mean()

    metadata = TrajectoryMetadata(
        variant=config.variant,
        tau=tau,
        num_modes=grid.num_modes,
        torus_scale=grid.torus_scale,
        nyquist_policy=config.nyquist_policy,
        nonlinearity=config.nonlinearity,
        dealias=config.dealias,
        alpha=sign * alpha,
    )
    trajectory = Trajectory(grid=grid, metadata=metadata)

    def record(t: float, step_index: int) -> None:
        while requested and requested[0] <= t + STEP_EPSILON * tau:
            requested.pop(0)
            snapshot = add_mean(u, alpha)
            if sign < 0:
                snapshot = -snapshot
            trajectory.snapshots.append(Snapshot(t=t, u=snapshot, step_index=step_index))

    t, n = state.t, state.step_index
    record(t, n)

    logger.debug(
        f"evolving with {config.variant}: tau={tau} from t={t} to t={t_final} "
        f"(~{math.ceil((t_final - t) / tau - STEP_EPSILON)} steps)"
    )

    while t_final - t > STEP_EPSILON * tau:
        step = tau
        if t_final - t - tau <= STEP_EPSILON * tau:
            step = t_final - t
        if step < tau * (1 - STEP_EPSILON):
            metadata.partial_final_step = True

        u = scheme._step(u, step, alpha=alpha)
        n += 1
        if not np.all(np.isfinite(u.coeffs)):
            raise DivergenceError(
                f"{config.variant} produced non-finite coefficients", step_index=n
            )

        t = t_final if step != tau else t + tau
        metadata.steps += 1
        metadata.final_step = step
        record(t, n)

    # Anything left was requested at the final time.
    record(t_final, n)
    return trajectory
