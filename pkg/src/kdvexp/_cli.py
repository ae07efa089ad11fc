import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click

import kdvexp
from kdvexp.config import COMMAND_LINE, RunConfig, build_run_config, load_config, read_seed
from kdvexp.enums import InitialKind, ReferenceKind
from kdvexp.evolution import StepperState, run_evolution
from kdvexp.exceptions import ConfigError, KdvError, NumericalError
from kdvexp.experiments import (
    ReferenceSpec,
    convergence_study,
    exact_soliton_trajectory,
    make_initial,
)
from kdvexp.output import emit_plot_script, write_errors_csv, write_trajectory_csv
from kdvexp.selftest import SUITES, check, run_selftests
from kdvexp.util import die

logging.basicConfig(level=os.environ.get("KDVEXP_LOGLEVEL", "INFO").upper())
logger = logging.getLogger(__name__)

# Every run option, as (flags, config key, help). Values are passed through as
# text and validated by `RunConfig`, exactly like config file values.
# fmt: off
RUN_OPTIONS: List[Tuple[Tuple[str, ...], str, str]] = [
    (("--k", "--k-modes"), "k_modes", "The number of Fourier modes K (even, at least 4)"),
    (("--torus-scale",), "torus_scale", "The torus scale L; the domain is [-pi/L, pi/L]"),
    (("--scheme",), "scheme", "expint1, expint2 or both"),
    (("--tau",), "tau", "The time step of a simulation"),
    (("--tau-list",), "tau_list", "The steps of a study: dyadic:2^-A..2^-B:xF or a comma list"),
    (("--t-final",), "t_final", "The final time"),
    (("--ic",), "ic", "The initial condition: sech2sin, soliton c=.. a=.., spectrum k:coeff .."),
    (("--alpha-policy",), "alpha_policy", "require_zero_mean or auto_shift"),
    (("--nyquist",), "nyquist", "zero or paper_exact"),
    (("--nonlinearity",), "nonlinearity", "plus or minus"),
    (("--snapshots",), "snapshots", "The number of evenly spaced snapshots"),
    (("--snapshot-times",), "snapshot_times", "Explicit snapshot times (comma list)"),
    (("--out",), "out", "The output CSV"),
    (("--reference",), "reference", "exact or fine:<tau_ref>"),
    (("--seed",), "seed", "The seed for randomized data"),
]
# fmt: on

RUN_FLAGS: List[Tuple[str, str, str]] = [
    ("dealias", "dealias", "Form quadratic terms with 3/2 zero padding"),
    ("plot", "plot", "Emit a gnuplot script next to the CSV"),
    ("exact-overlay", "exact_overlay", "Also write the exact soliton at the snapshot times"),
]


def _run_options(command: Callable[..., Any]) -> Callable[..., Any]:
    for flags, key, help_ in reversed(RUN_OPTIONS):
        command = click.option(*flags, key, metavar="VALUE", default=None, help=help_)(command)
    for name, key, help_ in reversed(RUN_FLAGS):
        command = click.option(f"--{name}/--no-{name}", key, default=None, help=help_)(command)
    command = click.option(
        "--norm", "norms", multiple=True, metavar="NORM", help="An error norm: l2, h1 or h2"
    )(command)
    # `--ic soliton c=1 a=0` without quotes: the trailing words belong to `--ic`.
    command = click.argument("ic_args", nargs=-1, metavar="[IC_PARAMS]...")(command)
    command = click.option(
        "--config",
        "config_path",
        metavar="PATH",
        help="A key = value configuration file; flags override its values",
        type=click.Path(dir_okay=False, exists=True, path_type=Path),
    )(command)
    return command


def _run_config(config_path: Optional[Path], params: Dict[str, Any]) -> RunConfig:
    norms = params.pop("norms")
    ic_args = params.pop("ic_args")
    if ic_args:
        if params["ic"] is None:
            raise ConfigError(f"unexpected arguments: {' '.join(ic_args)}", line=COMMAND_LINE)
        params["ic"] = " ".join([params["ic"], *ic_args])

    overrides = {key: str(value) for key, value in params.items() if value is not None}
    if norms:
        overrides["norms"] = ",".join(norms)

    if config_path is not None:
        return load_config(config_path, overrides)
    return build_run_config({}, overrides)


@click.group()
@click.version_option(kdvexp.__version__, prog_name="kdvexp")
def cli() -> None:
    """
    Exponential-type integrators for the Korteweg-de Vries equation.
    """


@cli.command()
@_run_options
def simulate(config_path: Optional[Path], **params: Any) -> None:
    """
    Runs one evolution and writes its snapshots.
    """
    config = _run_config(config_path, params)
    if config.tau is None:
        raise ConfigError("simulate needs a time step (tau)", line=COMMAND_LINE)

    ic = config.initial_condition()
    if config.exact_overlay and ic.kind is not InitialKind.Soliton:
        raise ConfigError("exact_overlay needs a soliton initial condition")

    out = config.out or Path("trajectory.csv")
    initial = StepperState.initial(make_initial(ic))
    variants = config.variants
    for variant in variants:
        logger.debug(f"simulating {variant} with tau={config.tau:g} up to t={config.t_final:g}")
        trajectory = run_evolution(
            initial,
            config.scheme_config(variant, config.tau),
            config.t_final,
            config.snapshot_schedule(),
        )
        path = out if len(variants) == 1 else out.with_suffix(f".{variant}.csv")
        write_trajectory_csv(trajectory, path)
        if config.plot:
            emit_plot_script(trajectory, path, path.with_suffix(".gp"))

    if config.exact_overlay:
        exact = exact_soliton_trajectory(trajectory, ic.c, ic.a)
        exact_path = out.with_suffix(".exact.csv")
        write_trajectory_csv(exact, exact_path)
        if config.plot:
            emit_plot_script(exact, exact_path, exact_path.with_suffix(".gp"))


@cli.command()
@_run_options
def converge(config_path: Optional[Path], **params: Any) -> None:
    """
    Runs a convergence study and writes its error table.
    """
    config = _run_config(config_path, params)
    taus = config.tau_list or ([config.tau] if config.tau is not None else None)
    if not taus:
        raise ConfigError("converge needs a list of time steps (tau_list)", line=COMMAND_LINE)

    ic = config.initial_condition()
    reference = config.reference
    if reference is None:
        if ic.kind is not InitialKind.Soliton:
            raise ConfigError(f"{ic.kind} data has no exact solution; pass reference = fine:<tau>")
        reference = ReferenceSpec(kind=ReferenceKind.ExactSoliton)

    study = convergence_study(
        ic,
        config.variants,
        taus,
        config.t_final,
        reference,
        config.norms,
        alpha_policy=config.alpha_policy,
        nyquist=config.nyquist,
        dealias=config.dealias,
        nonlinearity=config.effective_nonlinearity(),
    )

    out = config.out or Path("errors.csv")
    write_errors_csv(study, out)
    if config.plot:
        emit_plot_script(study, out, out.with_suffix(".gp"))

    for scheme, slopes in study.fitted_slopes.items():
        for norm, slope in slopes.items():
            click.echo(f"{scheme} {norm} slope {slope:.4f}")


@cli.command()
@click.option(
    "--config",
    "config_path",
    metavar="PATH",
    help="A configuration file whose `seed` key seeds the suites",
    type=click.Path(dir_okay=False, exists=True, path_type=Path),
)
@click.option("--seed", type=int, default=None, help="The seed for random fields [default: 0]")
@click.option(
    "--samples",
    type=click.IntRange(min=1),
    default=50,
    show_default=True,
    help="The number of random fields per oracle suite",
)
@click.option(
    "--suite", "suites", multiple=True, type=click.Choice(list(SUITES)), help="Run only this suite"
)
def selftest(
    config_path: Optional[Path], seed: Optional[int], samples: int, suites: Tuple[str, ...]
) -> None:
    """
    Checks the steppers against their oracles and invariants.
    """
    if seed is None:
        seed = read_seed(config_path) if config_path is not None else 0
    results = run_selftests(seed, samples=samples, suites=suites or None)

    click.echo(f"{'suite':<20} {'result':<6} {'worst':>10} {'tolerance':>10}")
    for result in results:
        status = "pass" if result.passed else "FAIL"
        click.echo(f"{result.name:<20} {status:<6} {result.worst:>10.3e} {result.tolerance:>10.1e}")
    check(results)


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Runs the `kdvexp` command line.

    Invalid input exits with status 1 and numerical failures with status 2.
    """
    try:
        cli.main(args=argv, prog_name="kdvexp", standalone_mode=False)
    except click.exceptions.Abort:
        die("aborted")
    except click.ClickException as e:
        e.show()
        die("invalid command line")
    except NumericalError as e:
        die(str(e), status=2)
    except KdvError as e:
        die(str(e))

    return 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
