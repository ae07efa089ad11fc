import math

import numpy as np
import pretend
import pytest

from kdvexp import output
from kdvexp.enums import NormKind, ReferenceKind, Variant
from kdvexp.evolution import StepperState, run_evolution
from kdvexp.exceptions import KdvError
from kdvexp.experiments import ConvergenceStudy, ErrorRecord, ReferenceSpec, fit_slope
from kdvexp.output import emit_plot_script, write_errors_csv, write_trajectory_csv
from kdvexp.scheme import SchemeConfig
from kdvexp.spectral import Grid, SpectralField


def _trajectory(u, t_final=0.0, snapshot_times=()):
    config = SchemeConfig(variant=Variant.ExpInt1, tau=0.01)
    return run_evolution(StepperState.initial(u), config, t_final, snapshot_times)


def _study(taus=(0.1, 0.05, 0.025), norms=(NormKind.H1,)):
    records = [
        ErrorRecord(tau=tau, scheme=Variant.ExpInt1, errors={norm: 2 * tau for norm in norms})
        for tau in taus
    ]
    study = ConvergenceStudy(
        reference=ReferenceSpec(kind=ReferenceKind.ExactSoliton),
        t_final=1.0,
        norms=list(norms),
        records=records,
    )
    if len(records) >= 3:
        for norm in norms:
            points = [(r.tau, r.errors[norm]) for r in records]
            study.fitted_slopes.setdefault(Variant.ExpInt1, {})[norm] = fit_slope(points)
    return study


def test_trajectory_csv_single_zero_snapshot(tmp_path):
    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(_trajectory(SpectralField.zeros(Grid(4))), path)

    lines = path.read_text().splitlines()
    assert lines[0] == "# t, x_0, x_1, x_2, x_3"
    assert len(lines) == 2
    assert np.array_equal(np.loadtxt(path, delimiter=",", ndmin=2), np.zeros((1, 5)))


def test_trajectory_csv_rows_in_time_order(tmp_path, field):
    path = tmp_path / "trajectory.csv"
    trajectory = _trajectory(field, 0.02, [0.0, 0.02])
    write_trajectory_csv(trajectory, path)

    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    assert rows.shape == (2, 33)
    assert rows[:, 0].tolist() == pytest.approx([0.0, 0.02])


def test_trajectory_csv_round_trips_doubles(tmp_path, grid):
    path = tmp_path / "trajectory.csv"
    u = SpectralField.from_modes(grid, {1: 1 / 3, 3: math.pi / 10}, real=True)
    trajectory = _trajectory(u)
    write_trajectory_csv(trajectory, path)

    samples = output.inverse_transform(trajectory.final.u).samples
    assert np.array_equal(np.loadtxt(path, delimiter=",")[1:], samples)


def test_trajectory_csv_deterministic(tmp_path, field):
    trajectory = _trajectory(field, 0.02, [0.0, 0.01, 0.02])
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"

    write_trajectory_csv(trajectory, first)
    write_trajectory_csv(trajectory, second)
    assert first.read_bytes() == second.read_bytes()


def test_trajectory_csv_non_hermitian(monkeypatch, tmp_path, grid):
    logger = pretend.stub(
        warning=pretend.call_recorder(lambda s: None), info=pretend.call_recorder(lambda s: None)
    )
    monkeypatch.setattr(output, "logger", logger)

    skewed = SpectralField.from_modes(grid, {1: 0.5})
    trajectory = _trajectory(SpectralField.zeros(grid))
    trajectory.snapshots[0] = pretend.stub(t=0.0, u=skewed, step_index=0)

    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(trajectory, path)

    assert len(logger.warning.calls) == 1
    row = np.loadtxt(path, delimiter=",")
    assert np.allclose(row[1:], 0.5 * np.cos(grid.points), atol=1e-15)


def test_trajectory_csv_unwritable(tmp_path, field):
    with pytest.raises(KdvError):
        write_trajectory_csv(_trajectory(field), tmp_path / "missing" / "trajectory.csv")


def test_errors_csv_empty_study(tmp_path):
    path = tmp_path / "errors.csv"
    write_errors_csv(_study(taus=()), path)

    assert path.read_text() == "scheme,tau,norm,error\n"


def test_errors_csv(tmp_path):
    path = tmp_path / "errors.csv"
    study = _study(norms=(NormKind.L2, NormKind.H1))
    write_errors_csv(study, path)

    lines = path.read_text().splitlines()
    assert lines[0] == "scheme,tau,norm,error"
    assert lines[1:7] == [
        "expint1,0.10000000000000001,l2,0.20000000000000001",
        "expint1,0.10000000000000001,h1,0.20000000000000001",
        "expint1,0.050000000000000003,l2,0.10000000000000001",
        "expint1,0.050000000000000003,h1,0.10000000000000001",
        "expint1,0.025000000000000001,l2,0.050000000000000003",
        "expint1,0.025000000000000001,h1,0.050000000000000003",
    ]

    footers = [line.split(",") for line in lines[7:]]
    assert [f[:3] for f in footers] == [["# slope", "expint1", "l2"], ["# slope", "expint1", "h1"]]
    for footer, norm in zip(footers, (NormKind.L2, NormKind.H1)):
        assert float(footer[3]) == study.slope(Variant.ExpInt1, norm)


def test_errors_csv_diverged_row(tmp_path):
    path = tmp_path / "errors.csv"
    study = _study(taus=(0.1,))
    study.records.append(ErrorRecord(tau=0.5, scheme=Variant.ExpInt2, diverged_at=4))
    write_errors_csv(study, path)

    assert path.read_text().splitlines()[-1] == "expint2,0.5,h1,nan"


def test_plot_script_study(tmp_path):
    csv_path = tmp_path / "errors.csv"
    script_path = tmp_path / "errors.gp"
    study = _study()
    write_errors_csv(study, csv_path)
    emit_plot_script(study, csv_path, script_path)

    script = script_path.read_text()
    assert "set logscale xy" in script
    assert "'errors.csv'" in script
    assert "dashtype 2" in script and "dashtype 4" in script
    assert 'title "expint1 (H1)"' in script
    assert script.rstrip().endswith("pause mouse close")


def test_plot_script_trajectory(tmp_path, field):
    csv_path = tmp_path / "data" / "trajectory.csv"
    csv_path.parent.mkdir()
    script_path = tmp_path / "trajectory.gp"
    trajectory = _trajectory(field, 0.02, [0.0, 0.01, 0.02])
    write_trajectory_csv(trajectory, csv_path)
    emit_plot_script(trajectory, csv_path, script_path)

    script = script_path.read_text()
    assert "logscale" not in script
    assert "for [i=0:2] 'data/trajectory.csv' matrix every ::1:i::i" in script
    assert 'set xlabel "x"' in script


def test_plot_script_needs_data(tmp_path):
    with pytest.raises(KdvError):
        emit_plot_script(_study(), tmp_path / "errors.csv", tmp_path / "errors.gp")
