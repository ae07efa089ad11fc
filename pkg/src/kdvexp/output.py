"""
CSV writers and gnuplot script emission.
"""

import csv
import logging
import os
from pathlib import Path
from typing import List, TextIO, Union

import numpy as np

from kdvexp.constants import CSV_FLOAT_FORMAT, NORM_LABELS
from kdvexp.evolution import Trajectory
from kdvexp.exceptions import KdvError
from kdvexp.experiments import ConvergenceStudy
from kdvexp.spectral import SpectralField, inverse_transform, inverse_transform_complex
from kdvexp.util import format_float

logger = logging.getLogger(__name__)


def _samples(u: SpectralField) -> np.ndarray:
    if u.is_hermitian():
        return inverse_transform(u).samples

    samples = inverse_transform_complex(u)
    logger.warning(
        f"field isn't Hermitian (defect {u.hermitian_defect():.3e}); "
        f"discarding imaginary parts up to {np.max(np.abs(samples.imag)):.3e}"
    )
    return samples.real


def _open_for_write(path: Path) -> TextIO:
    try:
        return path.open("w", newline="", encoding="utf-8")
    except OSError as e:
        raise KdvError(f"couldn't write {path}: {e.strerror}")


def write_trajectory_csv(trajectory: Trajectory, path: Path) -> None:
    """
    Writes one row per snapshot: the time, then the field at every grid point.
    """
    num_modes = trajectory.grid.num_modes
    header = ", ".join(["t", *(f"x_{i}" for i in range(num_modes))])
    rows = np.array([[snapshot.t, *_samples(snapshot.u)] for snapshot in trajectory.snapshots])

    with _open_for_write(path) as io:
        np.savetxt(
            io,
            rows.reshape(-1, num_modes + 1),
            fmt=f"%{CSV_FLOAT_FORMAT}",
            delimiter=", ",
            header=header,
            comments="# ",
        )
    logger.info(f"wrote {len(trajectory.snapshots)} snapshots to {path}")


def write_errors_csv(study: ConvergenceStudy, path: Path) -> None:
    """
    Writes one `scheme,tau,norm,error` row per study record and norm, followed by
    `# slope` comment rows with the fitted slopes.

    Diverged rows are written with an error of `nan`.
    """
    with _open_for_write(path) as io:
        writer = csv.writer(io, lineterminator="\n")
        writer.writerow(["scheme", "tau", "norm", "error"])
        for record in study.records:
            for norm in study.norms:
                error = record.errors.get(norm, float("nan"))
                writer.writerow(
                    [record.scheme, format_float(record.tau), norm, format_float(error)]
                )

        for scheme, slopes in study.fitted_slopes.items():
            for norm, slope in slopes.items():
                io.write(f"# slope,{scheme},{norm},{format_float(slope)}\n")
    logger.info(f"wrote {len(study.records)} study rows to {path}")


def _relative(csv_path: Path, script_path: Path) -> str:
    return os.path.relpath(csv_path, script_path.parent)


def _study_script(study: ConvergenceStudy, data: str) -> List[str]:
    lines = [
        'set datafile separator ","',
        "set logscale xy",
        'set xlabel "tau"',
        'set ylabel "error"',
        "set key left top",
        "set format xy \"10^{%L}\"",
    ]

    # Guide lines of slope one and two, through the first point of the first series.
    anchors = [r for r in study.records if not r.diverged]
    if anchors:
        anchor = anchors[0]
        error = anchor.errors[study.norms[0]]
        lines.append(f"slope1(x) = {format_float(error / anchor.tau)} * x")
        lines.append(f"slope2(x) = {format_float(error / anchor.tau**2)} * x**2")

    series = []
    for scheme in dict.fromkeys(r.scheme for r in study.records):
        for norm in study.norms:
            series.append(
                f"'{data}' using 2:"
                f"(strcol(1) eq \"{scheme}\" && strcol(3) eq \"{norm}\" ? $4 : 1/0) "
                f'with linespoints title "{scheme} ({NORM_LABELS[norm]})"'
            )
    if anchors:
        series.append('slope1(x) with lines dashtype 2 lc "black" title "slope 1"')
        series.append('slope2(x) with lines dashtype 4 lc "black" title "slope 2"')

    if series:
        lines.append("plot " + ", \\\n     ".join(series))
    return lines


def _trajectory_script(trajectory: Trajectory, data: str) -> List[str]:
    grid = trajectory.grid
    dx = grid.length / grid.num_modes
    times = " ".join(format_float(t) for t in trajectory.times)
    return [
        'set datafile separator ","',
        'set xlabel "x"',
        'set ylabel "u"',
        f"xmin = {format_float(float(grid.points[0]))}",
        f"dx = {format_float(dx)}",
        f'times = "{times}"',
        f"plot for [i=0:{len(trajectory.snapshots) - 1}] '{data}' matrix every ::1:i::i "
        'using (xmin + ($1 - 1) * dx):3 with lines title sprintf("t = %s", word(times, i + 1))',
    ]


def emit_plot_script(
    source: Union[ConvergenceStudy, Trajectory], csv_path: Path, script_path: Path
) -> None:
    """
    Writes a gnuplot script plotting the CSV at `csv_path`, which must already exist.

    Studies get log-log order plots with slope guides; trajectories get one curve
    per snapshot.
    """
    if not csv_path.is_file():
        raise KdvError(f"plot data {csv_path} doesn't exist; write it first")

    data = _relative(csv_path, script_path)
    if isinstance(source, ConvergenceStudy):
        lines = _study_script(source, data)
    else:
        lines = _trajectory_script(source, data)

    with _open_for_write(script_path) as io:
        io.write("# gnuplot script generated by kdvexp\n")
        io.write("\n".join(lines) + "\n")
        io.write("pause mouse close\n")
    logger.info(f"wrote plot script to {script_path}")
