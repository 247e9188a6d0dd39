"""Parsing and validation of simulation run directories.

A run directory contains ``series.csv`` with columns exactly

    t,J,w_inf,max_abs_V,s_alpha_1..M,area_1..M

and a ``snapshots/`` folder of ``t_<index>.txt`` files, each holding a
header line ``t=<value> M=<count>`` followed by one blank-line-separated
block of ``x y`` rows per curve.  Any deviation from the column schema,
including permuted or unknown columns, is an error.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """The file does not match the documented run-directory contract."""


@dataclass(frozen=True)
class Snapshot:
    t: float
    curves: list  # list of (N_i, 2) arrays


@dataclass(frozen=True)
class RunArtifacts:
    columns: list
    series: np.ndarray    # (rows, 4 + 2M)
    snapshots: list       # ordered list of Snapshot
    m: int

    def column(self, name: str) -> np.ndarray:
        return self.series[:, self.columns.index(name)]

    @property
    def s_alpha(self) -> np.ndarray:
        return self.series[:, 4:4 + self.m]

    @property
    def areas(self) -> np.ndarray:
        return self.series[:, 4 + self.m:4 + 2 * self.m]

    def forced_zero_time(self) -> float | None:
        """First time the recorded flux switches to exactly zero."""
        j = self.column("J")
        for i in range(1, j.shape[0]):
            if j[i] == 0.0 and j[i - 1] != 0.0:
                return float(self.series[i, 0])
        return None

    def outer_radius(self) -> float:
        """Recover R_inf from the flux identity J = pi R^2/2 - total area.

        Exact during the transient phase; once the flux is forced to zero
        the identity holds only to the forcing tolerance, so the first row
        is used.
        """
        j0 = self.series[0, 1]
        return float(np.sqrt(2.0 * (j0 + self.areas[0].sum()) / np.pi))


def expected_columns(m: int) -> list:
    return (["t", "J", "w_inf", "max_abs_V"]
            + [f"s_alpha_{i + 1}" for i in range(m)]
            + [f"area_{i + 1}" for i in range(m)])


def parse_series(path) -> tuple[list, np.ndarray, int]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or not lines[0]:
        raise SchemaError(f"{path}: empty file")
    columns = lines[0].split(",")
    if len(columns) < 6 or (len(columns) - 4) % 2:
        raise SchemaError(f"{path}: cannot infer curve count from {len(columns)} columns")
    m = (len(columns) - 4) // 2
    expected = expected_columns(m)
    if columns != expected:
        diff = [f"col {i}: expected {e!r}, got {g!r}"
                for i, (e, g) in enumerate(zip(expected, columns)) if e != g]
        raise SchemaError(f"{path}: column schema mismatch: " + "; ".join(diff))
    if len(lines) == 1:
        raise SchemaError(f"{path}: header only, no data rows")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric row: {exc}") from exc
    if data.shape[1] != len(columns):
        raise SchemaError(f"{path}: ragged rows")
    if np.any(np.diff(data[:, 0]) <= 0):
        raise SchemaError(f"{path}: time column is not strictly increasing")
    return columns, data, m


def parse_snapshot(path) -> Snapshot:
    lines = Path(path).read_text().splitlines()
    head = lines[0].split()
    if len(head) != 2 or not head[0].startswith("t=") or not head[1].startswith("M="):
        raise SchemaError(f"{path}: bad snapshot header {lines[0]!r}")
    t = float(head[0][2:])
    m = int(head[1][2:])
    curves, block = [], []
    for ln in lines[1:]:
        if ln.strip():
            x, y = ln.split()
            block.append((float(x), float(y)))
        elif block:
            curves.append(np.array(block))
            block = []
    if block:
        curves.append(np.array(block))
    if len(curves) != m:
        raise SchemaError(f"{path}: header says M={m}, found {len(curves)} blocks")
    return Snapshot(t=t, curves=curves)


def load_run(run_dir) -> RunArtifacts:
    run_dir = Path(run_dir)
    columns, series, m = parse_series(run_dir / "series.csv")
    snap_dir = run_dir / "snapshots"
    paths = sorted(snap_dir.glob("t_*.txt"),
                   key=lambda p: int(p.stem.split("_")[1])) if snap_dir.is_dir() else []
    snapshots = [parse_snapshot(p) for p in paths]
    times = [s.t for s in snapshots]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise SchemaError(f"{run_dir}: snapshot times are not increasing")
    return RunArtifacts(columns=columns, series=series, snapshots=snapshots, m=m)


def parse_error_table(path) -> tuple[str, np.ndarray]:
    """Two-column convergence table: header '<param>,max_deviation'."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    if len(header) != 2 or header[1] != "max_deviation":
        raise SchemaError(f"{path}: expected '<param>,max_deviation' header, "
                          f"got {lines[0]!r}")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.size == 0:
        raise SchemaError(f"{path}: no rows")
    return header[0], data
