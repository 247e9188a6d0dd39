"""Main simulation loop, output writing, and the study operations.

Outputs of a run directory:

* ``series.csv`` with columns exactly
  ``t,J,w_inf,max_abs_V,s_alpha_1..M,area_1..M``, one row at t=0 and one per
  ``output_every`` steps, plus a final row at the stopping state.
* ``snapshots/t_<index>.txt``: header line ``t=<value> M=<count>`` followed
  by one blank-line-separated block of ``x y`` rows per curve.
* ``report.txt``: stop reason, the time the flux was forced to zero (when
  it happened), wall time, GMRES iteration statistics.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bie, dynamics, geometry
from .bie import BieSolver
from .dynamics import EvolutionState
from .linear_analysis import LinearState, integrate as integrate_linear
from .scenarios import Scenario, build_system, validate


@dataclass
class RunReport:
    stop_reason: str
    t_final: float
    t_forced_zero: float | None
    steps: int
    wall_time: float
    gmres_total: int
    gmres_max: int
    out_dir: Path | None = None


def _advance(state: EvolutionState, dt: float, solver, filter_tol: float):
    if state.history is None:
        return dynamics.bootstrap(state, dt, solver, filter_tol=filter_tol)
    return dynamics.step(state, dt, solver, filter_tol=filter_tol)


def _march(scenario: Scenario, on_state=None):
    """Time loop without file output; on_state(k, state) sees every state."""
    validate(scenario)
    state = EvolutionState(system=build_system(scenario))
    solver = BieSolver(tol=scenario.gmres_tol)
    k = 0
    t_forced = None
    while True:
        phase = dynamics.update_flux_phase(state.phase, state.system,
                                           tol=scenario.flux_tol)
        if phase.forced_zero and not state.phase.forced_zero:
            t_forced = state.t
        state = EvolutionState(state.system, state.t, phase, state.history,
                               state.prev_solution)
        if on_state is not None:
            on_state(k, state)
        reason = dynamics.stop_check(state, scenario.t_end)
        if reason is not None:
            return state, reason, t_forced, k
        state = _advance(state, scenario.dt, solver, scenario.filter_tol)
        k += 1


def _series_header(m: int) -> list[str]:
    return (["t", "J", "w_inf", "max_abs_V"]
            + [f"s_alpha_{i + 1}" for i in range(m)]
            + [f"area_{i + 1}" for i in range(m)])


def _series_row(state: EvolutionState, sol: bie.FieldSolution) -> list[float]:
    system = state.system
    j = bie.flux_target(system, state.phase)
    s_alphas = [c.s_alpha for c in system.curves]
    areas = [geometry.enclosed_area(c) for c in system.curves]
    return [state.t, j, sol.w_inf, sol.max_abs_v, *s_alphas, *areas]


def _write_snapshot(path: Path, state: EvolutionState) -> None:
    lines = [f"t={state.t:.17g} M={len(state.system.curves)}"]
    for curve in state.system.curves:
        for x, y in geometry.markers(curve):
            lines.append(f"{x:.17g} {y:.17g}")
        lines.append("")
    path.write_text("\n".join(lines))


def run(scenario: Scenario, out_dir) -> RunReport:
    """Transient-then-relaxation protocol with outputs flushed as it goes."""
    validate(scenario)
    out = Path(out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)

    solver = BieSolver(tol=scenario.gmres_tol)
    state = EvolutionState(system=build_system(scenario))
    started = time.perf_counter()
    rows: list[list[float]] = []
    t_forced = None
    gmres_counts: list[int] = []
    snap_index = 0
    k = 0
    stop_reason = "error"
    try:
        while True:
            phase = dynamics.update_flux_phase(state.phase, state.system,
                                               tol=scenario.flux_tol)
            if phase.forced_zero and not state.phase.forced_zero:
                t_forced = state.t
            state = EvolutionState(state.system, state.t, phase, state.history,
                                   state.prev_solution)
            stop_reason = dynamics.stop_check(state, scenario.t_end)
            if stop_reason is not None:
                final_sol = bie.solve(state.system, state.phase,
                                      tol=scenario.gmres_tol)
                gmres_counts.append(final_sol.iterations)
                rows.append(_series_row(state, final_sol))
                _write_snapshot(out / "snapshots" / f"t_{snap_index}.txt", state)
                break
            new_state = _advance(state, scenario.dt, solver, scenario.filter_tol)
            gmres_counts.append(new_state.prev_solution.iterations)
            if k % scenario.output_every == 0:
                rows.append(_series_row(state, new_state.prev_solution))
                _write_snapshot(out / "snapshots" / f"t_{snap_index}.txt", state)
                snap_index += 1
            state = new_state
            k += 1
    finally:
        # flush whatever is consistent, also on solver failure
        _write_series(out / "series.csv", rows, len(scenario.domains))
        report = RunReport(
            stop_reason=stop_reason or "error",
            t_final=state.t,
            t_forced_zero=t_forced,
            steps=k,
            wall_time=time.perf_counter() - started,
            gmres_total=int(sum(gmres_counts)),
            gmres_max=int(max(gmres_counts, default=0)),
            out_dir=out,
        )
        _write_report(out / "report.txt", report)
    return report


def _write_series(path: Path, rows, m: int) -> None:
    header = ",".join(_series_header(m))
    body = "\n".join(",".join(f"{v:.17g}" for v in row) for row in rows)
    path.write_text(header + "\n" + body + ("\n" if body else ""))


def _write_report(path: Path, report: RunReport) -> None:
    lines = [
        f"stop_reason: {report.stop_reason}",
        f"t_final: {report.t_final:.17g}",
        f"t_forced_zero: "
        + (f"{report.t_forced_zero:.17g}" if report.t_forced_zero is not None else "none"),
        f"steps: {report.steps}",
        f"wall_time_seconds: {report.wall_time:.3f}",
        f"gmres_total_iterations: {report.gmres_total}",
        f"gmres_max_iterations: {report.gmres_max}",
    ]
    path.write_text("\n".join(lines) + "\n")


def _final_markers(scenario: Scenario) -> list[np.ndarray]:
    final, reason, _, _ = _march(scenario)
    if reason != "time":
        raise RuntimeError(f"study run stopped early: {reason}")
    return [geometry.markers(c) for c in final.system.curves]


def convergence_space(scenario: Scenario, n_values, dt: float,
                      t_end: float) -> list[tuple[int, float]]:
    """Max marker deviation of each N against the finest, at matched nodes."""
    n_values = sorted(set(int(n) for n in n_values))
    finest = n_values[-1]
    reference = _final_markers(scenario.with_overrides(n=finest, dt=dt, t_end=t_end))
    table = []
    for n in n_values[:-1]:
        marks = _final_markers(scenario.with_overrides(n=n, dt=dt, t_end=t_end))
        stride = finest // n
        dev = max(
            float(np.abs(m - ref[::stride]).max())
            for m, ref in zip(marks, reference))
        table.append((n, dev))
    return table


def convergence_time(scenario: Scenario, dt_values, n: int,
                     t_end: float) -> list[tuple[float, float]]:
    """Max marker deviation of each dt against the finest dt at fixed N."""
    dt_values = sorted(set(float(dt) for dt in dt_values), reverse=True)
    finest = dt_values[-1]
    reference = _final_markers(scenario.with_overrides(n=n, dt=finest, t_end=t_end))
    table = []
    for dt in dt_values[:-1]:
        marks = _final_markers(scenario.with_overrides(n=n, dt=dt, t_end=t_end))
        dev = max(float(np.abs(m - ref).max())
                  for m, ref in zip(marks, reference))
        table.append((dt, dev))
    return table


def _mode_fit(curve: geometry.InterfaceCurve, mode: int) -> tuple[float, float]:
    """Least-squares (mean radius, cos-mode amplitude) of the marker radii."""
    x = geometry.markers(curve)
    phi = np.arctan2(x[:, 1], x[:, 0])
    r = np.hypot(x[:, 0], x[:, 1])
    basis = np.stack([np.ones_like(phi), np.cos(mode * phi), np.sin(mode * phi)],
                     axis=1)
    coef, *_ = np.linalg.lstsq(basis, r, rcond=None)
    return float(coef[0]), float(coef[1])


def linear_compare(scenario: Scenario, t_end: float | None = None,
                   oracle_dt: float = 1e-4) -> np.ndarray:
    """Joint table (t, R_num, R_lin, delta_num, delta_lin) at the output cadence.

    The nonlinear radii come from a Fourier fit of the marker radii; the
    linear trajectory is the RK4-integrated mode oracle.
    """
    shape = scenario.domains[0]
    if not isinstance(shape, geometry.PerturbedCircle) or len(scenario.domains) != 1:
        raise ValueError("linear comparison needs a single perturbed-circle domain")
    scenario = scenario.with_overrides(t_end=t_end)
    validate(scenario)

    samples: list[tuple[float, float, float]] = []

    def record(k, state):
        if k % scenario.output_every == 0 or state.t >= scenario.t_end - 1e-12:
            r_num, d_num = _mode_fit(state.system.curves[0], shape.mode)
            samples.append((state.t, r_num, d_num))

    _march(scenario, on_state=record)

    state0 = LinearState(shape.radius, shape.amplitude, shape.mode,
                         scenario.r_inf, scenario.resolved_sigma())
    oracle = integrate_linear(state0, oracle_dt, scenario.t_end)
    table = np.empty((len(samples), 5))
    for i, (t, r_num, d_num) in enumerate(samples):
        idx = min(int(round(t / oracle_dt)), oracle.shape[0] - 1)
        table[i] = t, r_num, oracle[idx, 1], d_num, oracle[idx, 2]
    return table


def write_table(path, table, header: str) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in table:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
