"""Figure rendering from validated run artifacts.

Time plots use a logarithmic x-axis throughout, so rows at t=0 are not
drawn there.  Output is deterministic for fixed input: no timestamps or
tool versions are embedded.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import load_run, parse_error_table

_SAVE_META = {".png": {"metadata": {"Software": None}},
              ".svg": {"metadata": {"Date": None}},
              ".pdf": {"metadata": {"CreationDate": None}}}


def _save(fig, out_file) -> Path:
    out = Path(out_file)
    kwargs = _SAVE_META.get(out.suffix.lower(), {})
    fig.savefig(out, dpi=150, **kwargs)
    plt.close(fig)
    return out


def render_series(run_dir, out_file) -> Path:
    """Three stacked panels: max |V|, w_inf, and per-curve s_alpha."""
    run = load_run(run_dir)
    t = run.column("t")
    positive = t > 0

    fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
    axes[0].semilogx(t[positive], run.column("max_abs_V")[positive], color="k")
    axes[0].set_ylabel(r"$\max\|v\|$")
    axes[1].semilogx(t[positive], run.column("w_inf")[positive], color="k")
    axes[1].set_ylabel(r"$w_\infty$")
    for i in range(run.m):
        axes[2].semilogx(t[positive], run.s_alpha[positive, i], label=f"curve {i + 1}")
    axes[2].set_ylabel(r"$s_\alpha$")
    axes[2].set_xlabel("t")
    if run.m > 1:
        axes[2].legend(fontsize=8)

    t_forced = run.forced_zero_time()
    if t_forced is not None and t_forced > 0:
        for ax in axes:
            ax.axvline(t_forced, color="tab:red", linestyle="--", linewidth=1)
    fig.tight_layout()
    return _save(fig, out_file)


def render_snapshots(run_dir, times, out_file) -> Path:
    """Overlaid interfaces at the snapshot times closest to those requested."""
    run = load_run(run_dir)
    if not run.snapshots:
        raise ValueError(f"{run_dir}: no snapshots to draw")
    available = np.array([s.t for s in run.snapshots])
    chosen = sorted({int(np.argmin(np.abs(available - t))) for t in times})

    fig, ax = plt.subplots(figsize=(7, 7))
    for idx in chosen:
        snap = run.snapshots[idx]
        color = None
        for curve in snap.curves:
            closed = np.vstack([curve, curve[:1]])
            line, = ax.plot(closed[:, 0], closed[:, 1], color=color,
                            label=f"t={snap.t:g}" if color is None else None)
            color = line.get_color()
    r_inf = run.outer_radius()
    ring = np.linspace(0, 2 * np.pi, 512)
    ax.plot(r_inf * np.cos(ring), r_inf * np.sin(ring), "k--", linewidth=1)
    ax.set_aspect("equal")
    ax.legend(fontsize=8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return _save(fig, out_file)


def render_convergence(table_file, out_file) -> Path:
    """-log10 of the refinement error against the refinement parameter."""
    param, data = parse_error_table(table_file)
    digits = -np.log10(np.maximum(data[:, 1], 1e-300))

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(data[:, 0], digits, "o-", color="k")
    ax.set_xscale("log", base=2 if param == "n" else 10)
    ax.set_xlabel(param)
    ax.set_ylabel(r"$-\log_{10}$ max deviation")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, out_file)
