"""Figure rendering for interface-simulation run directories."""

from .artifacts import RunArtifacts, SchemaError, load_run, parse_series
from .figures import render_convergence, render_series, render_snapshots

__all__ = ["RunArtifacts", "SchemaError", "load_run", "parse_series",
           "render_convergence", "render_series", "render_snapshots"]

__version__ = "0.1.0"
