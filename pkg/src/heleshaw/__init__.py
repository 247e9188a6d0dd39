"""Boundary-integral simulator for flux-driven multi-domain interface dynamics."""

from .bie import BieSolver, FieldSolution, FluxPhase, solve
from .dynamics import EvolutionState, bootstrap, step, stop_check, update_flux_phase
from .geometry import (Ellipse, InterfaceCurve, InterfaceSystem, PerturbedCircle,
                       resample_equal_arclength)
from .linear_analysis import LinearState, compute_sigma, steady_radius
from .scenarios import PRESETS, Scenario, load_scenario
from .runner import run

__all__ = [
    "BieSolver", "FieldSolution", "FluxPhase", "solve",
    "EvolutionState", "bootstrap", "step", "stop_check", "update_flux_phase",
    "Ellipse", "InterfaceCurve", "InterfaceSystem", "PerturbedCircle",
    "resample_equal_arclength",
    "LinearState", "compute_sigma", "steady_radius",
    "PRESETS", "Scenario", "load_scenario",
    "run",
]

__version__ = "0.1.0"
