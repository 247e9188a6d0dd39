"""Closed-form circle solutions and the perturbed-circle stability oracle.

Everything here is independent of the boundary-integral machinery and is
used to validate it: the radial equilibrium, the field profiles around a
concentric circle, the first-order perturbation coefficients for a mode-k
cosine disturbance, and the (R, delta) ODE integrated with RK4 at a step
far below the scheme under test.

Note on the delta equation: the leading coefficient is -R_inf^2/(4 R^2).
Two independent derivations (from the u-form and the w-form of the field
problem) give this value, and the linearized boundary-integral solve
reproduces it; see the repository notes for the discrepancy with the
coefficient quoted elsewhere.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class LinearState:
    """Perturbed circle r = R + delta*cos(k*theta) inside the disk r_inf."""

    radius: float
    delta: float
    k: int
    r_inf: float
    sigma: float

    def __post_init__(self):
        if not 0 < self.radius < self.r_inf:
            raise ValueError("need 0 < radius < r_inf")
        if self.k < 2:
            raise ValueError("perturbation mode must be >= 2")
        if abs(self.delta) > 0.1 * self.radius:
            warnings.warn("delta/R above 0.1: linearization is unreliable",
                          stacklevel=2)


@dataclass(frozen=True)
class LinearFields:
    """First-order field coefficients and zeroth-order boundary values."""

    a_minus: float
    a_plus: float
    b_plus: float
    w0_minus: float   # constant interior profile
    w0_plus_at_interface: float

    def u_continuity_defect(self, state: LinearState) -> float:
        """u = w -/+ r^2/4 must be continuous at r = R at zeroth order."""
        r = state.radius
        u_minus = self.w0_minus + r * r / 4.0
        u_plus = self.w0_plus_at_interface - r * r / 4.0
        return u_plus - u_minus


def compute_sigma() -> float:
    """Surface-tension constant of the quartic double well, 1/(phi+ - phi-)
    times the integral of sqrt(2 (F(phi) - F(phi-))) between the wells."""

    def well(phi):
        return 0.25 * phi**4 - 0.5 * phi**2

    integrand = lambda phi: np.sqrt(max(2.0 * (well(phi) - well(-1.0)), 0.0))
    val, err = quad(integrand, -1.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    if err > 1e-11:
        raise RuntimeError(f"surface-tension quadrature error {err:.2e}")
    return val / 2.0


def steady_radius(r_inf: float) -> float:
    """Radius at which interior and exterior areas balance: r_inf/sqrt(2)."""
    if r_inf <= 0:
        raise ValueError("outer radius must be positive")
    return r_inf / np.sqrt(2.0)


def u_fields(radius: float, r_inf: float, sigma: float, r) -> np.ndarray:
    """Radial concentric solution, interior branch for r <= radius."""
    r = np.asarray(r, dtype=float)
    inner = 0.25 * (r * r - radius * radius) + sigma / radius
    outer = (-0.25 * r * r + 0.5 * r_inf**2 * np.log(np.maximum(r, 1e-300))
             + sigma / radius + 0.25 * radius**2 - 0.5 * r_inf**2 * np.log(radius))
    return np.where(r <= radius, inner, outer)


def perturbation_coefficients(state: LinearState) -> LinearFields:
    r, k, sig, rinf = state.radius, state.k, state.sigma, state.r_inf
    a_minus = sig * (k * k - 1) / r ** (k + 2) - 1.0 / (2.0 * r ** (k - 1))
    bracket = sig * (k * k - 1) / r**2 + r / 2.0 - rinf**2 / (2.0 * r)
    denom = r ** (2 * k) + rinf ** (2 * k)
    a_plus = r**k * bracket / denom
    b_plus = r**k * rinf ** (2 * k) * bracket / denom
    return LinearFields(
        a_minus=a_minus,
        a_plus=a_plus,
        b_plus=b_plus,
        w0_minus=sig / r - r * r / 4.0,
        w0_plus_at_interface=sig / r + r * r / 4.0,
    )


def ode_rhs(state: LinearState) -> tuple[float, float]:
    """Growth rates (dR/dt, d delta/dt) of the perturbed circle."""
    r, k, sig, rinf = state.radius, state.k, state.sigma, state.r_inf
    r_dot = rinf**2 / (4.0 * r) - r / 2.0
    t1 = sig * (k * k - 1) / r**3 - 0.5
    p1 = sig * (k * k - 1) / r**2 + r / 2.0 - rinf**2 / (2.0 * r)
    denom = r ** (2 * k) + rinf ** (2 * k)
    t2 = p1 * r ** (2 * k - 1) / denom
    t3 = p1 * rinf ** (2 * k) / (r * denom)
    rate = -rinf**2 / (4.0 * r**2) + k * (t2 - t3) / 2.0 - k * t1 / 2.0 - 0.5
    return r_dot, rate * state.delta


def integrate(state0: LinearState, dt: float, t_end: float) -> np.ndarray:
    """Classical RK4 trajectory, rows (t, R, delta), sampled every step."""
    if dt <= 0:
        raise ValueError("dt must be positive")

    def f(y):
        st = LinearState(y[0], y[1], state0.k, state0.r_inf, state0.sigma)
        return np.array(ode_rhs(st))

    steps = int(round(t_end / dt))
    out = np.empty((steps + 1, 3))
    y = np.array([state0.radius, state0.delta])
    out[0] = 0.0, y[0], y[1]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # delta may legitimately outgrow 0.1 R
        for i in range(1, steps + 1):
            k1 = f(y)
            k2 = f(y + 0.5 * dt * k1)
            k3 = f(y + 0.5 * dt * k2)
            k4 = f(y + dt * k3)
            y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            out[i] = i * dt, y[0], y[1]
    return out


def write_trajectory(path, trajectory: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "R", "delta"])
        for row in trajectory:
            writer.writerow([f"{v:.16e}" for v in row])
