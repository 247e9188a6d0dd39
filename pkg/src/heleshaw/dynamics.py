"""Time integration of the interface system.

The shape dynamics is posed on (L, theta) per curve: the length obeys
L_t = integral theta_alpha * V d alpha, and the tangent angle obeys
theta_t = (2 pi / L)(-V_alpha + T theta_alpha), where T is the tangential
velocity that keeps the markers equally spaced in arclength.  The stiff
curvature part of theta_t diagonalizes in Fourier space with symbol
-sigma |k|^3 / s_alpha^3 and is absorbed into an integrating factor; the
remainder N is treated explicitly with second-order Adams-Bashforth, and a
single integrating-factor Euler step bootstraps the two-level history.
The round-off cutoff filter acts on both spectra (theta after the update,
N before use); the high-order smoothing filter acts on N only, where the
aliasing error is born, since damping the state spectrum itself would
distort resolved modes on coarse grids.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import bie, geometry, spectral


@dataclass(frozen=True)
class CurveHistory:
    """Previous-level quantities one curve contributes to the AB2 update."""

    length_rate: float
    nonstiff_hat: np.ndarray
    s_alpha: float
    anchor_velocity: np.ndarray


@dataclass(frozen=True)
class EvolutionState:
    system: geometry.InterfaceSystem
    t: float = 0.0
    phase: bie.FluxPhase = bie.FluxPhase()
    history: tuple[CurveHistory, ...] | None = None
    prev_solution: bie.FieldSolution | None = None


def tangential_velocity(curve: geometry.InterfaceCurve, v: np.ndarray) -> np.ndarray:
    """Tangential velocity making s_alpha_t uniform in alpha, zero-mean gauge.

    T_alpha = mean(theta_alpha V) - theta_alpha V, so that
    s_alpha_t = V theta_alpha + T_alpha = L_t / 2 pi at every node.  The
    free additive constant is fixed by mean(T) = 0: unlike pinning T at
    alpha = 0, this gauge is independent of where the parametrization
    starts, so congruent curves discretized from different anchor points
    stay congruent under the discrete dynamics.
    """
    theta_a = 1.0 + spectral.fourier_derivative(curve.q)
    t_vel = -spectral.periodic_antiderivative(theta_a * v)
    return t_vel - t_vel.mean()


def length_rate(curve: geometry.InterfaceCurve, v: np.ndarray) -> float:
    """L_t = integral theta_alpha V d alpha (trapezoid, spectrally exact)."""
    theta_a = 1.0 + spectral.fourier_derivative(curve.q)
    return 2.0 * np.pi / curve.n * float(np.sum(theta_a * v))


def theta_time_derivative(curve: geometry.InterfaceCurve, v: np.ndarray,
                          t_vel: np.ndarray) -> np.ndarray:
    theta_a = 1.0 + spectral.fourier_derivative(curve.q)
    return (-spectral.fourier_derivative(v) + t_vel * theta_a) / curve.s_alpha


def stiff_symbol(n: int, sigma: float, s_alpha: float) -> np.ndarray:
    """Decay rates sigma |k|^3 / s_alpha^3 in rfft layout."""
    k = np.arange(n // 2 + 1, dtype=float)
    return sigma * k**3 / s_alpha**3


def theta_nonstiff(curve: geometry.InterfaceCurve, sigma: float, v: np.ndarray,
                   t_vel: np.ndarray) -> np.ndarray:
    """Spectrum of N = theta_t + sigma|k|^3/s^3 * theta_hat (the explicit part)."""
    theta_t = theta_time_derivative(curve, v, t_vel)
    p_hat = spectral.spectrum(geometry.theta(curve) - spectral.grid(curve.n))
    return spectral.spectrum(theta_t) + stiff_symbol(curve.n, sigma, curve.s_alpha) * p_hat


def integrating_factor(n: int, sigma: float, dt: float, s_start: float,
                       s_end: float, s_mid: float | None = None) -> np.ndarray:
    """e_k over one step (trapezoid in 1/s^3) or two steps (composite rule)."""
    if s_start <= 0 or s_end <= 0 or (s_mid is not None and s_mid <= 0):
        raise ValueError("s_alpha must stay positive")
    if s_mid is None:
        integral = 0.5 * dt * (s_start**-3 + s_end**-3)
    else:
        integral = dt * (0.5 * s_start**-3 + s_mid**-3 + 0.5 * s_end**-3)
    k = np.arange(n // 2 + 1, dtype=float)
    return np.exp(-sigma * k**3 * integral)


def _filtered(coeffs: np.ndarray, filter_tol: float, smooth: bool) -> np.ndarray:
    out = spectral.krasny_filter(coeffs, filter_tol)
    return spectral.smoothing_filter(out) if smooth else out


def _advance(state: EvolutionState, dt: float, solver, filter_tol: float,
             smooth: bool, euler: bool) -> EvolutionState:
    system = state.system
    sigma = system.sigma
    x0 = None
    if state.prev_solution is not None:
        x0 = np.append(state.prev_solution.flat, state.prev_solution.w_inf)
    sol = solver(system, state.phase, x0)

    new_curves = []
    new_history = []
    for i, curve in enumerate(system.curves):
        v = sol.v[i]
        t_vel = tangential_velocity(curve, v)
        l_rate = length_rate(curve, v)
        p_hat = spectral.spectrum(geometry.theta(curve) - spectral.grid(curve.n))
        n_hat = _filtered(theta_nonstiff(curve, sigma, v, t_vel), filter_tol, smooth)
        normal, tangent = geometry.normal_tangent(curve)
        # translation is tracked through the marker mean: its velocity is the
        # node average of the full velocity, which is invariant under marker
        # relabeling and therefore respects the configuration's reflection
        # symmetries (an alpha=0 anchor would not)
        x_mean = geometry.markers(curve).mean(axis=0)
        v_anchor = (v[:, None] * normal + t_vel[:, None] * tangent).mean(axis=0)

        if euler:
            new_length = curve.length + dt * l_rate
            ek = integrating_factor(curve.n, sigma, dt, curve.s_alpha,
                                    new_length / (2 * np.pi))
            p_new = ek * (p_hat + dt * n_hat)
            new_mean = x_mean + dt * v_anchor
        else:
            past = state.history[i]
            new_length = curve.length + 0.5 * dt * (3 * l_rate - past.length_rate)
            s_new = new_length / (2 * np.pi)
            ek1 = integrating_factor(curve.n, sigma, dt, curve.s_alpha, s_new)
            ek2 = integrating_factor(curve.n, sigma, dt, past.s_alpha, s_new,
                                     s_mid=curve.s_alpha)
            p_new = ek1 * p_hat + 0.5 * dt * (3 * ek1 * n_hat
                                              - ek2 * past.nonstiff_hat)
            new_mean = x_mean + 0.5 * dt * (3 * v_anchor - past.anchor_velocity)

        if new_length <= 0:
            raise RuntimeError(f"curve {i} length collapsed to {new_length}")
        # cutoff filter only: smoothing the state itself would damp resolved
        # modes on coarse grids (the aliasing filter already acted on N)
        p_new = spectral.krasny_filter(p_new, filter_tol)
        theta_new = spectral.grid(curve.n) + spectral.samples(p_new, curve.n)
        # place the alpha=0 marker so the reconstructed mean lands on new_mean
        s_new = new_length / (2 * np.pi)
        gx = spectral.periodic_antiderivative(np.cos(theta_new))
        gy = spectral.periodic_antiderivative(np.sin(theta_new))
        x_ref = new_mean - s_new * np.array([gx.mean(), gy.mean()])
        new_curves.append(geometry.from_theta(curve.n, float(new_length),
                                              theta_new, x_ref))
        new_history.append(CurveHistory(length_rate=l_rate, nonstiff_hat=n_hat,
                                        s_alpha=curve.s_alpha,
                                        anchor_velocity=v_anchor))

    return EvolutionState(
        system=replace(system, curves=tuple(new_curves)),
        t=state.t + dt,
        phase=state.phase,
        history=tuple(new_history),
        prev_solution=sol,
    )


def bootstrap(state: EvolutionState, dt: float, solver, filter_tol: float = 1e-10,
              smooth: bool = True) -> EvolutionState:
    """First-order integrating-factor Euler step creating the AB2 history."""
    if state.history is not None:
        raise ValueError("state already carries history; use step()")
    return _advance(state, dt, solver, filter_tol, smooth, euler=True)


def step(state: EvolutionState, dt: float, solver, filter_tol: float = 1e-10,
         smooth: bool = True) -> EvolutionState:
    """One AB2 step of the integrating-factor scheme."""
    if state.history is None:
        raise ValueError("no history; bootstrap() the state first")
    return _advance(state, dt, solver, filter_tol, smooth, euler=False)


def update_flux_phase(phase: bie.FluxPhase, system: geometry.InterfaceSystem,
                      tol: float = 1e-3) -> bie.FluxPhase:
    """Force the flux to zero, permanently, once the area deficit is below tol."""
    if phase.forced_zero:
        return phase
    deficit = 0.5 * np.pi * system.r_inf**2 - geometry.total_interior_area(system)
    if abs(deficit) < tol:
        return bie.FluxPhase(forced_zero=True)
    return phase


def stop_check(state: EvolutionState, t_end: float, contact_factor: float = 2.0,
               blowup_factor: float = 100.0,
               collapse_factor: float = 4.0) -> str | None:
    """Reason to stop, or None.

    'time' at t_end; 'near-contact' when nodes of different curves (or
    non-adjacent nodes of one curve) come within contact_factor node
    spacings; 'curvature-blowup' when max|kappa| exceeds
    blowup_factor/min(L) or the state stops being finite; 'collapse' when a
    curve shrinks below collapse_factor node spacings of the largest curve
    (a vanishing domain that the grid cannot resolve and a fixed time step
    cannot follow).
    """
    # margin well below any usable dt but above accumulated float error in t
    if state.t >= t_end - 1e-9:
        return "time"

    curves = state.system.curves
    pts = [geometry.markers(c) for c in curves]
    spacing = [c.length / c.n for c in curves]

    if not all(np.all(np.isfinite(x)) for x in pts):
        return "curvature-blowup"
    if min(c.length for c in curves) < collapse_factor * max(spacing):
        return "collapse"

    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            dx = pts[i][:, None, :] - pts[j][None, :, :]
            gap = np.sqrt(np.einsum("ijk,ijk->ij", dx, dx).min())
            if gap < contact_factor * max(spacing[i], spacing[j]):
                return "near-contact"

    for c, x, h_s in zip(curves, pts, spacing):
        # self-contact: chords between nodes at cyclic separation >= 4
        n = c.n
        dx = x[:, None, :] - x[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", dx, dx)
        sep = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
        sep = np.minimum(sep, n - sep)
        d2[sep < 4] = np.inf
        if np.sqrt(d2.min()) < contact_factor * h_s:
            return "near-contact"

    min_length = min(c.length for c in curves)
    max_kappa = max(float(np.abs(geometry.curvature(c)).max()) for c in curves)
    if max_kappa > blowup_factor / min_length:
        return "curvature-blowup"
    return None
