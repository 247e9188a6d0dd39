"""Assembly and solution of the collocated interface system.

Unknowns are the normal velocity at every node of every curve plus the
far-field constant w_inf, ordered [V(curve 1), ..., V(curve M), w_inf].
Collocation rows enforce

    w_inf + 2 S[V](x_i) = sigma*kappa_i - S[x.n](x_i) + D[|x|^2 / 2](x_i)

with the layer sums taken over all curves (singular rules on the node's
own curve, smooth trapezoid across curves), and the final row enforces the
flux constraint, integral of V over all interfaces = J.  The system is
solved matrix-free with unrestarted GMRES; only the density-independent
kernel tables are cached per geometry.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres as _scipy_gmres

from . import geometry, potentials


@dataclass(frozen=True)
class FluxPhase:
    """Transient phase drives the flux from the area deficit; once the
    deficit falls below tolerance the flux is forced to zero for good."""

    forced_zero: bool = False


@dataclass(frozen=True)
class FieldSolution:
    """Normal velocities per curve plus the far-field constant."""

    v: tuple[np.ndarray, ...]
    w_inf: float
    residual: float
    iterations: int
    near_singular: bool = False

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate(self.v)

    @property
    def max_abs_v(self) -> float:
        return max(float(np.abs(vi).max()) for vi in self.v)


class GmresError(RuntimeError):
    def __init__(self, message, best_iterate, residual, iterations):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual = residual
        self.iterations = iterations


@dataclass
class SolveContext:
    """Geometry-dependent tables for one system snapshot."""

    system: geometry.InterfaceSystem
    quads: list[potentials.CurveQuadrature]
    cross_log: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    @property
    def sizes(self) -> list[int]:
        return [q.n for q in self.quads]

    def split(self, v_flat: np.ndarray) -> list[np.ndarray]:
        return np.split(np.asarray(v_flat, dtype=float), np.cumsum(self.sizes)[:-1])


def build_context(system: geometry.InterfaceSystem) -> SolveContext:
    quads = [potentials.build_quadrature(c) for c in system.curves]
    ctx = SolveContext(system=system, quads=quads)
    for i, qt in enumerate(quads):
        for j, qs in enumerate(quads):
            if i == j:
                continue
            dx = qt.points[:, None, 0] - qs.points[None, :, 0]
            dy = qt.points[:, None, 1] - qs.points[None, :, 1]
            ctx.cross_log[(i, j)] = (
                qs.h * qs.s_alpha * 0.5 * np.log(dx * dx + dy * dy) / (2.0 * np.pi)
            )
    return ctx


def _single_layer_all(ctx: SolveContext, densities: list[np.ndarray]) -> list[np.ndarray]:
    out = []
    for i, qt in enumerate(ctx.quads):
        acc = potentials.single_layer_self(densities[i], qt)
        for j in range(len(ctx.quads)):
            if j != i:
                acc = acc + ctx.cross_log[(i, j)] @ densities[j]
        out.append(acc)
    return out


def flux_target(system: geometry.InterfaceSystem, phase: FluxPhase) -> float:
    """J = half the disk area minus the interior area; zero once forced."""
    if phase.forced_zero:
        return 0.0
    return 0.5 * np.pi * system.r_inf**2 - geometry.total_interior_area(system)


def assemble_rhs(system: geometry.InterfaceSystem,
                 ctx: SolveContext | None = None) -> np.ndarray:
    """Known boundary data at every node: sigma*kappa - S[x.n] + D[|x|^2/2]."""
    ctx = ctx or build_context(system)
    xdotn = [np.einsum("ij,ij->i", q.points, q.normals) for q in ctx.quads]
    half_xx = [0.5 * np.einsum("ij,ij->i", q.points, q.points) for q in ctx.quads]
    single = _single_layer_all(ctx, xdotn)
    rows = []
    for i, qt in enumerate(ctx.quads):
        dlp = potentials.double_layer(half_xx[i], qt)
        for j, qs in enumerate(ctx.quads):
            if j != i:
                dlp = dlp + potentials.double_layer(half_xx[j], qs,
                                                    targets=qt.points,
                                                    self_eval=False)
        rows.append(system.sigma * qt.kappa - single[i] + dlp)
    return np.concatenate(rows)


def apply_operator(v_flat, w_inf: float,
                   system_or_ctx) -> tuple[np.ndarray, float]:
    """Unknown-dependent side: (w_inf + 2 S[V] per node, integral of V ds)."""
    ctx = (system_or_ctx if isinstance(system_or_ctx, SolveContext)
           else build_context(system_or_ctx))
    densities = ctx.split(v_flat)
    single = _single_layer_all(ctx, densities)
    rows = np.concatenate([w_inf + 2.0 * s for s in single])
    constraint = sum(q.h * q.s_alpha * float(np.sum(d))
                     for q, d in zip(ctx.quads, densities))
    return rows, constraint


def gmres(matvec, rhs: np.ndarray, tol: float, max_iter: int = 500,
          x0: np.ndarray | None = None) -> tuple[np.ndarray, int, float]:
    """Unrestarted GMRES; raises GmresError with the best iterate on failure."""
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[0]
    scale = float(np.linalg.norm(rhs))
    if scale == 0.0:
        return np.zeros(n), 0, 0.0

    def safe_matvec(u):
        # scipy mutates its work arrays; never hand back a view of the input
        return np.array(matvec(u), dtype=float, copy=True)

    op = LinearOperator((n, n), matvec=safe_matvec, dtype=float)
    iters = [0]

    def count(_):
        iters[0] += 1

    x, info = _scipy_gmres(op, rhs, x0=x0, rtol=tol, atol=0.0,
                           restart=min(max_iter, n), maxiter=1,
                           callback=count, callback_type="pr_norm")
    residual = float(np.linalg.norm(safe_matvec(x) - rhs)) / scale
    if info != 0 or residual > tol:
        raise GmresError(
            f"GMRES stalled at relative residual {residual:.3e} "
            f"after {iters[0]} iterations (target {tol:.1e})",
            best_iterate=x, residual=residual, iterations=iters[0])
    return x, iters[0], residual


def solve(system: geometry.InterfaceSystem, phase: FluxPhase | None = None,
          tol: float = 1e-10, max_iter: int = 500,
          x0: np.ndarray | None = None,
          ctx: SolveContext | None = None) -> FieldSolution:
    """Solve for the normal velocity and far-field constant."""
    phase = phase or FluxPhase()
    ctx = ctx or build_context(system)
    b = np.append(assemble_rhs(system, ctx), flux_target(system, phase))
    mn = sum(ctx.sizes)

    def matvec(u):
        rows, constraint = apply_operator(u[:mn], u[mn], ctx)
        return np.append(rows, constraint)

    x, iterations, residual = gmres(matvec, b, tol=tol, max_iter=max_iter, x0=x0)

    near = False
    for i, qt in enumerate(ctx.quads):
        for j, qs in enumerate(ctx.quads):
            if i < j:
                gap = potentials.min_separation(qt, qs)
                limit = potentials.NEAR_SINGULAR_FRACTION * max(
                    qt.curve.length / qt.n, qs.curve.length / qs.n)
                near = near or gap < limit

    return FieldSolution(v=tuple(ctx.split(x[:mn])), w_inf=float(x[mn]),
                         residual=residual, iterations=iterations,
                         near_singular=near)


@dataclass
class BieSolver:
    """Callable wrapper carrying solver settings through the time stepper."""

    tol: float = 1e-10
    max_iter: int = 500

    def __call__(self, system, phase, x0=None):
        return solve(system, phase, tol=self.tol, max_iter=self.max_iter, x0=x0)
