"""Single- and double-layer potentials for G(x,x') = ln|x-x'| / (2*pi).

Self-interaction handles the log singularity by the kernel split

    ln|x(a)-x(a')| = ln 2|sin((a-a')/2)| + ln( |x(a)-x(a')| / 2|sin((a-a')/2)| ).

The first piece is a periodic convolution whose Fourier multiplier is known
exactly (-pi/|k| for k != 0, 0 on the mean), so it is applied spectrally.
The second piece is smooth, with removable diagonal value ln(s_alpha), and
is integrated with the alternating-point rule: a trapezoid sum over the
nodes of parity opposite to the target, at double weight.  The double-layer
kernel is smooth; its diagonal limit is kappa/(4*pi).

Cross-curve evaluation (target strictly off the source curve) is a plain
trapezoid sum.  Targets closer to the source than a tenth of the node
spacing raise a NearSingularWarning; the result is still returned.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry, spectral

NEAR_SINGULAR_FRACTION = 0.1


class NearSingularWarning(UserWarning):
    """A cross-curve target sits closer to the source than the quadrature resolves."""


@dataclass(frozen=True)
class CurveQuadrature:
    """Per-curve node data and self-interaction tables, built once per geometry."""

    curve: geometry.InterfaceCurve
    points: np.ndarray        # (N, 2) marker positions
    normals: np.ndarray       # (N, 2) outward unit normals
    kappa: np.ndarray         # (N,) curvature
    log_remainder: np.ndarray  # (N, N) smooth log remainder, diag = ln(s_alpha)
    dipole_kernel: np.ndarray  # (N, N) double-layer kernel incl. diagonal

    @property
    def n(self) -> int:
        return self.curve.n

    @property
    def s_alpha(self) -> float:
        return self.curve.s_alpha

    @property
    def h(self) -> float:
        return 2.0 * np.pi / self.curve.n


def build_quadrature(curve: geometry.InterfaceCurve) -> CurveQuadrature:
    x = geometry.markers(curve)
    nrm, _ = geometry.normal_tangent(curve)
    kap = geometry.curvature(curve)
    n = curve.n
    alpha = spectral.grid(n)

    dx = x[:, None, 0] - x[None, :, 0]
    dy = x[:, None, 1] - x[None, :, 1]
    r2 = dx * dx + dy * dy
    off = ~np.eye(n, dtype=bool)

    sinfac = 2.0 * np.abs(np.sin(0.5 * (alpha[:, None] - alpha[None, :])))
    rem = np.empty((n, n))
    rem[off] = 0.5 * np.log(r2[off] / sinfac[off] ** 2)
    np.fill_diagonal(rem, np.log(curve.s_alpha))

    # (x' - x) . n' / |x' - x|^2 / (2 pi), diagonal limit kappa/(4 pi)
    dip = np.empty((n, n))
    dip[off] = -(dx * nrm[None, :, 0] + dy * nrm[None, :, 1])[off] / (
        2.0 * np.pi * r2[off]
    )
    np.fill_diagonal(dip, kap / (4.0 * np.pi))

    return CurveQuadrature(curve=curve, points=x, normals=nrm, kappa=kap,
                           log_remainder=rem, dipole_kernel=dip)


def _as_quadrature(src) -> CurveQuadrature:
    return src if isinstance(src, CurveQuadrature) else build_quadrature(src)


def _check_density(f, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (n,):
        raise ValueError(f"density has shape {f.shape}, expected ({n},)")
    return f


def _log_multiplier(g: np.ndarray) -> np.ndarray:
    """Convolution with ln 2|sin((a-a')/2)|: multiplier -pi/|k|, 0 on the mean."""
    n = g.shape[0]
    ghat = np.fft.rfft(g)
    k = np.arange(n // 2 + 1, dtype=float)
    k[0] = 1.0
    ghat *= -np.pi / k
    ghat[0] = 0.0
    return np.fft.irfft(ghat, n)


def _alternating_apply(kernel: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """2h * sum over source nodes of parity opposite to the target row."""
    even = kernel[:, 0::2] @ g[0::2]
    odd = kernel[:, 1::2] @ g[1::2]
    out = np.empty_like(g)
    out[0::2] = 2.0 * h * odd[0::2]
    out[1::2] = 2.0 * h * even[1::2]
    return out


def single_layer_self(density, src) -> np.ndarray:
    """Evaluate the single layer of `density` on its own curve nodes."""
    q = _as_quadrature(src)
    g = _check_density(density, q.n) * q.s_alpha
    singular = _log_multiplier(g)
    smooth = _alternating_apply(q.log_remainder, g, q.h)
    return (singular + smooth) / (2.0 * np.pi)


def single_layer_cross(density, src, targets) -> np.ndarray:
    """Single layer evaluated at points strictly off the source curve."""
    q = _as_quadrature(src)
    f = _check_density(density, q.n)
    t = np.atleast_2d(np.asarray(targets, dtype=float))
    dx = t[:, None, 0] - q.points[None, :, 0]
    dy = t[:, None, 1] - q.points[None, :, 1]
    r2 = dx * dx + dy * dy
    if r2.size and np.sqrt(r2.min()) < NEAR_SINGULAR_FRACTION * q.curve.length / q.n:
        warnings.warn("target within a tenth of the source node spacing",
                      NearSingularWarning, stacklevel=2)
    kernel = 0.5 * np.log(r2) / (2.0 * np.pi)
    return q.h * q.s_alpha * (kernel @ f)


def double_layer(density, src, targets=None, self_eval: bool = True,
                 alternating: bool = False) -> np.ndarray:
    """Evaluate the double layer; smooth kernel, so trapezoid suffices.

    With self_eval the targets are the source nodes and the diagonal uses
    the curvature limit; `alternating` switches to the alternating-point
    rule (both are spectrally accurate).  Off-curve targets must not
    coincide with source nodes.
    """
    q = _as_quadrature(src)
    f = _check_density(density, q.n)
    if self_eval:
        g = f * q.s_alpha
        if alternating:
            return _alternating_apply(q.dipole_kernel, g, q.h)
        return q.h * (q.dipole_kernel @ g)
    t = np.atleast_2d(np.asarray(targets, dtype=float))
    dx = t[:, None, 0] - q.points[None, :, 0]
    dy = t[:, None, 1] - q.points[None, :, 1]
    r2 = dx * dx + dy * dy
    if np.any(r2 == 0.0):
        raise ValueError("off-curve target coincides with a source node")
    kernel = -(dx * q.normals[None, :, 0] + dy * q.normals[None, :, 1]) / (
        2.0 * np.pi * r2
    )
    return q.h * q.s_alpha * (kernel @ f)


def min_separation(qa: CurveQuadrature, qb: CurveQuadrature) -> float:
    """Minimum node-to-node distance between two curves."""
    dx = qa.points[:, None, 0] - qb.points[None, :, 0]
    dy = qa.points[:, None, 1] - qb.points[None, :, 1]
    return float(np.sqrt((dx * dx + dy * dy).min()))
