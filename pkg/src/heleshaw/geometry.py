"""Closed interface curves in the equal-arclength tangent-angle frame.

A curve is stored as (N, L, q, theta0, x_ref): the tangent angle at node j
is theta_j = alpha_j + q_j + theta0 with q zero-mean periodic, so the shape
winds once counterclockwise and every FFT below acts on genuinely periodic
data.  Positions follow from x_alpha = (L/2pi)(cos theta, sin theta); the
absolute position is pinned by x_ref, the tracked location of the alpha=0
marker.  With this orientation the normal n = (sin theta, -cos theta)
points out of the enclosed region.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from shapely.geometry import Polygon

from . import spectral


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse (optionally rotated by `angle` radians)."""

    center: tuple[float, float]
    a: float
    b: float
    angle: float = 0.0

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"degenerate ellipse: a={self.a}, b={self.b}")

    def point(self, t):
        t = np.asarray(t, dtype=float)
        u, v = self.a * np.cos(t), self.b * np.sin(t)
        c, s = np.cos(self.angle), np.sin(self.angle)
        return np.stack([self.center[0] + c * u - s * v,
                         self.center[1] + s * u + c * v], axis=-1)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        du, dv = -self.a * np.sin(t), self.b * np.cos(t)
        c, s = np.cos(self.angle), np.sin(self.angle)
        return np.stack([c * du - s * dv, s * du + c * dv], axis=-1)


@dataclass(frozen=True)
class PerturbedCircle:
    """Circle of given radius with a cosine perturbation amplitude*cos(mode*t)."""

    radius: float
    amplitude: float = 0.0
    mode: int = 0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"degenerate circle: radius={self.radius}")
        if abs(self.amplitude) >= self.radius:
            raise ValueError("perturbation amplitude must be smaller than the radius")
        if self.amplitude and self.mode < 1:
            raise ValueError("perturbation mode must be >= 1")

    def _r(self, t):
        return self.radius + self.amplitude * np.cos(self.mode * t)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        r = self._r(t)
        return np.stack([self.center[0] + r * np.cos(t),
                         self.center[1] + r * np.sin(t)], axis=-1)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        r = self._r(t)
        dr = -self.amplitude * self.mode * np.sin(self.mode * t)
        return np.stack([dr * np.cos(t) - r * np.sin(t),
                         dr * np.sin(t) + r * np.cos(t)], axis=-1)


Shape = Ellipse | PerturbedCircle


@dataclass(frozen=True)
class InterfaceCurve:
    """One closed phase-domain boundary in the equal-arclength frame."""

    n: int
    length: float
    q: np.ndarray
    theta0: float
    x_ref: np.ndarray

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"curve length must be positive, got {self.length}")
        q = spectral.validate_grid(self.q)
        if q.shape[0] != self.n:
            raise ValueError("q length does not match the node count")
        object.__setattr__(self, "q", _frozen(q - q.mean()))
        object.__setattr__(self, "theta0", float(self.theta0 + q.mean()))
        object.__setattr__(self, "x_ref", _frozen(np.asarray(self.x_ref, dtype=float)))

    @property
    def s_alpha(self) -> float:
        return self.length / (2.0 * np.pi)


@dataclass(frozen=True)
class InterfaceSystem:
    """M disjoint curves inside the disk of radius r_inf, with surface tension."""

    curves: tuple[InterfaceCurve, ...]
    r_inf: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        if len(self.curves) < 1:
            raise ValueError("an interface system needs at least one curve")
        if self.r_inf <= 0:
            raise ValueError("outer radius must be positive")
        if self.sigma <= 0:
            raise ValueError("surface tension must be positive")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def theta(curve: InterfaceCurve) -> np.ndarray:
    """Tangent-angle samples alpha + q + theta0."""
    return spectral.grid(curve.n) + curve.q + curve.theta0


def curvature(curve: InterfaceCurve) -> np.ndarray:
    """kappa = theta_alpha / s_alpha = (2pi/L)(1 + q_alpha)."""
    return (1.0 + spectral.fourier_derivative(curve.q)) / curve.s_alpha


def normal_tangent(curve: InterfaceCurve) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit normal (sin theta, -cos theta) and unit tangent (cos, sin)."""
    th = theta(curve)
    n = np.stack([np.sin(th), -np.cos(th)], axis=1)
    s = np.stack([np.cos(th), np.sin(th)], axis=1)
    return n, s


def markers(curve: InterfaceCurve) -> np.ndarray:
    """Recover the N marker positions, (N, 2).

    Spectral antiderivative of x_alpha = (L/2pi)(cos theta, sin theta); the
    mean of x_alpha is dropped, which enforces exact closure (for a closed
    curve it is zero up to round-off), and the constant is fixed so the
    alpha=0 marker sits at x_ref.
    """
    th = theta(curve)
    gx = spectral.periodic_antiderivative(np.cos(th))
    gy = spectral.periodic_antiderivative(np.sin(th))
    return curve.x_ref + curve.s_alpha * np.stack([gx, gy], axis=1)


def enclosed_area(curve: InterfaceCurve) -> float:
    """(1/2) closed integral of (x y_alpha - y x_alpha); positive for ccw."""
    th = theta(curve)
    x = markers(curve)
    xa = curve.s_alpha * np.cos(th)
    ya = curve.s_alpha * np.sin(th)
    h = 2.0 * np.pi / curve.n
    return 0.5 * h * float(np.sum(x[:, 0] * ya - x[:, 1] * xa))


def total_interior_area(system: InterfaceSystem) -> float:
    return sum(enclosed_area(c) for c in system.curves)


def distance_to_interfaces(points, curves) -> np.ndarray:
    """Distance from each query point to the nearest interface.

    Curves (InterfaceCurve objects or plain (N, 2) marker arrays) are
    evaluated through the trigonometric interpolant of their markers; a
    dense sampling seeds a Newton search for the foot point, so the result
    is accurate to round-off rather than to the node spacing.
    """
    from scipy.spatial import cKDTree

    series, dense_blocks, owner, alpha0 = [], [], [], []
    for ci, curve in enumerate(curves):
        b = curve if isinstance(curve, np.ndarray) else markers(curve)
        coef = np.fft.rfft(b, axis=0) / b.shape[0]
        k = np.arange(coef.shape[0], dtype=float)
        w = np.ones_like(k)
        w[1:-1] = 2.0
        series.append((coef, k, w))
        dense = np.linspace(0.0, 2.0 * np.pi, 16 * b.shape[0], endpoint=False)
        dense_blocks.append(np.real((np.exp(1j * np.outer(dense, k)) * w) @ coef))
        owner.extend([ci] * dense.shape[0])
        alpha0.append(dense)
    tree = cKDTree(np.vstack(dense_blocks))
    owner = np.asarray(owner)
    alpha0 = np.concatenate(alpha0)

    points = np.atleast_2d(np.asarray(points, dtype=float))
    _, idx = tree.query(points)
    out = np.empty(points.shape[0])
    for row, (p, j) in enumerate(zip(points, idx)):
        coef, k, w = series[owner[j]]
        a = alpha0[j]
        for _ in range(40):
            ph = np.exp(1j * a * k) * w
            x = np.real(ph @ coef)
            dx = np.real((ph * 1j * k) @ coef)
            ddx = np.real((ph * (1j * k) ** 2) @ coef)
            denom = float(dx @ dx + (x - p) @ ddx)
            if denom == 0.0:
                break
            step = float((x - p) @ dx) / denom
            a -= step
            if abs(step) < 1e-15:
                break
        out[row] = np.linalg.norm(np.real((np.exp(1j * a * k) * w) @ coef) - p)
    return out


def from_theta(n: int, length: float, theta_samples: np.ndarray,
               x_ref: np.ndarray) -> InterfaceCurve:
    """Build a curve from raw tangent-angle samples (used by the stepper)."""
    p = np.asarray(theta_samples, dtype=float) - spectral.grid(n)
    return InterfaceCurve(n=n, length=length, q=p - p.mean(),
                          theta0=float(p.mean()), x_ref=np.asarray(x_ref, dtype=float))


def resample_equal_arclength(shape: Shape, n: int, dense_factor: int = 32,
                             newton_tol: float = 1e-13) -> InterfaceCurve:
    """Place N markers equally spaced in arclength on an analytic shape.

    The cumulative arclength of the dense sampling is formed spectrally,
    then inverted per marker with Newton iterations on the truncated
    Fourier series of s(t), so the marker parameters are accurate to near
    round-off.
    """
    if n < 8 or n & (n - 1):
        raise ValueError(f"node count must be a power of two >= 8, got {n}")
    m = dense_factor * n
    t = 2.0 * np.pi * np.arange(m) / m
    speed = np.linalg.norm(shape.velocity(t), axis=1)

    ghat = np.fft.rfft(speed) / m
    mean_speed = ghat[0].real
    length = 2.0 * np.pi * mean_speed

    # truncated series of the oscillatory part of the arclength integral
    k = np.arange(1, m // 2 + 1, dtype=float)
    coef = ghat[1:] / (1j * k)
    keep = np.abs(coef) > 1e-17 * max(1.0, abs(mean_speed))
    coef, k = coef[keep], k[keep]

    def arclen(tt):
        osc = 2.0 * np.real(np.exp(1j * np.outer(tt, k)) @ coef)
        osc0 = 2.0 * np.real(np.sum(coef))
        return mean_speed * tt + osc - osc0

    # monotone initial guess from the dense table, then Newton
    s_dense = arclen(t)
    targets = length * np.arange(n) / n
    tj = np.interp(targets, np.append(s_dense, length), np.append(t, 2.0 * np.pi))
    for _ in range(60):
        resid = arclen(tj) - targets
        tj -= resid / np.linalg.norm(shape.velocity(tj), axis=1)
        if np.max(np.abs(resid)) < newton_tol * length:
            break
    else:
        raise RuntimeError("arclength inversion did not converge")

    pts = shape.point(tj)
    vel = shape.velocity(tj)
    th = np.unwrap(np.arctan2(vel[:, 1], vel[:, 0]))
    p = th - spectral.grid(n)

    curve = InterfaceCurve(n=n, length=float(length), q=p - p.mean(),
                           theta0=float(p.mean()), x_ref=pts[0])
    if not Polygon(pts).is_simple:
        raise ValueError("resampled marker polygon is self-intersecting")
    return curve
