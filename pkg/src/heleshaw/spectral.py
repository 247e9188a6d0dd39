"""Spectral primitives on uniform periodic grids of N = 2^n samples.

All physical-space data lives on the nodes alpha_j = 2*pi*j/N.  Spectra use
the one-sided rfft layout; the helpers `spectrum`/`samples` carry the 1/N
normalization so that coefficient moduli are on the scale of the function
values (this is the scale on which the cutoff filter tolerance acts).
"""
from __future__ import annotations

import numpy as np


def validate_grid(values) -> np.ndarray:
    """Check a nodal array: 1-D, finite, length a power of two >= 8."""
    f = np.asarray(values, dtype=float)
    if f.ndim != 1:
        raise ValueError(f"expected a 1-D nodal array, got shape {f.shape}")
    n = f.shape[0]
    if n < 8 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")
    if not np.all(np.isfinite(f)):
        raise ValueError("nodal values must be finite")
    return f


def grid(n: int) -> np.ndarray:
    """Nodes alpha_j = 2*pi*j/N, j = 0..N-1."""
    return 2.0 * np.pi * np.arange(n) / n


def spectrum(f: np.ndarray) -> np.ndarray:
    """Normalized one-sided spectrum, rfft(f)/N."""
    f = np.asarray(f, dtype=float)
    return np.fft.rfft(f) / f.shape[0]


def samples(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Inverse of `spectrum`."""
    return np.fft.irfft(coeffs * n, n)


def fourier_derivative(f, order: int = 1) -> np.ndarray:
    """Differentiate via the symbol (ik)^order.

    The Nyquist mode is zeroed for odd orders; it carries no usable phase
    information on the grid and would otherwise break realness.
    """
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    f = validate_grid(f)
    n = f.shape[0]
    k = np.arange(n // 2 + 1, dtype=float)
    fhat = np.fft.rfft(f) * (1j * k) ** order
    if order % 2:
        fhat[-1] = 0.0
    return np.fft.irfft(fhat, n)


def hilbert_transform(f) -> np.ndarray:
    """Periodic Hilbert transform: multiplier -i*sgn(k), zero on the mean.

    The Nyquist mode is annihilated as well: its transform samples to zero
    on this grid, so any real multiplier choice there is fictitious.
    """
    f = validate_grid(f)
    n = f.shape[0]
    fhat = np.fft.rfft(f)
    fhat[0] = 0.0
    fhat[1:] *= -1j
    fhat[-1] = 0.0
    return np.fft.irfft(fhat, n)


def periodic_antiderivative(f) -> np.ndarray:
    """Antiderivative of the oscillatory part of f, anchored to 0 at alpha=0.

    The mean of f integrates to a non-periodic linear term and is the
    caller's business.  Nyquist is dropped (odd symbol, as in the
    derivative).
    """
    f = validate_grid(f)
    n = f.shape[0]
    fhat = np.fft.rfft(f)
    k = np.arange(n // 2 + 1, dtype=float)
    k[0] = 1.0
    ghat = fhat / (1j * k)
    ghat[0] = 0.0
    ghat[-1] = 0.0
    g = np.fft.irfft(ghat, n)
    return g - g[0]


def krasny_filter(coeffs, tol: float) -> np.ndarray:
    """Zero every coefficient with modulus below tol; leave the rest alone."""
    if tol <= 0:
        raise ValueError("cutoff tolerance must be positive")
    c = np.asarray(coeffs, dtype=complex).copy()
    c[np.abs(c) < tol] = 0.0
    return c


def smoothing_filter(coeffs, strength: float = 10.0, order: int = 25) -> np.ndarray:
    """Damp high modes of an rfft-layout spectrum.

    Multiplier rho(k) = exp(-strength * (2|k|/N)^order): exp(-strength) at
    the Nyquist mode, within 1e-12 of unity below N/4.
    """
    c = np.asarray(coeffs, dtype=complex)
    m = c.shape[0]
    n = 2 * (m - 1)
    k = np.arange(m, dtype=float)
    return c * np.exp(-strength * (2.0 * k / n) ** order)
