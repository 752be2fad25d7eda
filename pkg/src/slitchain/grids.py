"""Grid helpers: spectral derivatives on periodic grids, centered differences."""

from __future__ import annotations

import numpy as np

__all__ = [
    "spectral_dx",
    "centered_dx",
    "centered_diff_axis",
    "second_diff_axis",
    "periodic_trapezoid",
]


def spectral_dx(values, dx, axis=-1):
    """d/dx of a real field sampled on a uniform periodic grid (FFT)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=dx)
    fhat = np.fft.rfft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = k.size
    return np.fft.irfft(fhat * (1j * k.reshape(shape)), n=n, axis=axis)


def centered_dx(values, dx, axis=-1):
    """Second-order centered derivative, one-sided second order at the ends."""
    return np.gradient(np.asarray(values, dtype=float), dx, axis=axis, edge_order=2)


def centered_diff_axis(values, spacing, axis):
    """(v[i+1] - v[i-1]) / (2 spacing) on the interior of ``axis``."""
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    out = (v[2:] - v[:-2]) / (2.0 * spacing)
    return np.moveaxis(out, 0, axis)


def second_diff_axis(values, spacing, axis):
    """(v[i+1] - 2 v[i] + v[i-1]) / spacing^2 on the interior of ``axis``."""
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    out = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / spacing**2
    return np.moveaxis(out, 0, axis)


def periodic_trapezoid(values, dx, axis=-1):
    """Integral over one period of a periodic sampled field."""
    return np.sum(np.asarray(values, dtype=float), axis=axis) * dx
