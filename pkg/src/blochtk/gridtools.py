"""Uniform-grid helpers: trigonometric interpolation and periodic derivatives."""
from __future__ import annotations

import numpy as np


def periodic_grid(period: float, n: int) -> np.ndarray:
    """n equispaced points 0, h, ..., period-h with h = period/n."""
    if n < 2:
        raise ValueError("grid needs at least 2 points")
    return np.arange(n) * (period / n)


def trig_interpolate(samples: np.ndarray, period: float, x: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited interpolant of periodic samples at arbitrary x.

    Samples must sit on periodic_grid(period, n).  The Nyquist mode (even n)
    is split symmetrically so real data stays real.
    """
    samples = np.asarray(samples, dtype=complex)
    n = samples.size
    c = np.fft.fft(samples) / n
    freqs = np.fft.fftfreq(n, d=1.0 / n)  # integer mode numbers
    x = np.atleast_1d(np.asarray(x, dtype=float))
    w = 2.0j * np.pi / period
    out = np.zeros(x.shape, dtype=complex)
    for m, cm in zip(freqs, c):
        if cm == 0:
            continue
        if n % 2 == 0 and m == -(n // 2):
            out += cm * np.cos(2.0 * np.pi * (n // 2) * x / period)
        else:
            out += cm * np.exp(w * m * x)
    return out


def periodic_derivatives(samples: np.ndarray, period: float) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivative of periodic grid data, 4th-order central stencils."""
    f = np.asarray(samples, dtype=complex)
    n = f.size
    if n < 5:
        raise ValueError("stencil needs at least 5 samples")
    h = period / n
    fp1, fm1 = np.roll(f, -1), np.roll(f, 1)
    fp2, fm2 = np.roll(f, -2), np.roll(f, 2)
    d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)
    d2 = (-fp2 + 16.0 * fp1 - 30.0 * f + 16.0 * fm1 - fm2) / (12.0 * h * h)
    return d1, d2


def spectral_derivatives(samples: np.ndarray, period: float) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivative via FFT differentiation (smooth data only)."""
    f = np.asarray(samples, dtype=complex)
    n = f.size
    k = 2.0j * np.pi / period * np.fft.fftfreq(n, d=1.0 / n)
    fh = np.fft.fft(f)
    d1 = np.fft.ifft(k * fh)
    d2 = np.fft.ifft(k * k * fh)
    return d1, d2
