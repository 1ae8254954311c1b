"""Periodogram PSD estimation and fixed-length spectral feature vectors.

Each window is turned into a length ``10 * B`` vector: for every channel a
one-sided periodogram at the window's mean sampling rate, averaged down to
``B`` bins. Binning happens in one-sided index space (normalized frequency
[0, 0.5]) so the feature dimension stays constant even though the sampling
rate varies from window to window.

No taper and no detrending: the DC bin is kept on purpose, it is what lets
the orientation channels encode a vehicle sitting upside-down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataValueError, InsufficientDataError
from .ingest import N_CHANNELS
from .windowing import STATUS_OK

DEFAULT_BINS = 16


@dataclass
class Psd:
    """One-sided power spectral density: ``values`` (units^2/Hz) and ``fs``."""

    values: np.ndarray
    fs: float


def periodogram(x, fs):
    """Plain (rectangular-window) periodogram of a real signal.

    Two-sided density |X[k]|^2 / (fs * N), folded to one side: interior bins
    doubled, DC and (even N) Nyquist kept single. Satisfies Parseval:
    sum(P) * fs / N == mean(x**2).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError(f"periodogram needs >= 2 samples, got {n}")
    if fs <= 0:
        raise ValueError(f"fs must be positive, got {fs}")
    if not np.all(np.isfinite(x)):
        raise DataValueError("periodogram input contains non-finite values")
    spec = np.fft.rfft(x)
    p = (spec.real ** 2 + spec.imag ** 2) / (fs * n)
    p[1:] *= 2.0
    if n % 2 == 0:
        p[-1] /= 2.0
    return Psd(values=p, fs=float(fs))


def bin_psd(psd, n_bins):
    """Average PSD values into ``n_bins`` index-space bins.

    Bin j covers indices floor(j*L/B) <= i < floor((j+1)*L/B); every index
    lands in exactly one bin and empty bins yield 0.
    """
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    values = psd.values
    L = values.shape[0]
    out = np.zeros(n_bins, dtype=np.float64)
    for j in range(n_bins):
        lo = (j * L) // n_bins
        hi = ((j + 1) * L) // n_bins
        if hi > lo:
            out[j] = values[lo:hi].mean()
    return out


def feature_vector(window, n_bins=DEFAULT_BINS):
    """Flattened 10 x B binned PSD for one scored window, channel-major.

    Channel c occupies indices [c*B, (c+1)*B). Raises on windows that were
    marked insufficient; callers keep those frames unscored.
    """
    if window.status != STATUS_OK:
        raise InsufficientDataError(
            f"frame {window.frame_index}: window has status {window.status!r}")
    out = np.empty(N_CHANNELS * n_bins, dtype=np.float64)
    for c in range(N_CHANNELS):
        psd = periodogram(window.channels[:, c], window.mean_rate)
        out[c * n_bins:(c + 1) * n_bins] = bin_psd(psd, n_bins)
    return out
