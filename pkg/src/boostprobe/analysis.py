"""Amplitude and frequency extraction from ``<x>(t)`` and the calibration fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import periodogram

from .errors import CalibrationError, DegenerateFitError, NoPeakError

_PAD_FACTOR = 16
_FLAT_POWER = 1e-24


@dataclass(frozen=True)
class OscillationMetrics:
    amplitude: float = 0.0
    frequency: float = 0.0
    smoothing_window: int = 1
    method: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    residuals: np.ndarray


def moving_average(series, window):
    """Centred moving mean; edge samples use the widest symmetric window that fits."""
    y = np.asarray(series, dtype=float)
    n = y.size
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    if window > n:
        raise ValueError(f"window {window} longer than series ({n} samples)")
    if window == 1:
        return y.copy()
    idx = np.arange(n)
    half = np.minimum(window // 2, np.minimum(idx, n - 1 - idx))
    csum = np.concatenate([[0.0], np.cumsum(y)])
    return (csum[idx + half + 1] - csum[idx - half]) / (2 * half + 1)


def _signal(ts):
    return np.asarray(ts.times, dtype=float), np.asarray(ts.mean_x, dtype=float)


def default_window(ts):
    """Odd sample count spanning about 1/20 of the dominant period (1 if none)."""
    times, y = _signal(ts)
    if y.size < 4:
        return 1
    try:
        omega = extract_frequency(ts).frequency
    except NoPeakError:
        return 1
    dt = times[1] - times[0]
    w = int(round(2.0 * math.pi / omega / 20.0 / dt))
    w = max(1, w if w % 2 else w - 1 if w > 1 else 1)
    return min(w, y.size if y.size % 2 else y.size - 1)


def extract_amplitude(ts, window=None):
    """Half the peak-to-peak range of the smoothed ``<x>/a`` over the record."""
    if window is None:
        window = default_window(ts)
    _, y = _signal(ts)
    smooth = moving_average(y, window)
    amp = 0.5 * float(smooth.max() - smooth.min()) if smooth.size else 0.0
    return OscillationMetrics(
        amplitude=amp,
        smoothing_window=int(window),
        method={"amplitude": "half_peak_to_peak", "smoothing": "centered_moving_average",
                "window_span": [float(ts.times[0]), float(ts.times[-1])]},
    )


def extract_frequency(ts):
    """Angular frequency of the strongest nonzero periodogram peak.

    The record has its mean removed, is Hann-windowed and zero padded; the
    peak bin is refined by a parabola through the log-power of its
    neighbours.
    """
    times, y = _signal(ts)
    if y.size < 4:
        raise NoPeakError("need at least 4 samples")
    dt = times[1] - times[0]
    nfft = _PAD_FACTOR * y.size
    freqs, power = periodogram(y, fs=1.0 / dt, window="hann", nfft=nfft, detrend="constant")
    if power.size < 3 or np.max(power[1:]) <= _FLAT_POWER * max(1.0, np.sum(y**2)):
        raise NoPeakError("spectrum is flat; signal is not oscillatory")
    k = 1 + int(np.argmax(power[1:]))
    df = freqs[1] - freqs[0]
    f = freqs[k]
    if 1 < k < power.size - 1 and np.all(power[k - 1:k + 2] > 0):
        lo, mid, hi = np.log(power[k - 1:k + 2])
        denom = lo - 2.0 * mid + hi
        if denom < 0:
            f += 0.5 * (lo - hi) / denom * df
    # a peak within half a natural bin of zero is drift, not a tone
    if k <= _PAD_FACTOR // 2:
        raise NoPeakError("no peak separated from zero frequency")
    return OscillationMetrics(frequency=2.0 * math.pi * f,
                              method={"frequency": "hann_periodogram_parabolic",
                                      "pad_factor": _PAD_FACTOR})


def linear_fit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise DegenerateFitError("need two equal-length vectors with at least 2 points")
    if np.ptp(x) == 0:
        raise DegenerateFitError("all x values are equal")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return FitResult(float(slope), float(intercept), r_squared(y, resid), resid)


def r_squared(y, resid):
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    ss_res = float(np.sum(resid**2))
    if ss_tot == 0.0:
        return 1.0 if ss_res <= 1e-24 else 0.0
    return max(0.0, 1.0 - ss_res / ss_tot)


def sine_fit(phases, values):
    """Least-squares ``c sin(phase)`` with no offset; ``slope`` holds ``c``."""
    s = np.sin(np.asarray(phases, dtype=float))
    y = np.asarray(values, dtype=float)
    denom = float(s @ s)
    if denom <= 1e-24 * max(1, s.size):
        raise DegenerateFitError("all phases are multiples of pi")
    c = float(s @ y) / denom
    resid = y - c * s
    return FitResult(c, 0.0, r_squared(y, resid), resid)


def tb_frequency(ka, J, n_sites, hbar=1.0):
    """Wave-packet oscillation frequency ``(2 pi/(M-1)) (J/hbar) sin(ka)``."""
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2")
    return 2.0 * np.pi / (n_sites - 1) * (J / hbar) * np.sin(ka)


@dataclass(frozen=True)
class CondensateCalibration:
    """Affine amplitude -> condensate-fraction map through two reference runs."""

    amp_sf: float
    amp_mi: float
    n_mi: float

    def __post_init__(self):
        if not self.amp_sf > self.amp_mi >= 0:
            raise CalibrationError("need amp_sf > amp_mi >= 0")
        if not 0.0 < self.n_mi < 1.0:
            raise CalibrationError("n_mi must lie in (0, 1)")

    def raw(self, amplitude):
        return self.n_mi + (1.0 - self.n_mi) * (amplitude - self.amp_mi) / (self.amp_sf - self.amp_mi)

    def forward(self, n):
        """Amplitude predicted for condensate fraction ``n``."""
        return self.amp_mi + (n - self.n_mi) * (self.amp_sf - self.amp_mi) / (1.0 - self.n_mi)

    def __call__(self, amplitude):
        """Return ``(n_hat, out_of_range)`` with ``n_hat`` clamped to [0, 1]."""
        n = self.raw(amplitude)
        return min(1.0, max(0.0, n)), bool(n < 0.0 or n > 1.0)


def calibrate_condensate_probe(amp_sf, amp_mi, n_mi):
    return CondensateCalibration(float(amp_sf), float(amp_mi), float(n_mi))
