"""Windowed-sinc FIR filter design and zero-phase application.

Lowpass filters are Hamming-windowed sinc prototypes normalized to unit DC
gain; highpass filters are their spectral inversion (negate all taps, add 1
to the center tap), which forces the DC gain to exactly zero.  Application
is linear-phase with the group delay compensated, so filtering never shifts
features in time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Signal
from .errors import SignalError

DEFAULT_TAPS = 31
# Longer kernel for decimation anti-aliasing: the stopband has to be reached
# before the fold-over frequency of the reduced rate.
ANTI_ALIAS_TAPS = 63


@dataclass(frozen=True)
class FirFilter:
    """Designed FIR filter: odd-length real taps plus design metadata."""

    coeffs: np.ndarray
    kind: str  # "lowpass" or "highpass"
    cutoff_hz: float
    design_rate_hz: float

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size < 3 or arr.size % 2 == 0:
            raise SignalError(f"filter taps must be an odd-length vector >= 3, got {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def taps(self) -> int:
        return self.coeffs.size

    def response_at(self, freq_hz: float) -> float:
        """Magnitude of the transfer function H(f) = sum c_k exp(-j2pi f k / rate)."""
        k = np.arange(self.taps)
        return float(abs(np.sum(self.coeffs * np.exp(-2j * np.pi * freq_hz * k / self.design_rate_hz))))


def _check_design_args(cutoff_hz: float, rate_hz: float, taps: int) -> None:
    if not (rate_hz > 0):
        raise SignalError(f"design rate must be positive, got {rate_hz}")
    if not (0 < cutoff_hz < rate_hz / 2):
        raise SignalError(
            f"cutoff {cutoff_hz} Hz out of (0, {rate_hz / 2}) for rate {rate_hz} Hz"
        )
    if taps < 3 or taps % 2 == 0:
        raise SignalError(f"taps must be an odd integer >= 3, got {taps}")


def design_lowpass(cutoff_hz: float, rate_hz: float, taps: int = DEFAULT_TAPS) -> FirFilter:
    """Hamming-windowed sinc lowpass, normalized to unit DC gain."""
    _check_design_args(cutoff_hz, rate_hz, taps)
    n = np.arange(taps) - (taps - 1) / 2
    ratio = 2.0 * cutoff_hz / rate_hz
    h = ratio * np.sinc(ratio * n)
    h *= np.hamming(taps)
    h /= h.sum()
    return FirFilter(h, "lowpass", float(cutoff_hz), float(rate_hz))


def design_highpass(cutoff_hz: float, rate_hz: float, taps: int = DEFAULT_TAPS) -> FirFilter:
    """Spectral inversion of the matching lowpass; DC is fully rejected."""
    lp = design_lowpass(cutoff_hz, rate_hz, taps)
    h = -np.array(lp.coeffs)
    h[(taps - 1) // 2] += 1.0
    return FirFilter(h, "highpass", float(cutoff_hz), float(rate_hz))


def convolve_same(signal: Signal, filt: FirFilter) -> Signal:
    """Apply a filter with zero-padded edges and group delay compensated.

    Output has the same length as the input; because the kernel is centered,
    a unit impulse maps to the taps centered at the impulse position.
    """
    if not np.isclose(filt.design_rate_hz, signal.sample_rate_hz):
        raise SignalError(
            f"filter designed for {filt.design_rate_hz} Hz cannot be applied "
            f"to a {signal.sample_rate_hz} Hz signal"
        )
    out = np.empty_like(signal.leads, dtype=np.float64)
    for i in range(signal.num_leads):
        out[i] = np.convolve(signal.leads[i].astype(np.float64), filt.coeffs, mode="same")
    return Signal(signal.sample_rate_hz, out.astype(np.float32))
