"""The thirteen waveform augmentation transforms.

Every op is a deterministic pure function of (signal, fully-specified
parameters): all randomness lives in the policy engine, which samples an
:class:`OpParams` bundle and hands it to :func:`apply_op`.  The two ops that
need noise (drop, partial white noise) take an explicit 64-bit seed and
derive their own counter-based generator from it, so identical parameters
give bit-identical output on any thread.

Every op preserves the signal's lead count, length, and sample rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .core import Signal
from .errors import SignalError
from .fir import DEFAULT_TAPS, convolve_same, design_highpass, design_lowpass


class OpKind(Enum):
    """The thirteen transform kinds."""

    ERASE = "erase"
    SCALE = "scale"
    FLIP = "flip"
    DROP = "drop"
    CUTOUT = "cutout"
    SHIFT = "shift"
    SINE = "sine"
    SQUARE = "square"
    PARTIAL_SINE = "partial_sine"
    PARTIAL_SQUARE = "partial_square"
    PARTIAL_WHITE_NOISE = "partial_white_noise"
    FIR_LOW = "fir_low"
    FIR_HIGH = "fir_high"

    @classmethod
    def from_name(cls, name: str) -> "OpKind":
        try:
            return cls(name)
        except ValueError:
            raise SignalError(f"unknown op kind {name!r}") from None


ALL_OP_KINDS: tuple[OpKind, ...] = tuple(OpKind)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class OpParams:
    """Concrete parameters for one op application.

    Only the fields relevant to ``kind`` are meaningful; the rest stay None.
    ``identity`` marks the do-nothing configuration that every kind collapses
    to at zero magnitude (some kinds, like flip, have no parameter value that
    would otherwise make them a no-op).
    """

    kind: OpKind
    identity: bool = False
    lead_index: Optional[int] = None          # erase
    factor: Optional[float] = None            # scale
    drop_prob: Optional[float] = None         # drop
    drop_mask_seed: Optional[int] = None      # drop
    start: Optional[int] = None               # cutout / partial_*
    length: Optional[int] = None              # cutout / partial_*
    offset: Optional[int] = None              # shift
    amplitude: Optional[float] = None         # sine / square / partial variants
    freq_hz: Optional[float] = None           # sine / square / partial variants
    phase_rad: Optional[float] = None         # sine / square / partial variants
    sigma: Optional[float] = None             # partial_white_noise
    noise_seed: Optional[int] = None          # partial_white_noise
    cutoff_hz: Optional[float] = None         # fir_low / fir_high


def _copy_leads(signal: Signal) -> np.ndarray:
    return np.array(signal.leads, copy=True)


def _check_interval(signal: Signal, start: int, length: int) -> None:
    if length < 0:
        raise SignalError(f"interval length must be >= 0, got {length}")
    if start < 0 or start + length > signal.num_samples:
        raise SignalError(
            f"interval [{start}, {start + length}) out of range for length {signal.num_samples}"
        )


def erase(signal: Signal, lead_index: int) -> Signal:
    """Zero out one lead entirely; other leads are untouched."""
    if not (0 <= lead_index < signal.num_leads):
        raise SignalError(f"lead index {lead_index} out of range for {signal.num_leads} leads")
    out = _copy_leads(signal)
    out[lead_index, :] = 0
    return Signal(signal.sample_rate_hz, out)


def scale(signal: Signal, factor: float) -> Signal:
    """Multiply every sample by a constant factor."""
    if not np.isfinite(factor):
        raise SignalError(f"scale factor must be finite, got {factor}")
    if factor == 1.0:
        return Signal(signal.sample_rate_hz, signal.leads)
    return Signal(signal.sample_rate_hz, signal.leads * factor)


def flip(signal: Signal) -> Signal:
    """Negate every sample (up-down flip)."""
    return Signal(signal.sample_rate_hz, -signal.leads)


def drop(signal: Signal, drop_prob: float, drop_mask_seed: int) -> Signal:
    """Zero each sample independently with probability ``drop_prob``.

    The Bernoulli mask is fully determined by ``drop_mask_seed``.
    """
    if not (0.0 <= drop_prob <= 1.0):
        raise SignalError(f"drop probability must be in [0, 1], got {drop_prob}")
    if drop_prob == 0.0:
        return Signal(signal.sample_rate_hz, signal.leads)
    rng = np.random.Generator(np.random.Philox(key=drop_mask_seed & _MASK64))
    mask = rng.random(signal.leads.shape) < drop_prob
    out = _copy_leads(signal)
    out[mask] = 0
    return Signal(signal.sample_rate_hz, out)


def cutout(signal: Signal, start: int, length: int) -> Signal:
    """Zero the samples in [start, start+length) on all leads."""
    _check_interval(signal, start, length)
    if length == 0:
        return Signal(signal.sample_rate_hz, signal.leads)
    out = _copy_leads(signal)
    out[:, start:start + length] = 0
    return Signal(signal.sample_rate_hz, out)


def shift(signal: Signal, offset: int) -> Signal:
    """Translate content in time; the vacated region is zero-filled.

    Positive offsets move content later (zeros enter at the head), negative
    offsets earlier (zeros enter at the tail).  Length is unchanged.
    """
    if offset == 0:
        return Signal(signal.sample_rate_hz, signal.leads)
    t = signal.num_samples
    out = np.zeros_like(signal.leads)
    if abs(offset) < t:
        if offset > 0:
            out[:, offset:] = signal.leads[:, :t - offset]
        else:
            out[:, :t + offset] = signal.leads[:, -offset:]
    return Signal(signal.sample_rate_hz, out)


def _wave_window(signal: Signal, start: int, length: int) -> np.ndarray:
    # Absolute time indices, so a partial wave is the full wave masked to
    # its interval rather than re-phased at the interval start.
    return np.arange(start, start + length, dtype=np.float64)


def _additive_dtype(signal: Signal) -> np.dtype:
    # Additive ops on integer (raw-count) signals promote to float32.
    dtype = signal.leads.dtype
    return dtype if np.issubdtype(dtype, np.floating) else np.dtype(np.float32)


def _add_wave(
    signal: Signal,
    amplitude: float,
    freq_hz: float,
    phase_rad: float,
    start: int,
    length: int,
    square: bool,
) -> Signal:
    _check_interval(signal, start, length)
    if amplitude == 0.0 or length == 0:
        return Signal(signal.sample_rate_hz, signal.leads)
    t = _wave_window(signal, start, length)
    arg = 2.0 * np.pi * freq_hz * t / signal.sample_rate_hz + phase_rad
    if square:
        wave = amplitude * np.where(np.sin(arg) >= 0.0, 1.0, -1.0)
    else:
        wave = amplitude * np.sin(arg)
    out = signal.leads.astype(np.float64, copy=True)
    out[:, start:start + length] += wave
    return Signal(signal.sample_rate_hz, out.astype(_additive_dtype(signal)))


def add_sine(signal: Signal, amplitude: float, freq_hz: float, phase_rad: float) -> Signal:
    """Add a sinusoid over the whole signal."""
    return _add_wave(signal, amplitude, freq_hz, phase_rad, 0, signal.num_samples, square=False)


def partial_sine(
    signal: Signal, amplitude: float, freq_hz: float, phase_rad: float, start: int, length: int
) -> Signal:
    """Add a sinusoid over [start, start+length) only."""
    return _add_wave(signal, amplitude, freq_hz, phase_rad, start, length, square=False)


def add_square(signal: Signal, amplitude: float, freq_hz: float, phase_rad: float) -> Signal:
    """Add a 50%-duty square wave over the whole signal (sign of the sine, 0 -> +1)."""
    return _add_wave(signal, amplitude, freq_hz, phase_rad, 0, signal.num_samples, square=True)


def partial_square(
    signal: Signal, amplitude: float, freq_hz: float, phase_rad: float, start: int, length: int
) -> Signal:
    """Add a 50%-duty square wave over [start, start+length) only."""
    return _add_wave(signal, amplitude, freq_hz, phase_rad, start, length, square=True)


def partial_white_noise(
    signal: Signal, start: int, length: int, sigma: float, noise_seed: int
) -> Signal:
    """Add seed-deterministic Gaussian(0, sigma^2) noise on [start, start+length)."""
    _check_interval(signal, start, length)
    if sigma < 0:
        raise SignalError(f"noise sigma must be >= 0, got {sigma}")
    if sigma == 0.0 or length == 0:
        return Signal(signal.sample_rate_hz, signal.leads)
    rng = np.random.Generator(np.random.Philox(key=noise_seed & _MASK64))
    noise = rng.normal(0.0, sigma, size=(signal.num_leads, length))
    out = signal.leads.astype(np.float64, copy=True)
    out[:, start:start + length] += noise
    return Signal(signal.sample_rate_hz, out.astype(_additive_dtype(signal)))


def fir_low(signal: Signal, cutoff_hz: float, taps: int = DEFAULT_TAPS) -> Signal:
    """Lowpass-filter the signal with a windowed-sinc design at ``cutoff_hz``."""
    return convolve_same(signal, design_lowpass(cutoff_hz, signal.sample_rate_hz, taps))


def fir_high(signal: Signal, cutoff_hz: float, taps: int = DEFAULT_TAPS) -> Signal:
    """Highpass-filter the signal with a spectral-inversion design at ``cutoff_hz``."""
    return convolve_same(signal, design_highpass(cutoff_hz, signal.sample_rate_hz, taps))


def _require(params: OpParams, *fields: str):
    values = []
    for name in fields:
        value = getattr(params, name)
        if value is None:
            raise SignalError(f"{params.kind.value} params missing field {name!r}")
        values.append(value)
    return values


def apply_op(signal: Signal, params: OpParams) -> Signal:
    """Dispatch one fully-specified op application."""
    if params.identity:
        return Signal(signal.sample_rate_hz, signal.leads)
    kind = params.kind
    if kind is OpKind.ERASE:
        (lead_index,) = _require(params, "lead_index")
        return erase(signal, lead_index)
    if kind is OpKind.SCALE:
        (factor,) = _require(params, "factor")
        return scale(signal, factor)
    if kind is OpKind.FLIP:
        return flip(signal)
    if kind is OpKind.DROP:
        prob, seed = _require(params, "drop_prob", "drop_mask_seed")
        return drop(signal, prob, seed)
    if kind is OpKind.CUTOUT:
        start, length = _require(params, "start", "length")
        return cutout(signal, start, length)
    if kind is OpKind.SHIFT:
        (offset,) = _require(params, "offset")
        return shift(signal, offset)
    if kind is OpKind.SINE:
        amp, freq, phase = _require(params, "amplitude", "freq_hz", "phase_rad")
        return add_sine(signal, amp, freq, phase)
    if kind is OpKind.SQUARE:
        amp, freq, phase = _require(params, "amplitude", "freq_hz", "phase_rad")
        return add_square(signal, amp, freq, phase)
    if kind is OpKind.PARTIAL_SINE:
        amp, freq, phase, start, length = _require(
            params, "amplitude", "freq_hz", "phase_rad", "start", "length"
        )
        return partial_sine(signal, amp, freq, phase, start, length)
    if kind is OpKind.PARTIAL_SQUARE:
        amp, freq, phase, start, length = _require(
            params, "amplitude", "freq_hz", "phase_rad", "start", "length"
        )
        return partial_square(signal, amp, freq, phase, start, length)
    if kind is OpKind.PARTIAL_WHITE_NOISE:
        start, length, sigma, seed = _require(params, "start", "length", "sigma", "noise_seed")
        return partial_white_noise(signal, start, length, sigma, seed)
    if kind is OpKind.FIR_LOW:
        (cutoff,) = _require(params, "cutoff_hz")
        return fir_low(signal, cutoff)
    if kind is OpKind.FIR_HIGH:
        (cutoff,) = _require(params, "cutoff_hz")
        return fir_high(signal, cutoff)
    raise SignalError(f"unhandled op kind {kind!r}")
