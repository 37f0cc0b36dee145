"""Core waveform types and the CinC/Challenge 2017 preprocessing chain.

The raw challenge recordings are single-lead ADC counts at 300 Hz.  The
standard pipeline used throughout this package is

    scale_raw (divide by 500) -> decimate (300 Hz -> 50 Hz) -> pad_head (3050)

so every processed record is a 50 Hz, length-3050 waveform in normalized
amplitude units with its zero padding at the head.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from .errors import SignalError

RAW_RATE_HZ = 300.0
RAW_SCALE_DIVISOR = 500.0
DECIMATE_FACTOR = 6
TARGET_LEN = 3050


class Label(IntEnum):
    """Four-class rhythm label with stable integer codes."""

    NORMAL = 0
    AF = 1
    OTHER = 2
    NOISY = 3

    @property
    def code(self) -> str:
        """Single-character class code used by the reference label CSV."""
        return _LABEL_TO_CODE[self]

    @classmethod
    def from_code(cls, code: str) -> "Label":
        try:
            return _CODE_TO_LABEL[code]
        except KeyError:
            raise SignalError(f"unknown label code {code!r}") from None


_LABEL_TO_CODE = {Label.NORMAL: "N", Label.AF: "A", Label.OTHER: "O", Label.NOISY: "~"}
_CODE_TO_LABEL = {v: k for k, v in _LABEL_TO_CODE.items()}


@dataclass(frozen=True, eq=False)
class Signal:
    """A multi-lead sampled waveform.

    ``leads`` is an (L, T) array: L recording channels of T samples each.
    The array is copied and frozen at construction; every transform in this
    package returns a new Signal, so values can be shared freely across
    worker threads.
    """

    sample_rate_hz: float
    leads: np.ndarray

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Signal)
            and self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.leads, other.leads)
        )

    def __post_init__(self):
        if not (self.sample_rate_hz > 0):
            raise SignalError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        arr = np.array(self.leads, copy=True)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2:
            raise SignalError(f"leads must be a 1-D or 2-D array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise SignalError(f"leads must be at least 1x1, got shape {arr.shape}")
        finite = np.isfinite(arr)
        if not finite.all():
            lead, idx = np.argwhere(~finite)[0]
            raise SignalError(
                f"non-finite sample {arr[lead, idx]!r} at lead {lead}, index {idx}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "leads", arr)

    @property
    def num_leads(self) -> int:
        return self.leads.shape[0]

    @property
    def num_samples(self) -> int:
        return self.leads.shape[1]

    @property
    def duration_s(self) -> float:
        return self.num_samples / self.sample_rate_hz


@dataclass(frozen=True)
class Record:
    """A signal with its dataset identity: the atom of every manifest."""

    id: str
    signal: Signal
    label: Optional[Label] = None

    def __post_init__(self):
        if not self.id:
            raise SignalError("record id must be non-empty")


def scale_raw(signal: Signal, divisor: float = RAW_SCALE_DIVISOR) -> Signal:
    """Divide raw ADC counts by the dynamic-range divisor (default 500).

    Output samples are 32-bit floats in normalized amplitude units; the
    sample rate and shape are unchanged.
    """
    if not (divisor > 0):
        raise SignalError(f"divisor must be positive, got {divisor}")
    scaled = (signal.leads.astype(np.float64) / divisor).astype(np.float32)
    return Signal(signal.sample_rate_hz, scaled)


def decimate(signal: Signal, factor: int, anti_alias: bool = True) -> Signal:
    """Downsample by an integer factor, keeping every ``factor``-th sample.

    Output length is ceil(T / factor) and the sample rate is divided by
    ``factor``.  With ``anti_alias`` set (the default), a lowpass filter with
    cutoff at 0.4x the output rate is applied before index selection so
    content above the new Nyquist does not fold back.
    """
    if factor < 1:
        raise SignalError(f"decimation factor must be >= 1, got {factor}")
    if factor == 1:
        return signal
    out_rate = signal.sample_rate_hz / factor
    source = signal
    if anti_alias:
        from .fir import ANTI_ALIAS_TAPS, convolve_same, design_lowpass

        lp = design_lowpass(0.4 * out_rate, signal.sample_rate_hz, taps=ANTI_ALIAS_TAPS)
        source = convolve_same(signal, lp)
    picked = source.leads[:, ::factor]
    return Signal(out_rate, picked)


def pad_head(signal: Signal, target_len: int = TARGET_LEN) -> Signal:
    """Left-pad every lead with zeros until the length reaches ``target_len``.

    Refuses to truncate: a signal longer than the target is an error.
    """
    t = signal.num_samples
    if t > target_len:
        raise SignalError(
            f"signal length {t} exceeds target length {target_len}; refusing to truncate"
        )
    if t == target_len:
        return signal
    padded = np.zeros((signal.num_leads, target_len), dtype=signal.leads.dtype)
    padded[:, target_len - t:] = signal.leads
    return Signal(signal.sample_rate_hz, padded)


def preprocess(
    record: Record,
    divisor: float = RAW_SCALE_DIVISOR,
    factor: int = DECIMATE_FACTOR,
    target_len: int = TARGET_LEN,
    expected_rate_hz: Optional[float] = RAW_RATE_HZ,
    anti_alias: bool = True,
) -> Record:
    """Full preprocessing chain: scale -> decimate -> pad_head.

    Expects a raw-count record at ``expected_rate_hz`` (pass None to skip the
    rate guard).  Id and label are preserved; the output signal is
    ``target_len`` samples at rate/factor in normalized units.
    """
    sig = record.signal
    if expected_rate_hz is not None and not math.isclose(sig.sample_rate_hz, expected_rate_hz):
        raise SignalError(
            f"record {record.id}: expected raw rate {expected_rate_hz} Hz, "
            f"got {sig.sample_rate_hz} Hz (already preprocessed?)"
        )
    sig = scale_raw(sig, divisor)
    sig = decimate(sig, factor, anti_alias=anti_alias)
    sig = pad_head(sig, target_len)
    return Record(record.id, sig, record.label)
