"""Shared synthetic-data fixtures; no real dataset is required by the suite."""

import numpy as np
import pytest

from ecgaug import Label, Record, Signal


def synthetic_counts(length: int, seed: int) -> np.ndarray:
    """ECG-ish raw int16 counts: periodic spikes over drifting baseline."""
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    baseline = 40.0 * np.sin(2 * np.pi * t / 900.0 + rng.uniform(0, 2 * np.pi))
    spikes = np.zeros(length)
    period = int(rng.integers(220, 320))
    spikes[::period] = rng.uniform(350, 480)
    wave = baseline + np.convolve(spikes, np.hanning(21), mode="same")
    wave += rng.normal(0, 8.0, size=length)
    return np.clip(wave, -500, 500).astype(np.int16)


def make_raw_record(record_id: str = "A00001", length: int = 18300, seed: int = 0,
                    label: Label = Label.NORMAL) -> Record:
    return Record(record_id, Signal(300.0, synthetic_counts(length, seed)), label)


def make_processed_signal(seed: int, length: int = 3050, rate: float = 50.0) -> Signal:
    rng = np.random.default_rng(seed)
    return Signal(rate, rng.normal(0, 0.4, size=(1, length)).astype(np.float32))


def make_processed_record(record_id: str, seed: int, label: Label = Label.NORMAL) -> Record:
    return Record(record_id, make_processed_signal(seed), label)


@pytest.fixture
def raw_record() -> Record:
    return make_raw_record()


@pytest.fixture
def processed_record() -> Record:
    return make_processed_record("A00001", seed=1)
