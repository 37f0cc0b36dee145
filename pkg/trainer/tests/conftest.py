"""Fixtures: hand-rolled batch files and synthetic separable classes.

Batch bytes are assembled with struct/json directly (not via any reader or
writer under test), so the format tests check the documented wire layout.
"""

import json
import struct

import numpy as np
import pytest


def batch_bytes(ids, signals, labels, rate=50.0, fingerprint=""):
    signals = np.asarray(signals, dtype="<f4")
    header = {
        "count": len(ids),
        "length": int(signals.shape[1]) if len(ids) else 0,
        "rate_hz": rate,
        "ids": list(ids),
        "labels": [None if l is None else int(l) for l in labels],
        "policy_fingerprint": fingerprint,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    return b"ECGB0001" + struct.pack("<I", len(blob)) + blob + signals.tobytes()


def separable_signals(n, length=512, seed=0):
    """Four classes with distinct dominant frequencies; easy to memorize."""
    rng = np.random.default_rng(seed)
    freqs = (1.0, 3.0, 6.0, 11.0)
    ids, rows, labels = [], [], []
    t = np.arange(length) / 50.0
    for i in range(n):
        cls = i % 4
        phase = rng.uniform(0, 2 * np.pi)
        wave = np.sin(2 * np.pi * freqs[cls] * t + phase) + rng.normal(0, 0.05, length)
        ids.append(f"A{i:05d}")
        rows.append(wave.astype(np.float32))
        labels.append(cls)
    return ids, np.stack(rows), labels


@pytest.fixture
def tiny_batch_file(tmp_path):
    ids, signals, labels = separable_signals(16, length=128, seed=5)
    path = tmp_path / "tiny.ecgb"
    path.write_bytes(batch_bytes(ids, signals, labels))
    return path
