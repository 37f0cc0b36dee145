"""Reader for the ecgaug batch tensor wire format.

Layout (independent implementation of the documented format): 8-byte magic
``ECGB0001``, 4-byte little-endian header length, UTF-8 JSON header with
count / length / rate_hz / ids / labels / policy_fingerprint, then the
row-major float32 little-endian payload of shape (count, length).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"ECGB0001"

LABEL_CODES = ("N", "A", "O", "~")  # class order Normal, AF, Other, Noisy


class BatchFileError(Exception):
    """Malformed batch tensor file."""


@dataclass(frozen=True)
class BatchFile:
    """One decoded batch: ids, (count, length) float32 signals, labels."""

    ids: tuple[str, ...]
    signals: np.ndarray
    labels: np.ndarray  # int64 codes 0..3; -1 where unlabeled
    rate_hz: float
    policy_fingerprint: str

    def __len__(self) -> int:
        return len(self.ids)


def read_batch_file(path) -> BatchFile:
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 4 or data[:len(MAGIC)] != MAGIC:
        raise BatchFileError(f"{path}: missing {MAGIC!r} magic")
    (header_len,) = struct.unpack_from("<I", data, len(MAGIC))
    header_start = len(MAGIC) + 4
    header_end = header_start + header_len
    if len(data) < header_end:
        raise BatchFileError(f"{path}: truncated header")
    try:
        header = json.loads(data[header_start:header_end].decode("utf-8"))
        count = int(header["count"])
        length = int(header["length"])
        rate = float(header["rate_hz"])
        ids = tuple(str(i) for i in header["ids"])
        labels = [-1 if code is None else int(code) for code in header["labels"]]
    except (KeyError, TypeError, ValueError, UnicodeDecodeError,
            json.JSONDecodeError) as exc:
        raise BatchFileError(f"{path}: bad header: {exc}") from exc
    if count < 0 or length < 0 or len(ids) != count or len(labels) != count:
        raise BatchFileError(f"{path}: inconsistent header counts")
    payload = data[header_end:]
    if len(payload) != count * length * 4:
        raise BatchFileError(
            f"{path}: payload is {len(payload)} bytes, expected {count * length * 4}"
        )
    signals = np.frombuffer(payload, dtype="<f4").reshape((count, length)).copy()
    if not np.isfinite(signals).all():
        raise BatchFileError(f"{path}: non-finite samples in payload")
    if any(code != -1 and not 0 <= code <= 3 for code in labels):
        raise BatchFileError(f"{path}: label codes must be 0..3 or null")
    return BatchFile(
        ids=ids,
        signals=signals,
        labels=np.asarray(labels, dtype=np.int64),
        rate_hz=rate,
        policy_fingerprint=str(header.get("policy_fingerprint", "")),
    )
