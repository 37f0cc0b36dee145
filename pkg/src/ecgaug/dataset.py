"""Dataset ingestion, manifests, seeded splits, and batch tensor files.

The CinC/Challenge 2017 public set ships each recording as a Level-4 matrix
container (the classic binary .mat layout): a 20-byte header of five 32-bit
little-endian integers (type, rows, cols, imaginary flag, name length),
the NUL-terminated matrix name, then the column-major numeric payload.
Reference labels come as a two-column CSV of (record id, class code).

Manifests are line-oriented text so splits diff cleanly; batch tensor files
are the bit-exact hand-off format for model training.
"""

from __future__ import annotations

import csv
import io
import json
import os
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import Label, Record, Signal
from .errors import (
    BatchFormatError,
    ContainerComplexError,
    ContainerError,
    ContainerTruncatedError,
    ContainerTypeError,
    LabelsError,
    ManifestError,
    SignalError,
    SplitError,
)

# ---------------------------------------------------------------------------
# Level-4 matrix container
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<5i")
# type code digits (M O P T): M = byte order / machine, P = payload precision,
# T = matrix class.  Only IEEE little-endian (M=0) full numeric (T=0)
# matrices of int16 (P=3) or float64 (P=0) are supported.
_PRECISION_DTYPES = {0: np.dtype("<f8"), 3: np.dtype("<i2")}
_MAX_NAME_LEN = 256
_MAX_PAYLOAD_BYTES = 64 * 1024 * 1024  # sanity ceiling against corrupt headers


@dataclass(frozen=True)
class ParsedMatrix:
    """One named matrix recovered from a container byte stream."""

    name: str
    values: np.ndarray  # (rows, cols); int16 payloads stay raw counts


def parse_matrix_container(data: bytes) -> ParsedMatrix:
    """Decode a single-matrix container, never reading past declared sizes.

    Raises a :class:`ContainerError` subclass for every malformation:
    truncation, unsupported type code, complex flag, bad name, size
    inconsistencies, or trailing bytes.
    """
    if len(data) < _HEADER.size:
        raise ContainerTruncatedError(
            f"container header needs {_HEADER.size} bytes, got {len(data)}"
        )
    type_code, rows, cols, imagf, namlen = _HEADER.unpack_from(data)

    if type_code < 0 or type_code > 9999:
        raise ContainerTypeError(f"type code {type_code} out of range")
    machine, rest = divmod(type_code, 1000)
    order_digit, rest = divmod(rest, 100)
    precision, matrix_class = divmod(rest, 10)
    if machine != 0:
        raise ContainerTypeError(f"unsupported byte-order digit {machine} in type {type_code}")
    if order_digit != 0 or matrix_class != 0:
        raise ContainerTypeError(f"unsupported matrix kind in type code {type_code}")
    if precision not in _PRECISION_DTYPES:
        raise ContainerTypeError(f"unsupported precision digit {precision} in type {type_code}")
    if imagf == 1:
        raise ContainerComplexError("imaginary flag set; complex matrices unsupported")
    if imagf != 0:
        raise ContainerError(f"imaginary flag must be 0 or 1, got {imagf}")
    if rows < 0 or cols < 0:
        raise ContainerError(f"negative dimensions {rows}x{cols}")
    if namlen < 1 or namlen > _MAX_NAME_LEN:
        raise ContainerError(f"name length {namlen} out of range [1, {_MAX_NAME_LEN}]")

    dtype = _PRECISION_DTYPES[precision]
    payload_bytes = rows * cols * dtype.itemsize
    if payload_bytes > _MAX_PAYLOAD_BYTES:
        raise ContainerError(
            f"declared payload {payload_bytes} bytes exceeds {_MAX_PAYLOAD_BYTES} ceiling"
        )

    name_end = _HEADER.size + namlen
    if len(data) < name_end:
        raise ContainerTruncatedError(f"name field truncated (need {name_end} bytes)")
    raw_name = data[_HEADER.size:name_end]
    if raw_name[-1] != 0:
        raise ContainerError("matrix name is not NUL-terminated")
    try:
        name = raw_name[:-1].decode("ascii")
    except UnicodeDecodeError:
        raise ContainerError("matrix name is not ASCII") from None

    payload_end = name_end + payload_bytes
    if len(data) < payload_end:
        raise ContainerTruncatedError(
            f"payload truncated: declared {payload_bytes} bytes, got {len(data) - name_end}"
        )
    if len(data) > payload_end:
        raise ContainerError(f"{len(data) - payload_end} trailing bytes after payload")

    flat = np.frombuffer(data, dtype=dtype, count=rows * cols, offset=name_end)
    values = flat.reshape((rows, cols), order="F")
    return ParsedMatrix(name=name, values=values)


def build_matrix_container(name: str, values: np.ndarray) -> bytes:
    """Encode one named matrix (int16 or float64) as container bytes."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ContainerError(f"matrix must be 2-D, got ndim={arr.ndim}")
    if arr.dtype == np.int16:
        precision = 3
    elif arr.dtype == np.float64:
        precision = 0
    else:
        raise ContainerTypeError(f"unsupported dtype {arr.dtype}; use int16 or float64")
    encoded_name = name.encode("ascii") + b"\x00"
    if not (1 <= len(encoded_name) <= _MAX_NAME_LEN):
        raise ContainerError(f"name length {len(encoded_name)} out of range")
    header = _HEADER.pack(precision * 10, arr.shape[0], arr.shape[1], 0, len(encoded_name))
    payload = np.asfortranarray(arr).tobytes(order="F")
    return header + encoded_name + payload


def signal_from_matrix(matrix: ParsedMatrix, sample_rate_hz: float) -> Signal:
    """Interpret a parsed matrix as leads x samples (vectors become one lead)."""
    values = matrix.values
    if values.size == 0:
        raise ContainerError(f"matrix {matrix.name!r} is empty")
    if values.shape[0] == 1:
        leads = values
    elif values.shape[1] == 1:
        leads = values.T
    else:
        leads = values
    return Signal(sample_rate_hz, leads)


# ---------------------------------------------------------------------------
# Reference labels
# ---------------------------------------------------------------------------

def load_labels(csv_bytes: bytes) -> dict[str, Label]:
    """Parse the two-column (record id, class code) reference CSV."""
    try:
        text = csv_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LabelsError(f"label CSV is not UTF-8: {exc}") from exc
    labels: dict[str, Label] = {}
    for row_num, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row:
            continue
        if len(row) < 2:
            raise LabelsError(f"row {row_num}: expected two columns, got {row!r}")
        record_id, code = row[0].strip(), row[1].strip()
        if not record_id:
            raise LabelsError(f"row {row_num}: empty record id")
        if record_id in labels:
            raise LabelsError(f"row {row_num}: duplicate record id {record_id!r}")
        if code not in ("N", "A", "O", "~"):
            raise LabelsError(f"row {row_num}: unknown class code {code!r}")
        labels[record_id] = Label.from_code(code)
    return labels


# ---------------------------------------------------------------------------
# Manifests
# ---------------------------------------------------------------------------

_MANIFEST_MAGIC = "# ecgaug-manifest v1"


@dataclass(frozen=True)
class ManifestEntry:
    record_id: str
    path: str  # relative to the manifest's location
    label: Label
    length: int
    sample_rate_hz: float


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    dataset_seed: int = 0
    split_tag: Optional[str] = None
    root: Optional[Path] = None  # set when loaded from disk; not serialized

    def __post_init__(self):
        entries = tuple(self.entries)
        ids = [e.record_id for e in entries]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ManifestError(f"duplicate record ids: {dupes[:5]}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def labels_by_id(self) -> dict[str, Label]:
        return {e.record_id: e.label for e in self.entries}


def write_manifest(manifest: DatasetManifest, path) -> None:
    path = Path(path)
    lines = [_MANIFEST_MAGIC, f"# dataset_seed: {manifest.dataset_seed}"]
    if manifest.split_tag is not None:
        lines.append(f"# split: {manifest.split_tag}")
    lines.append("# columns: id\tpath\tlabel\tlength\trate_hz")
    for e in manifest.entries:
        lines.append(f"{e.record_id}\t{e.path}\t{e.label.code}\t{e.length}\t{e.sample_rate_hz}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    if not lines or lines[0] != _MANIFEST_MAGIC:
        raise ManifestError(f"{path}: not an ecgaug manifest (bad first line)")
    dataset_seed = 0
    split_tag = None
    entries = []
    for line_num, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("dataset_seed:"):
                dataset_seed = int(body.split(":", 1)[1])
            elif body.startswith("split:"):
                split_tag = body.split(":", 1)[1].strip()
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ManifestError(f"{path}:{line_num}: expected 5 tab-separated fields")
        record_id, rel_path, code, length, rate = parts
        try:
            entries.append(
                ManifestEntry(record_id, rel_path, Label.from_code(code), int(length), float(rate))
            )
        except (ValueError, SignalError) as exc:
            raise ManifestError(f"{path}:{line_num}: {exc}") from exc
    return DatasetManifest(tuple(entries), dataset_seed, split_tag, root=path.parent)


def rebase_manifest(manifest: DatasetManifest, new_root) -> DatasetManifest:
    """Rewrite entry paths so the manifest can be written under ``new_root``.

    Paths are relative to the manifest's own location, so moving a manifest
    to another directory requires re-anchoring them.
    """
    if manifest.root is None:
        raise ManifestError("cannot rebase a manifest that has no root directory")
    new_root = Path(new_root).absolute()
    old_root = Path(manifest.root).absolute()
    entries = tuple(
        replace(e, path=os.path.relpath(old_root / e.path, start=new_root))
        for e in manifest.entries
    )
    return DatasetManifest(entries, manifest.dataset_seed, manifest.split_tag, root=new_root)


def load_record(entry: ManifestEntry, root: Path) -> Record:
    """Materialize one manifest entry from disk.

    ``.mat`` containers hold raw counts; ``.npy`` files hold processed
    float32 leads.  The sample rate always comes from the manifest.
    """
    file_path = Path(root) / entry.path
    if entry.path.endswith(".npy"):
        leads = np.load(file_path, allow_pickle=False)
        signal = Signal(entry.sample_rate_hz, leads)
    else:
        matrix = parse_matrix_container(file_path.read_bytes())
        signal = signal_from_matrix(matrix, entry.sample_rate_hz)
    if signal.num_samples != entry.length:
        raise ManifestError(
            f"record {entry.record_id}: file has {signal.num_samples} samples, "
            f"manifest says {entry.length}"
        )
    return Record(entry.record_id, signal, entry.label)


def save_record_signal(record: Record, path) -> None:
    """Store a processed record's leads as a .npy file."""
    np.save(path, np.asarray(record.signal.leads), allow_pickle=False)


# ---------------------------------------------------------------------------
# Seeded splits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    """Three-way split ratios plus the shuffle seed."""

    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2)
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if len(self.ratios) != 3 or any(r <= 0 for r in self.ratios):
            raise SplitError(f"need three positive ratios, got {self.ratios}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise SplitError(f"ratios must sum to 1, got sum {sum(self.ratios)}")


def _partition_sizes(n: int, ratios: Sequence[float]) -> tuple[int, int, int]:
    n_train = round(ratios[0] * n)
    n_val = round(ratios[1] * n)
    n_test = n - n_train - n_val
    return n_train, n_val, n_test


def split(
    manifest: DatasetManifest, spec: SplitSpec
) -> tuple[DatasetManifest, DatasetManifest, DatasetManifest]:
    """Seed-deterministic shuffle, then contiguous three-way partition.

    Partitions are disjoint and exhaustive.  In stratified mode the same
    procedure runs per class and the pieces are concatenated, keeping each
    split's class proportions within one record of the global ones.
    """
    if len(manifest) == 0:
        raise SplitError("cannot split an empty manifest")
    rng = np.random.default_rng(spec.seed)

    def shuffled_partition(entries: Sequence[ManifestEntry]):
        perm = rng.permutation(len(entries))
        ordered = [entries[i] for i in perm]
        n_train, n_val, n_test = _partition_sizes(len(ordered), spec.ratios)
        if min(n_train, n_val, n_test) < 0:
            raise SplitError(f"ratios {spec.ratios} over-allocate {len(ordered)} records")
        return (
            ordered[:n_train],
            ordered[n_train:n_train + n_val],
            ordered[n_train + n_val:],
        )

    if spec.stratified:
        buckets = ([], [], [])
        for label in Label:
            subset = [e for e in manifest.entries if e.label is label]
            if not subset:
                continue
            for bucket, piece in zip(buckets, shuffled_partition(subset)):
                bucket.extend(piece)
        train_e, val_e, test_e = buckets
    else:
        train_e, val_e, test_e = shuffled_partition(manifest.entries)

    if not train_e or not val_e or not test_e:
        raise SplitError(
            f"split of {len(manifest)} records with ratios {spec.ratios} "
            "leaves an empty partition"
        )
    def make(entries, tag):
        return DatasetManifest(
            tuple(entries), dataset_seed=spec.seed, split_tag=tag, root=manifest.root
        )

    return make(train_e, "train"), make(val_e, "val"), make(test_e, "test")


# ---------------------------------------------------------------------------
# Batch tensor files
# ---------------------------------------------------------------------------

BATCH_MAGIC = b"ECGB0001"


def write_batch(records: Sequence[Record], path, policy_fingerprint: str = "") -> None:
    """Write equal-length single-lead records as one batch tensor file.

    Layout: 8-byte magic, 4-byte little-endian header length, UTF-8 JSON
    header (count, length, rate, ids, label codes, policy fingerprint), then
    the row-major float32 little-endian payload.  Reading inverts writing
    bit-exactly.
    """
    records = list(records)
    lengths = {r.signal.num_samples for r in records}
    if len(lengths) > 1:
        raise BatchFormatError(f"records must share one length, got {sorted(lengths)}")
    rates = {r.signal.sample_rate_hz for r in records}
    if len(rates) > 1:
        raise BatchFormatError(f"records must share one sample rate, got {sorted(rates)}")
    for r in records:
        if r.signal.num_leads != 1:
            raise BatchFormatError(f"record {r.id}: batch files hold single-lead records")
    length = lengths.pop() if lengths else 0
    header = {
        "count": len(records),
        "length": length,
        "rate_hz": rates.pop() if rates else 0.0,
        "ids": [r.id for r in records],
        "labels": [int(r.label) if r.label is not None else None for r in records],
        "policy_fingerprint": policy_fingerprint,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    if records:
        payload = np.ascontiguousarray(
            np.vstack([r.signal.leads[0] for r in records]).astype("<f4")
        ).tobytes()
    else:
        payload = b""
    with open(path, "wb") as fh:
        fh.write(BATCH_MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(payload)


def read_batch(path) -> tuple[list[Record], str]:
    """Read a batch tensor file; returns (records, policy fingerprint)."""
    data = Path(path).read_bytes()
    if len(data) < len(BATCH_MAGIC) + 4:
        raise BatchFormatError(f"{path}: shorter than magic + header length")
    if data[:len(BATCH_MAGIC)] != BATCH_MAGIC:
        raise BatchFormatError(f"{path}: bad magic {data[:8]!r}")
    (header_len,) = struct.unpack_from("<I", data, len(BATCH_MAGIC))
    header_start = len(BATCH_MAGIC) + 4
    header_end = header_start + header_len
    if len(data) < header_end:
        raise BatchFormatError(f"{path}: header truncated")
    try:
        header = json.loads(data[header_start:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BatchFormatError(f"{path}: bad header: {exc}") from exc
    try:
        count = int(header["count"])
        length = int(header["length"])
        rate = float(header["rate_hz"])
        ids = list(header["ids"])
        labels = list(header["labels"])
        fingerprint = str(header.get("policy_fingerprint", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise BatchFormatError(f"{path}: header missing or malformed field: {exc}") from exc
    if count < 0 or length < 0 or len(ids) != count or len(labels) != count:
        raise BatchFormatError(f"{path}: header counts inconsistent")
    if count > 0 and not rate > 0:
        raise BatchFormatError(f"{path}: sample rate must be positive, got {rate}")
    expected = count * length * 4
    payload = data[header_end:]
    if len(payload) != expected:
        raise BatchFormatError(
            f"{path}: payload must be count*length*4 = {expected} bytes, got {len(payload)}"
        )
    matrix = np.frombuffer(payload, dtype="<f4").reshape((count, length))
    records = []
    for i in range(count):
        label = None if labels[i] is None else Label(int(labels[i]))
        records.append(Record(str(ids[i]), Signal(rate, matrix[i:i + 1]), label))
    return records, fingerprint
