"""Container parsing, labels, manifests, seeded splits, batch files."""

import struct

import numpy as np
import pytest

from ecgaug import Label, Record, Signal
from ecgaug.dataset import (
    DatasetManifest,
    ManifestEntry,
    SplitSpec,
    build_matrix_container,
    load_labels,
    load_manifest,
    load_record,
    parse_matrix_container,
    read_batch,
    rebase_manifest,
    save_record_signal,
    signal_from_matrix,
    split,
    write_batch,
    write_manifest,
)
from ecgaug.errors import (
    BatchFormatError,
    ContainerComplexError,
    ContainerError,
    ContainerTruncatedError,
    ContainerTypeError,
    LabelsError,
    ManifestError,
    SplitError,
)

from conftest import make_processed_record


def int16_container(name: str, values) -> bytes:
    """Byte-level fixture built directly from the published container layout:
    five int32 LE header words (type, rows, cols, imagf, namlen), the
    NUL-terminated name, then the column-major payload.  int16 payload means
    precision digit 3, so the type code is 30."""
    arr = np.asarray(values, dtype="<i2").reshape(1, -1)
    header = struct.pack("<5i", 30, arr.shape[0], arr.shape[1], 0, len(name) + 1)
    return header + name.encode() + b"\x00" + arr.tobytes(order="F")


class TestContainerParse:
    def test_hand_built_int16_fixture(self):
        data = int16_container("val", [500, -1000, 0])
        matrix = parse_matrix_container(data)
        assert matrix.name == "val"
        assert matrix.values.shape == (1, 3)
        assert matrix.values.dtype == np.int16
        np.testing.assert_array_equal(matrix.values[0], [500, -1000, 0])

    def test_double_1x1_round_trip(self):
        data = build_matrix_container("val", np.array([[0.0]]))
        matrix = parse_matrix_container(data)
        assert matrix.name == "val"
        assert matrix.values.shape == (1, 1)
        assert matrix.values[0, 0] == 0.0
        assert build_matrix_container(matrix.name, matrix.values) == data

    def test_int16_round_trip(self):
        arr = np.arange(-6, 6, dtype=np.int16).reshape(3, 4)
        matrix = parse_matrix_container(build_matrix_container("sig", arr))
        np.testing.assert_array_equal(matrix.values, arr)

    def test_column_major_order(self):
        # 2x2 int16 [[1, 3], [2, 4]] stored column-major as 1,2,3,4
        header = struct.pack("<5i", 30, 2, 2, 0, 2)
        data = header + b"m\x00" + struct.pack("<4h", 1, 2, 3, 4)
        matrix = parse_matrix_container(data)
        np.testing.assert_array_equal(matrix.values, [[1, 3], [2, 4]])

    def test_truncated_header(self):
        with pytest.raises(ContainerTruncatedError):
            parse_matrix_container(b"\x00" * 10)

    def test_truncated_payload(self):
        data = int16_container("val", [1, 2, 3])
        with pytest.raises(ContainerTruncatedError, match="payload"):
            parse_matrix_container(data[:-2])

    def test_trailing_bytes_rejected(self):
        data = int16_container("val", [1, 2, 3])
        with pytest.raises(ContainerError, match="trailing"):
            parse_matrix_container(data + b"\x00")

    def test_unsupported_type_code(self):
        bad = struct.pack("<5i", 10, 1, 1, 0, 2) + b"v\x00" + b"\x00" * 4  # float32
        with pytest.raises(ContainerTypeError):
            parse_matrix_container(bad)

    def test_big_endian_machine_digit_rejected(self):
        bad = struct.pack("<5i", 1030, 1, 1, 0, 2) + b"v\x00" + b"\x00" * 2
        with pytest.raises(ContainerTypeError):
            parse_matrix_container(bad)

    def test_imaginary_flag_rejected(self):
        bad = struct.pack("<5i", 30, 1, 1, 1, 2) + b"v\x00" + b"\x00" * 2
        with pytest.raises(ContainerComplexError):
            parse_matrix_container(bad)

    def test_negative_dims_rejected(self):
        bad = struct.pack("<5i", 30, -1, 3, 0, 2) + b"v\x00"
        with pytest.raises(ContainerError, match="negative"):
            parse_matrix_container(bad)

    def test_allocation_ceiling(self):
        bad = struct.pack("<5i", 0, 2 ** 20, 2 ** 10, 0, 2) + b"v\x00"
        with pytest.raises(ContainerError, match="ceiling"):
            parse_matrix_container(bad)

    def test_missing_name_terminator(self):
        bad = struct.pack("<5i", 30, 1, 1, 0, 3) + b"val" + b"\x00\x00"
        with pytest.raises(ContainerError, match="NUL"):
            parse_matrix_container(bad)

    def test_fuzz_structured_errors_only(self):
        # Random byte streams and corrupted real containers must always raise
        # a ContainerError subclass: no crashes, no unbounded allocation.
        rng = np.random.default_rng(2017)
        good = int16_container("val", list(range(50)))
        outcomes = 0
        for i in range(20_000):
            if i % 4 == 0:
                blob = bytearray(good)
                for _ in range(rng.integers(1, 6)):
                    blob[rng.integers(0, len(blob))] = rng.integers(0, 256)
                data = bytes(blob)
            else:
                data = rng.bytes(rng.integers(0, 64))
            try:
                parse_matrix_container(data)
            except ContainerError:
                outcomes += 1
        assert outcomes > 0


class TestSignalFromMatrix:
    def test_row_vector_is_one_lead(self):
        sig = signal_from_matrix(parse_matrix_container(int16_container("val", [1, 2, 3])), 300.0)
        assert sig.leads.shape == (1, 3)

    def test_column_vector_transposed(self):
        data = build_matrix_container("val", np.arange(4, dtype=np.int16).reshape(4, 1) + 1)
        sig = signal_from_matrix(parse_matrix_container(data), 300.0)
        assert sig.leads.shape == (1, 4)


class TestLoadLabels:
    def test_basic_rows(self):
        labels = load_labels(b"A00001,N\nA00002,A\n")
        assert labels == {"A00001": Label.NORMAL, "A00002": Label.AF}

    def test_noisy_code(self):
        assert load_labels(b"A00003,~\n")["A00003"] is Label.NOISY

    def test_unknown_code_with_row(self):
        with pytest.raises(LabelsError, match="row 2"):
            load_labels(b"A00001,N\nA00002,X\n")

    def test_duplicate_id_with_row(self):
        with pytest.raises(LabelsError, match="row 2"):
            load_labels(b"A00001,N\nA00001,A\n")

    def test_synthetic_full_reference_counts(self):
        # Same class balance as the public set: 5154/771/2557/46.
        counts = {"N": 5154, "A": 771, "O": 2557, "~": 46}
        rows = []
        i = 0
        for code, count in counts.items():
            for _ in range(count):
                rows.append(f"A{i:05d},{code}")
                i += 1
        labels = load_labels("\n".join(rows).encode())
        assert len(labels) == 8528
        got = {code: 0 for code in counts}
        for label in labels.values():
            got[label.code] += 1
        assert got == counts


def manifest_of(n: int, seed: int = 0) -> DatasetManifest:
    labels = [Label.NORMAL, Label.AF, Label.OTHER, Label.NOISY]
    entries = tuple(
        ManifestEntry(f"A{i:05d}", f"A{i:05d}.npy", labels[i % 4], 3050, 50.0)
        for i in range(n)
    )
    return DatasetManifest(entries, dataset_seed=seed)


class TestSplit:
    def test_challenge_sizes(self):
        train, val, test = split(manifest_of(8528), SplitSpec(seed=11))
        assert (len(train), len(val), len(test)) == (5117, 1706, 1705)

    def test_seed_stability(self):
        a = split(manifest_of(500), SplitSpec(seed=3))
        b = split(manifest_of(500), SplitSpec(seed=3))
        for part_a, part_b in zip(a, b):
            assert [e.record_id for e in part_a.entries] == [e.record_id for e in part_b.entries]

    def test_different_seed_different_shuffle(self):
        a, _, _ = split(manifest_of(500), SplitSpec(seed=3))
        b, _, _ = split(manifest_of(500), SplitSpec(seed=4))
        assert [e.record_id for e in a.entries] != [e.record_id for e in b.entries]

    def test_tiny_rounding_case(self):
        train, val, test = split(manifest_of(5), SplitSpec(seed=0))
        assert (len(train), len(val), len(test)) == (3, 1, 1)

    def test_disjoint_and_exhaustive(self):
        manifest = manifest_of(403)
        train, val, test = split(manifest, SplitSpec(seed=9))
        ids = [e.record_id for part in (train, val, test) for e in part.entries]
        assert len(ids) == len(set(ids)) == len(manifest)
        assert set(ids) == {e.record_id for e in manifest.entries}

    def test_stratified_proportions_within_one(self):
        manifest = manifest_of(8528)
        global_counts = {label: 0 for label in Label}
        for e in manifest.entries:
            global_counts[e.label] += 1
        train, val, test = split(manifest, SplitSpec(seed=5, stratified=True))
        for part, ratio in ((train, 0.6), (val, 0.2), (test, 0.2)):
            for label in Label:
                got = sum(1 for e in part.entries if e.label is label)
                assert abs(got - ratio * global_counts[label]) <= 1.0

    def test_bad_ratios_rejected(self):
        with pytest.raises(SplitError):
            SplitSpec(ratios=(0.5, 0.2, 0.2))
        with pytest.raises(SplitError):
            SplitSpec(ratios=(1.0, 0.0, 0.0))

    def test_empty_partition_rejected(self):
        with pytest.raises(SplitError):
            split(manifest_of(2), SplitSpec(seed=0))


class TestManifestIO:
    def test_round_trip(self, tmp_path):
        manifest = manifest_of(7, seed=123)
        path = tmp_path / "m.tsv"
        write_manifest(manifest, path)
        loaded = load_manifest(path)
        assert loaded.entries == manifest.entries
        assert loaded.dataset_seed == 123
        assert loaded.root == tmp_path

    def test_split_tag_round_trip(self, tmp_path):
        manifest = DatasetManifest(manifest_of(4).entries, dataset_seed=1, split_tag="val")
        path = tmp_path / "val.tsv"
        write_manifest(manifest, path)
        assert load_manifest(path).split_tag == "val"

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("not a manifest\n")
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_duplicate_ids_rejected(self):
        entry = ManifestEntry("A1", "A1.npy", Label.NORMAL, 10, 50.0)
        with pytest.raises(ManifestError, match="duplicate"):
            DatasetManifest((entry, entry))

    def test_load_record_npy(self, tmp_path):
        rec = make_processed_record("A00001", seed=2)
        save_record_signal(rec, tmp_path / "A00001.npy")
        entry = ManifestEntry("A00001", "A00001.npy", rec.label, 3050, 50.0)
        loaded = load_record(entry, tmp_path)
        assert loaded.signal.leads.tobytes() == rec.signal.leads.tobytes()

    def test_load_record_length_mismatch(self, tmp_path):
        rec = make_processed_record("A00001", seed=2)
        save_record_signal(rec, tmp_path / "A00001.npy")
        entry = ManifestEntry("A00001", "A00001.npy", rec.label, 99, 50.0)
        with pytest.raises(ManifestError, match="manifest says"):
            load_record(entry, tmp_path)

    def test_rebase_keeps_records_reachable(self, tmp_path):
        rec = make_processed_record("A00001", seed=2)
        data_dir = tmp_path / "data"
        data_dir.mkdir()
        save_record_signal(rec, data_dir / "A00001.npy")
        manifest = DatasetManifest(
            (ManifestEntry("A00001", "A00001.npy", rec.label, 3050, 50.0),),
            root=data_dir,
        )
        other_dir = tmp_path / "splits"
        other_dir.mkdir()
        rebased = rebase_manifest(manifest, other_dir)
        write_manifest(rebased, other_dir / "m.tsv")
        loaded = load_manifest(other_dir / "m.tsv")
        got = load_record(loaded.entries[0], loaded.root)
        assert got.signal.leads.tobytes() == rec.signal.leads.tobytes()


class TestBatchIO:
    def test_round_trip_bit_exact(self, tmp_path):
        records = [make_processed_record(f"A{i:05d}", seed=i, label=Label(i % 4))
                   for i in range(10)]
        path = tmp_path / "b.ecgb"
        write_batch(records, path, policy_fingerprint="abc123")
        loaded, fingerprint = read_batch(path)
        assert fingerprint == "abc123"
        assert [r.id for r in loaded] == [r.id for r in records]
        assert [r.label for r in loaded] == [r.label for r in records]
        for got, want in zip(loaded, records):
            assert got.signal.leads.tobytes() == want.signal.leads.tobytes()
            assert got.signal.sample_rate_hz == want.signal.sample_rate_hz

    def test_empty_batch(self, tmp_path):
        path = tmp_path / "empty.ecgb"
        write_batch([], path)
        loaded, _ = read_batch(path)
        assert loaded == []

    def test_magic_checked(self, tmp_path):
        path = tmp_path / "bad.ecgb"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 16)
        with pytest.raises(BatchFormatError, match="magic"):
            read_batch(path)

    def test_payload_length_checked(self, tmp_path):
        records = [make_processed_record("A00001", seed=1)]
        path = tmp_path / "b.ecgb"
        write_batch(records, path)
        data = path.read_bytes()
        path.write_bytes(data[:-4])
        with pytest.raises(BatchFormatError, match="count\\*length\\*4"):
            read_batch(path)

    def test_mixed_lengths_rejected(self, tmp_path):
        a = make_processed_record("A00001", seed=1)
        b = Record("A00002", Signal(50.0, np.zeros(100, dtype=np.float32)), Label.AF)
        with pytest.raises(BatchFormatError, match="length"):
            write_batch([a, b], tmp_path / "b.ecgb")

    def test_unlabeled_records_round_trip(self, tmp_path):
        rec = Record("A00001", Signal(50.0, np.zeros(64, dtype=np.float32)))
        path = tmp_path / "b.ecgb"
        write_batch([rec], path)
        loaded, _ = read_batch(path)
        assert loaded[0].label is None
