"""Wire-format reading, including interop with the producing pipeline."""

import importlib.util
import struct

import numpy as np
import pytest

from ecgtrain import BatchFileError, read_batch_file

from conftest import batch_bytes, separable_signals

HAVE_ECGAUG = importlib.util.find_spec("ecgaug") is not None


class TestReadBatchFile:
    def test_reads_hand_rolled_bytes(self, tmp_path):
        ids, signals, labels = separable_signals(6, length=64, seed=1)
        path = tmp_path / "b.ecgb"
        path.write_bytes(batch_bytes(ids, signals, labels, fingerprint="fp01"))
        batch = read_batch_file(path)
        assert batch.ids == tuple(ids)
        assert batch.signals.dtype == np.float32
        np.testing.assert_array_equal(batch.signals, signals)
        np.testing.assert_array_equal(batch.labels, labels)
        assert batch.policy_fingerprint == "fp01"
        assert batch.rate_hz == 50.0

    def test_unlabeled_becomes_minus_one(self, tmp_path):
        path = tmp_path / "b.ecgb"
        path.write_bytes(batch_bytes(["A1"], np.zeros((1, 8)), [None]))
        assert read_batch_file(path).labels.tolist() == [-1]

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "b.ecgb"
        path.write_bytes(b"WRONG001" + b"\x00" * 32)
        with pytest.raises(BatchFileError, match="magic"):
            read_batch_file(path)

    def test_payload_size_mismatch(self, tmp_path):
        ids, signals, labels = separable_signals(2, length=16, seed=2)
        path = tmp_path / "b.ecgb"
        path.write_bytes(batch_bytes(ids, signals, labels)[:-8])
        with pytest.raises(BatchFileError, match="payload"):
            read_batch_file(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "b.ecgb"
        path.write_bytes(b"ECGB0001" + struct.pack("<I", 1000) + b"{}")
        with pytest.raises(BatchFileError, match="header"):
            read_batch_file(path)

    def test_bad_label_code(self, tmp_path):
        path = tmp_path / "b.ecgb"
        path.write_bytes(batch_bytes(["A1"], np.zeros((1, 4)), [9]))
        with pytest.raises(BatchFileError, match="label"):
            read_batch_file(path)


@pytest.mark.skipif(not HAVE_ECGAUG, reason="producing pipeline not installed")
class TestInterop:
    def test_reads_files_written_by_the_pipeline(self, tmp_path):
        from ecgaug import Label, Record, Signal
        from ecgaug.dataset import write_batch

        rng = np.random.default_rng(3)
        records = [
            Record(f"A{i:05d}", Signal(50.0, rng.normal(0, 0.3, (1, 64)).astype(np.float32)),
                   Label(i % 4))
            for i in range(5)
        ]
        path = tmp_path / "pipeline.ecgb"
        write_batch(records, path, policy_fingerprint="deadbeef")
        batch = read_batch_file(path)
        assert batch.ids == tuple(r.id for r in records)
        assert batch.policy_fingerprint == "deadbeef"
        for i, record in enumerate(records):
            np.testing.assert_array_equal(batch.signals[i], record.signal.leads[0])
            assert batch.labels[i] == int(record.label)
