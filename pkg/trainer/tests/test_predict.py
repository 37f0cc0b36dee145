"""Prediction export: class-code mapping, counts, manifest id checking."""

import numpy as np
import pytest
import torch

from ecgtrain import ModelSpec, build_model, read_batch_file, write_predictions
from ecgtrain.predict import predict_codes

from conftest import batch_bytes, separable_signals

SPEC = ModelSpec(num_blocks=2, base_filters=4, conv_filter_length=8,
                 dropout_rate=0.0, input_len=64)


def tiny_batch(tmp_path, n=4):
    ids, signals, labels = separable_signals(n, length=64, seed=0)
    path = tmp_path / "b.ecgb"
    path.write_bytes(batch_bytes(ids, signals, labels))
    return read_batch_file(path)


class TestPredict:
    def test_single_record_single_row(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(SPEC)
        batch = tiny_batch(tmp_path, n=1)
        out = tmp_path / "preds.csv"
        count = write_predictions(model, [batch], out)
        assert count == 1
        record_id, code = out.read_text().strip().split(",")
        assert record_id == "A00000"
        assert code in ("N", "A", "O", "~")

    def test_row_count_matches_records(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(SPEC)
        batch = tiny_batch(tmp_path, n=7)
        out = tmp_path / "preds.csv"
        assert write_predictions(model, [batch], out) == 7
        assert len(out.read_text().splitlines()) == 7

    def test_argmax_maps_class_order_to_codes(self, tmp_path):
        batch = tiny_batch(tmp_path, n=4)
        for cls, code in enumerate(("N", "A", "O", "~")):
            torch.manual_seed(0)
            model = build_model(SPEC)
            with torch.no_grad():
                model.head.bias[cls] = 5.0  # force every argmax to cls
            assert set(predict_codes(model, batch)) == {code}

    def test_manifest_id_mismatch_rejected(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(SPEC)
        batch = tiny_batch(tmp_path, n=3)
        with pytest.raises(ValueError, match="do not match"):
            write_predictions(model, [batch], tmp_path / "p.csv",
                              expected_ids=["A00000", "A00001", "A00099"])

    def test_probabilities_normalized(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(SPEC)
        batch = tiny_batch(tmp_path, n=4)
        probs = model.predict_proba(torch.from_numpy(batch.signals).unsqueeze(1))
        np.testing.assert_allclose(probs.sum(dim=1).detach().numpy(), 1.0, atol=1e-5)
