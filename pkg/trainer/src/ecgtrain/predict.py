"""Prediction export: checkpoint + batch files -> two-column CSV.

The CSV (record id, class code) is exactly what `ecgaug score` consumes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Sequence

import torch

from .batches import LABEL_CODES, BatchFile
from .model import ConvClassifier


@torch.no_grad()
def predict_codes(model: ConvClassifier, batch: BatchFile, batch_size: int = 256) -> list[str]:
    """Argmax class codes (N/A/O/~) for every record, in batch order."""
    model.eval()
    codes: list[str] = []
    for start in range(0, len(batch), batch_size):
        x = torch.from_numpy(batch.signals[start:start + batch_size]).unsqueeze(1)
        probs = model.predict_proba(x)
        codes.extend(LABEL_CODES[int(i)] for i in probs.argmax(dim=1))
    return codes


def write_predictions(
    model: ConvClassifier,
    batches: Iterable[BatchFile],
    out_csv,
    expected_ids: Optional[Sequence[str]] = None,
) -> int:
    """Predict every batch and write the CSV; returns the row count.

    When ``expected_ids`` is given (e.g. a manifest's id column), the union
    of batch ids must match it exactly.
    """
    rows: list[tuple[str, str]] = []
    for batch in batches:
        for record_id, code in zip(batch.ids, predict_codes(model, batch)):
            rows.append((record_id, code))
    ids = [record_id for record_id, _ in rows]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate record ids across prediction batches")
    if expected_ids is not None and sorted(ids) != sorted(expected_ids):
        missing = sorted(set(expected_ids) - set(ids))[:5]
        extra = sorted(set(ids) - set(expected_ids))[:5]
        raise ValueError(f"prediction ids do not match manifest: missing {missing}, extra {extra}")
    out_csv = Path(out_csv)
    out_csv.write_text("".join(f"{rid},{code}\n" for rid, code in rows), encoding="utf-8")
    return len(rows)
