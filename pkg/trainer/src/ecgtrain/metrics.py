"""Internal validation metric: mean F1 of classes 0..2 (Noisy excluded).

This mirrors the official scoring rule for early stopping only; final test
scores should flow through prediction CSVs and `ecgaug score`.
"""

from __future__ import annotations

import numpy as np


def f1(truths: np.ndarray, predictions: np.ndarray, cls: int) -> float:
    tp = int(np.sum((truths == cls) & (predictions == cls)))
    fp = int(np.sum((truths != cls) & (predictions == cls)))
    fn = int(np.sum((truths == cls) & (predictions != cls)))
    denom = 2 * tp + fp + fn
    return 0.0 if denom == 0 else 2 * tp / denom


def challenge_score_from_predictions(truths: np.ndarray, predictions: np.ndarray) -> float:
    truths = np.asarray(truths)
    predictions = np.asarray(predictions)
    if truths.shape != predictions.shape:
        raise ValueError(f"shape mismatch: {truths.shape} vs {predictions.shape}")
    return sum(f1(truths, predictions, cls) for cls in (0, 1, 2)) / 3
