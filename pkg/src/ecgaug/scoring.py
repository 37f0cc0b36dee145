"""CinC/Challenge 2017 scoring: per-class F1, final score = mean of 3 classes.

The final score averages the F1 of Normal, AF, and Other; the Noisy class is
reported but excluded, so noisy-class predictions only matter through the
false positives and negatives they leak into the scored classes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import Label
from .errors import ScoringError

_CLASS_ORDER = (Label.NORMAL, Label.AF, Label.OTHER, Label.NOISY)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """4x4 counts; rows are truth, columns are prediction, class order N/A/O/~."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.array(self.counts, dtype=np.int64, copy=True)
        if arr.shape != (4, 4):
            raise ScoringError(f"confusion matrix must be 4x4, got {arr.shape}")
        if (arr < 0).any():
            raise ScoringError("confusion matrix counts must be non-negative")
        arr.flags.writeable = False
        object.__setattr__(self, "counts", arr)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ScoreReport:
    f1_normal: float
    f1_af: float
    f1_other: float
    f1_noisy: float
    final_score: float
    matrix: ConfusionMatrix


def confusion(truths: Sequence[Label], preds: Sequence[Label]) -> ConfusionMatrix:
    """Count (truth, prediction) pairs into the 4x4 matrix."""
    if len(truths) != len(preds):
        raise ScoringError(f"{len(truths)} truths vs {len(preds)} predictions")
    if not truths:
        raise ScoringError("nothing to score")
    counts = np.zeros((4, 4), dtype=np.int64)
    for t, p in zip(truths, preds):
        counts[int(t), int(p)] += 1
    return ConfusionMatrix(counts)


def f1_per_class(cm: ConfusionMatrix, label: Label) -> float:
    """F1 = 2TP / (2TP + FP + FN); defined as 0 when the denominator is 0."""
    c = int(label)
    tp = int(cm.counts[c, c])
    fp = int(cm.counts[:, c].sum()) - tp
    fn = int(cm.counts[c, :].sum()) - tp
    denom = 2 * tp + fp + fn
    return 0.0 if denom == 0 else 2 * tp / denom


def challenge_score(cm: ConfusionMatrix) -> ScoreReport:
    """Full report: per-class F1 plus the 3-class mean (Noisy excluded)."""
    f1 = {label: f1_per_class(cm, label) for label in _CLASS_ORDER}
    final = (f1[Label.NORMAL] + f1[Label.AF] + f1[Label.OTHER]) / 3
    return ScoreReport(
        f1_normal=f1[Label.NORMAL],
        f1_af=f1[Label.AF],
        f1_other=f1[Label.OTHER],
        f1_noisy=f1[Label.NOISY],
        final_score=final,
        matrix=cm,
    )


def load_predictions(csv_bytes: bytes) -> dict[str, Label]:
    """Parse a two-column (record id, predicted code) CSV."""
    try:
        text = csv_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ScoringError(f"prediction CSV is not UTF-8: {exc}") from exc
    preds: dict[str, Label] = {}
    for row_num, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row:
            continue
        if len(row) < 2:
            raise ScoringError(f"row {row_num}: expected two columns, got {row!r}")
        record_id, code = row[0].strip(), row[1].strip()
        if record_id in preds:
            raise ScoringError(f"row {row_num}: duplicate prediction for {record_id!r}")
        if code not in ("N", "A", "O", "~"):
            raise ScoringError(f"row {row_num}: unknown class code {code!r}")
        preds[record_id] = Label.from_code(code)
    return preds


def score_predictions(
    predictions: Mapping[str, Label], truths: Mapping[str, Label]
) -> ScoreReport:
    """Join predictions against reference labels by record id and score."""
    missing = sorted(set(truths) - set(predictions))
    if missing:
        raise ScoringError(f"missing predictions for {len(missing)} records, e.g. {missing[:5]}")
    extra = sorted(set(predictions) - set(truths))
    if extra:
        raise ScoringError(f"predictions for {len(extra)} unknown records, e.g. {extra[:5]}")
    ordered_ids = sorted(truths)
    cm = confusion([truths[i] for i in ordered_ids], [predictions[i] for i in ordered_ids])
    return challenge_score(cm)


def format_report(report: ScoreReport) -> str:
    """Human-readable report text with the confusion matrix."""
    lines = ["class     F1"]
    for name, value in (
        ("Normal", report.f1_normal),
        ("AF", report.f1_af),
        ("Other", report.f1_other),
        ("Noisy", report.f1_noisy),
    ):
        lines.append(f"{name:<8}  {value:.4f}")
    lines.append(f"final score (mean of Normal/AF/Other): {report.final_score:.4f}")
    lines.append("")
    lines.append("confusion (rows=truth, cols=prediction; order N A O ~):")
    for row in report.matrix.counts:
        lines.append("  " + " ".join(f"{v:>6d}" for v in row))
    return "\n".join(lines)


def report_to_json(report: ScoreReport) -> str:
    """Machine-readable report variant."""
    return json.dumps(
        {
            "f1_normal": report.f1_normal,
            "f1_af": report.f1_af,
            "f1_other": report.f1_other,
            "f1_noisy": report.f1_noisy,
            "final_score": report.final_score,
            "confusion": report.matrix.counts.tolist(),
        },
        indent=2,
        sort_keys=True,
    )
