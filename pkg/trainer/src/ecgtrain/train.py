"""Training loop: minibatch SGD over batch files, early stopping on the
validation challenge score, best-checkpoint retention, JSONL history.

Augmentation is applied epoch-wise through the ecgaug command line: for each
epoch the trainer asks `ecgaug augment --epoch E --emit batch` to materialize
that epoch's batch file and trains on it.  A config without a policy file
trains on the fixed baseline batch.
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import torch
import torch.nn as nn

from .batches import BatchFile, read_batch_file
from .metrics import challenge_score_from_predictions
from .model import ConvClassifier, ModelSpec, build_model


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 128
    learning_rate: float = 1e-3
    optimizer: str = "adam"  # "adam" or "sgd"
    seed: int = 0
    patience: int = 15       # early stopping on validation challenge score
    policy_file: Optional[str] = None   # augmentation policy; None = baseline
    train_manifest: Optional[str] = None  # required when policy_file is set
    trials: int = 1

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"optimizer must be adam or sgd, got {self.optimizer!r}")
        if self.policy_file is not None and self.train_manifest is None:
            raise ValueError("epoch-wise augmentation needs train_manifest alongside policy_file")


class EpochBatchProvider:
    """Yields the training BatchFile for each epoch.

    Baseline mode returns the same batch file every epoch.  Augmented mode
    shells out to the ecgaug CLI, which derives every draw from
    (master_seed, epoch, record_id), so each epoch sees a fresh but fully
    reproducible variant of the training set.
    """

    def __init__(self, baseline: Optional[BatchFile], config: TrainConfig,
                 work_dir: Optional[Path] = None):
        if baseline is None and config.policy_file is None:
            raise ValueError("baseline batch is required when no policy file is set")
        self.baseline = baseline
        self.config = config
        self.work_dir = Path(work_dir) if work_dir else Path(tempfile.mkdtemp(prefix="ecgtrain-"))

    def for_epoch(self, epoch: int) -> BatchFile:
        if self.config.policy_file is None:
            return self.baseline
        out = self.work_dir / f"train_epoch{epoch:04d}.ecgb"
        if not out.exists():
            command = [
                sys.executable, "-m", "ecgaug", "augment",
                str(self.config.train_manifest), str(self.config.policy_file),
                str(out), "--epoch", str(epoch), "--emit", "batch",
            ]
            result = subprocess.run(command, capture_output=True, text=True)
            if result.returncode != 0:
                raise RuntimeError(
                    f"ecgaug augment failed for epoch {epoch}: {result.stderr.strip()}"
                )
        return read_batch_file(out)


def _minibatches(batch: BatchFile, batch_size: int, generator: torch.Generator):
    n = len(batch)
    order = torch.randperm(n, generator=generator).numpy()
    for start in range(0, n, batch_size):
        idx = order[start:start + batch_size]
        x = torch.from_numpy(batch.signals[idx]).unsqueeze(1)
        y = torch.from_numpy(batch.labels[idx])
        yield x, y


@torch.no_grad()
def evaluate(model: ConvClassifier, batch: BatchFile, batch_size: int = 256):
    """Predicted class indices plus the 3-class mean F1 against batch labels."""
    model.eval()
    outputs = []
    for start in range(0, len(batch), batch_size):
        x = torch.from_numpy(batch.signals[start:start + batch_size]).unsqueeze(1)
        outputs.append(model(x).argmax(dim=1).numpy())
    predictions = np.concatenate(outputs) if outputs else np.zeros(0, dtype=np.int64)
    return predictions, challenge_score_from_predictions(batch.labels, predictions)


def train(
    model: ConvClassifier,
    train_batch: BatchFile,
    val_batch: BatchFile,
    config: TrainConfig,
    out_dir,
) -> dict:
    """Train with early stopping; returns a summary with the best epoch/score.

    Writes ``checkpoint.pt`` (best validation score) and ``history.jsonl``
    (one JSON object per epoch) into ``out_dir``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(config.seed)
    generator = torch.Generator().manual_seed(config.seed)
    if config.optimizer == "adam":
        optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    else:
        optimizer = torch.optim.SGD(model.parameters(), lr=config.learning_rate, momentum=0.9)
    loss_fn = nn.CrossEntropyLoss()
    provider = EpochBatchProvider(train_batch, config, work_dir=out_dir / "epochs")

    best_score = -1.0
    best_epoch = -1
    epochs_since_best = 0
    history_path = out_dir / "history.jsonl"
    checkpoint_path = out_dir / "checkpoint.pt"
    with open(history_path, "w", encoding="utf-8") as history:
        for epoch in range(config.epochs):
            epoch_batch = provider.for_epoch(epoch)
            model.train()
            losses = []
            for x, y in _minibatches(epoch_batch, config.batch_size, generator):
                optimizer.zero_grad()
                loss = loss_fn(model(x), y)
                if not torch.isfinite(loss):
                    raise RuntimeError(
                        f"non-finite loss {loss.item()} at epoch {epoch}; "
                        f"lr={config.learning_rate}, batch_size={config.batch_size}"
                    )
                loss.backward()
                optimizer.step()
                losses.append(loss.item())
            _, val_score = evaluate(model, val_batch)
            row = {
                "epoch": epoch,
                "train_loss": float(np.mean(losses)) if losses else None,
                "val_score": val_score,
            }
            history.write(json.dumps(row) + "\n")
            history.flush()
            if val_score > best_score:
                best_score, best_epoch, epochs_since_best = val_score, epoch, 0
                torch.save(
                    {
                        "model_state": model.state_dict(),
                        "spec": asdict(model.spec),
                        "config": asdict(config),
                        "epoch": epoch,
                        "val_score": val_score,
                    },
                    checkpoint_path,
                )
            else:
                epochs_since_best += 1
                if epochs_since_best >= config.patience:
                    break
    return {
        "best_epoch": best_epoch,
        "best_val_score": best_score,
        "checkpoint": str(checkpoint_path),
        "history": str(history_path),
    }


def load_checkpoint(path) -> ConvClassifier:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = build_model(ModelSpec(**payload["spec"]))
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model
