"""Residual 1-D CNN trainer for fixed-length single-lead ECG batches.

Consumes the ecgaug pipeline's batch tensor files, policy files, and
manifests; emits prediction CSVs for `ecgaug score` plus a JSONL run
history.
"""

__version__ = "0.1.0"

from .batches import BatchFile, BatchFileError, read_batch_file
from .metrics import challenge_score_from_predictions
from .model import ConvBlock, ConvClassifier, ModelSpec, build_model
from .predict import predict_codes, write_predictions
from .train import EpochBatchProvider, TrainConfig, evaluate, load_checkpoint, train

__all__ = [
    "__version__",
    "BatchFile",
    "BatchFileError",
    "read_batch_file",
    "challenge_score_from_predictions",
    "ConvBlock",
    "ConvClassifier",
    "ModelSpec",
    "build_model",
    "predict_codes",
    "write_predictions",
    "EpochBatchProvider",
    "TrainConfig",
    "evaluate",
    "load_checkpoint",
    "train",
]
