"""Deterministic augmentation, preprocessing, and scoring for single-lead ECG.

The pipeline mirrors the CinC/Challenge 2017 setup: raw 300 Hz ADC counts
are scaled by 1/500, decimated to 50 Hz, and zero-padded at the head to a
fixed length of 3050 samples; a seeded policy then applies a random
combination of thirteen waveform transforms at a shared magnitude.
"""

__version__ = "0.1.0"

from .core import (
    DECIMATE_FACTOR,
    RAW_RATE_HZ,
    RAW_SCALE_DIVISOR,
    TARGET_LEN,
    Label,
    Record,
    Signal,
    decimate,
    pad_head,
    preprocess,
    scale_raw,
)
from .errors import EcgAugError
from .fir import FirFilter, convolve_same, design_highpass, design_lowpass
from .ops import ALL_OP_KINDS, OpKind, OpParams, apply_op
from .policy import (
    MAGNITUDE_MAX,
    AugmentPolicy,
    MagnitudeMapping,
    RngStream,
    apply_policy,
    augment_dataset,
    derive_stream,
    load_policy,
    sample_params,
    save_policy,
)
from .scoring import (
    ConfusionMatrix,
    ScoreReport,
    challenge_score,
    confusion,
    f1_per_class,
    score_predictions,
)

__all__ = [
    "__version__",
    "DECIMATE_FACTOR",
    "RAW_RATE_HZ",
    "RAW_SCALE_DIVISOR",
    "TARGET_LEN",
    "MAGNITUDE_MAX",
    "ALL_OP_KINDS",
    "Label",
    "Record",
    "Signal",
    "FirFilter",
    "OpKind",
    "OpParams",
    "AugmentPolicy",
    "MagnitudeMapping",
    "RngStream",
    "ConfusionMatrix",
    "ScoreReport",
    "EcgAugError",
    "scale_raw",
    "decimate",
    "pad_head",
    "preprocess",
    "design_lowpass",
    "design_highpass",
    "convolve_same",
    "apply_op",
    "derive_stream",
    "sample_params",
    "apply_policy",
    "augment_dataset",
    "load_policy",
    "save_policy",
    "confusion",
    "f1_per_class",
    "challenge_score",
    "score_predictions",
]
