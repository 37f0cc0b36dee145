"""Exception hierarchy shared by all ecgaug modules.

Every anticipated failure raises a subclass of :class:`EcgAugError`, so
callers (and the CLI) can distinguish bad input from genuine bugs.
"""


class EcgAugError(Exception):
    """Base class for all errors raised by this package."""


class SignalError(EcgAugError):
    """Invalid waveform data or transform parameters."""


class ContainerError(EcgAugError):
    """Malformed matrix container byte stream."""


class ContainerTruncatedError(ContainerError):
    """Header or payload shorter than its declared size."""


class ContainerTypeError(ContainerError):
    """Numeric type code not supported by this reader."""


class ContainerComplexError(ContainerError):
    """Imaginary-part flag set; complex matrices are not supported."""


class LabelsError(EcgAugError):
    """Malformed label CSV (unknown class code, duplicate id, bad row)."""


class ManifestError(EcgAugError):
    """Malformed or inconsistent dataset manifest."""


class SplitError(EcgAugError):
    """Split specification cannot be applied to the manifest."""


class BatchFormatError(EcgAugError):
    """Malformed batch tensor file."""


class PolicyError(EcgAugError):
    """Invalid augmentation policy or policy file."""


class ScoringError(EcgAugError):
    """Predictions cannot be scored against the reference labels."""
