"""Randomized augmentation policies with order-independent determinism.

A policy is (magnitude, num_ops, op set, master seed).  Applying it to a
record draws ``num_ops`` op kinds uniformly with replacement, samples each
kind's concrete parameters at the shared magnitude, and applies them left to
right.  All draws come from a counter-based stream derived from
(master_seed, epoch, record_id), so the result for a record depends only on
those three values: never on batch composition, worker count, or processing
order.

Magnitude runs on a 0..30 scale.  Each kind's parameter range grows linearly
in m = magnitude/30 and collapses to a no-op at m = 0; the mapping constants
are configuration (overridable in the policy file), not code.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np
import yaml

from .core import Record
from .errors import EcgAugError, PolicyError
from .ops import ALL_OP_KINDS, OpKind, OpParams, apply_op

MAGNITUDE_MAX = 30
POLICY_FILE_VERSION = 1

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MagnitudeMapping:
    """Constants mapping normalized magnitude m = M/30 to op parameter ranges.

    All perturbation sizes are in the normalized amplitude units produced by
    preprocessing, where QRS peaks are order 1.
    """

    scale_half_range: float = 0.5        # factor ~ U[1 - r*m, 1 + r*m]
    drop_prob_max: float = 0.1           # drop_prob = max * m
    cutout_max_frac: float = 0.25        # length ~ U{0 .. round(frac * m * T)}
    shift_max_frac: float = 0.25         # offset ~ U{-round(frac*m*T) .. +round(frac*m*T)}
    wave_amplitude_max: float = 0.5      # amplitude ~ U[0, max * m]
    wave_freq_min_hz: float = 0.1        # baseline-wander band
    wave_freq_max_hz: float = 3.0
    partial_frac_min: float = 0.1        # interval length fraction ~ U[min, max]
    partial_frac_max: float = 0.5
    noise_sigma_max: float = 0.3         # sigma ~ U[0, max * m]
    fir_low_frac: float = 0.8            # cutoff = Nyquist * (1 - frac * m)
    fir_high_per_m_hz: float = 10.0      # cutoff = max(min_hz, per_m * m)
    fir_high_min_hz: float = 0.5

    def with_overrides(self, overrides: dict) -> "MagnitudeMapping":
        known = set(asdict(self))
        unknown = set(overrides) - known
        if unknown:
            raise PolicyError(f"unknown mapping constants: {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_MAPPING = MagnitudeMapping()


@dataclass(frozen=True)
class AugmentPolicy:
    """Hyperparameter bundle: shared magnitude, op count, op set, master seed."""

    magnitude: int
    num_ops: int
    op_set: tuple[OpKind, ...] = ALL_OP_KINDS
    master_seed: int = 0
    mapping: MagnitudeMapping = DEFAULT_MAPPING

    def __post_init__(self):
        if not (0 <= self.magnitude <= MAGNITUDE_MAX):
            raise PolicyError(f"magnitude must be in [0, {MAGNITUDE_MAX}], got {self.magnitude}")
        if self.num_ops < 0:
            raise PolicyError(f"num_ops must be >= 0, got {self.num_ops}")
        ops = tuple(self.op_set)
        if not ops:
            raise PolicyError("op_set must not be empty")
        if len(set(ops)) != len(ops):
            raise PolicyError("op_set must not contain duplicates")
        object.__setattr__(self, "op_set", ops)

    def fingerprint(self) -> str:
        """Stable short hash of the policy's full configuration."""
        payload = json.dumps(_policy_to_dict(self), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]


class RngStream:
    """Counter-based pseudorandom stream tied to a derivation path.

    The path (master_seed, epoch, record_id) fully determines every draw, so
    a record's augmentation can be reproduced in isolation.
    """

    def __init__(self, master_seed: int, epoch: int, record_id: str):
        self.master_seed = master_seed
        self.epoch = epoch
        self.record_id = record_id
        key = _splitmix64(master_seed & _MASK64)
        key = _splitmix64(key ^ _stable_id_hash(record_id))
        key = _splitmix64(key ^ (epoch & _MASK64))
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self._gen.uniform(low, high))

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in the inclusive range [low, high]."""
        return int(self._gen.integers(low, high, endpoint=True))

    def seed64(self) -> int:
        """Fresh 64-bit value for seeding a child generator."""
        return int(self._gen.integers(0, _MASK64, dtype=np.uint64, endpoint=True))


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _stable_id_hash(record_id: str) -> int:
    # hashlib rather than hash(): stable across processes and platforms.
    digest = hashlib.sha256(record_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_stream(master_seed: int, epoch: int, record_id: str) -> RngStream:
    """Derive the per-record stream for one epoch."""
    return RngStream(master_seed, epoch, record_id)


def sample_params(
    kind: OpKind,
    magnitude: int,
    num_samples: int,
    rate_hz: float,
    stream: RngStream,
    num_leads: int = 1,
    mapping: MagnitudeMapping = DEFAULT_MAPPING,
) -> OpParams:
    """Draw concrete parameters for one op at the given magnitude.

    At magnitude 0 every kind returns its identity configuration.  Draw
    order within each kind is fixed; changing it would silently change
    every seeded experiment.
    """
    if not (0 <= magnitude <= MAGNITUDE_MAX):
        raise PolicyError(f"magnitude must be in [0, {MAGNITUDE_MAX}], got {magnitude}")
    if magnitude == 0:
        return OpParams(kind=kind, identity=True)
    m = magnitude / MAGNITUDE_MAX
    t = num_samples

    if kind is OpKind.ERASE:
        return OpParams(kind=kind, lead_index=stream.randint(0, num_leads - 1))
    if kind is OpKind.SCALE:
        half = mapping.scale_half_range * m
        return OpParams(kind=kind, factor=stream.uniform(1.0 - half, 1.0 + half))
    if kind is OpKind.FLIP:
        return OpParams(kind=kind)
    if kind is OpKind.DROP:
        return OpParams(
            kind=kind,
            drop_prob=mapping.drop_prob_max * m,
            drop_mask_seed=stream.seed64(),
        )
    if kind is OpKind.CUTOUT:
        length = stream.randint(0, round(mapping.cutout_max_frac * m * t))
        start = stream.randint(0, t - length)
        return OpParams(kind=kind, start=start, length=length)
    if kind is OpKind.SHIFT:
        width = round(mapping.shift_max_frac * m * t)
        return OpParams(kind=kind, offset=stream.randint(-width, width))
    if kind in (OpKind.SINE, OpKind.SQUARE):
        amp, freq, phase = _draw_wave(stream, m, mapping)
        return OpParams(kind=kind, amplitude=amp, freq_hz=freq, phase_rad=phase)
    if kind in (OpKind.PARTIAL_SINE, OpKind.PARTIAL_SQUARE):
        amp, freq, phase = _draw_wave(stream, m, mapping)
        start, length = _draw_interval(stream, t, mapping)
        return OpParams(
            kind=kind, amplitude=amp, freq_hz=freq, phase_rad=phase, start=start, length=length
        )
    if kind is OpKind.PARTIAL_WHITE_NOISE:
        sigma = stream.uniform(0.0, mapping.noise_sigma_max * m)
        seed = stream.seed64()
        start, length = _draw_interval(stream, t, mapping)
        return OpParams(kind=kind, sigma=sigma, noise_seed=seed, start=start, length=length)
    if kind is OpKind.FIR_LOW:
        nyquist = rate_hz / 2.0
        return OpParams(kind=kind, cutoff_hz=nyquist * (1.0 - mapping.fir_low_frac * m))
    if kind is OpKind.FIR_HIGH:
        cutoff = max(mapping.fir_high_min_hz, mapping.fir_high_per_m_hz * m)
        return OpParams(kind=kind, cutoff_hz=cutoff)
    raise PolicyError(f"unhandled op kind {kind!r}")


def _draw_wave(stream: RngStream, m: float, mapping: MagnitudeMapping):
    amplitude = stream.uniform(0.0, mapping.wave_amplitude_max * m)
    freq = stream.uniform(mapping.wave_freq_min_hz, mapping.wave_freq_max_hz)
    phase = stream.uniform(0.0, 2.0 * np.pi)
    return amplitude, freq, phase


def _draw_interval(stream: RngStream, t: int, mapping: MagnitudeMapping):
    frac = stream.uniform(mapping.partial_frac_min, mapping.partial_frac_max)
    length = min(t, round(frac * t))
    start = stream.randint(0, t - length)
    return start, length


def _draw_kinds(stream: RngStream, op_set: Sequence[OpKind], n: int) -> list[OpKind]:
    return [op_set[stream.randint(0, len(op_set) - 1)] for _ in range(n)]


def apply_policy(record: Record, policy: AugmentPolicy, epoch: int = 0) -> Record:
    """Augment one record: N uniform-with-replacement kinds, applied in order.

    Id and label are preserved.  num_ops = 0 and magnitude = 0 both return a
    bit-identical record.
    """
    if policy.num_ops == 0:
        return record
    stream = derive_stream(policy.master_seed, epoch, record.id)
    kinds = _draw_kinds(stream, policy.op_set, policy.num_ops)
    signal = record.signal
    for kind in kinds:
        params = sample_params(
            kind,
            policy.magnitude,
            signal.num_samples,
            signal.sample_rate_hz,
            stream,
            num_leads=signal.num_leads,
            mapping=policy.mapping,
        )
        signal = apply_op(signal, params)
    return Record(record.id, signal, record.label)


def augment_dataset(
    records: Sequence[Record],
    policy: AugmentPolicy,
    epoch: int = 0,
    workers: int = 1,
) -> list[Record]:
    """Apply the policy to every record, optionally fanning out over threads.

    Output order matches input order and is byte-identical for any worker
    count, because each record's stream is derived independently.
    """
    if workers < 1:
        raise PolicyError(f"workers must be >= 1, got {workers}")

    def one(record: Record) -> Record:
        try:
            return apply_policy(record, policy, epoch)
        except EcgAugError as exc:
            raise type(exc)(f"record {record.id}: {exc}") from exc

    if workers == 1 or len(records) <= 1:
        return [one(r) for r in records]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, records))


def _policy_to_dict(policy: AugmentPolicy) -> dict:
    doc = {
        "version": POLICY_FILE_VERSION,
        "magnitude": policy.magnitude,
        "num_ops": policy.num_ops,
        "op_set": [k.value for k in policy.op_set],
        "master_seed": policy.master_seed,
    }
    overrides = {
        k: v for k, v in asdict(policy.mapping).items()
        if v != getattr(DEFAULT_MAPPING, k)
    }
    if overrides:
        doc["mapping"] = overrides
    return doc


def save_policy(policy: AugmentPolicy, path) -> None:
    """Write the policy file (versioned YAML key-value document)."""
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(_policy_to_dict(policy), fh, sort_keys=False)


def load_policy(path) -> AugmentPolicy:
    """Read a policy file written by :func:`save_policy` (schema version 1)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise PolicyError(f"policy file {path}: invalid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise PolicyError(f"policy file {path}: expected a key-value document")
    version = doc.get("version")
    if version != POLICY_FILE_VERSION:
        raise PolicyError(
            f"policy file {path}: unsupported version {version!r} "
            f"(expected {POLICY_FILE_VERSION})"
        )
    required = {"magnitude", "num_ops", "master_seed"}
    missing = required - set(doc)
    if missing:
        raise PolicyError(f"policy file {path}: missing keys {sorted(missing)}")
    try:
        op_names = doc.get("op_set") or [k.value for k in ALL_OP_KINDS]
        op_set = tuple(OpKind.from_name(str(name)) for name in op_names)
        mapping = DEFAULT_MAPPING.with_overrides(doc.get("mapping") or {})
        return AugmentPolicy(
            magnitude=int(doc["magnitude"]),
            num_ops=int(doc["num_ops"]),
            op_set=op_set,
            master_seed=int(doc["master_seed"]),
            mapping=mapping,
        )
    except EcgAugError:
        raise
    except (TypeError, ValueError) as exc:
        raise PolicyError(f"policy file {path}: {exc}") from exc
