"""Command-line entry point tying the pipeline together.

Subcommands: ingest, preprocess, split, augment, score, render.  Progress
and diagnostics go to stderr; results go to files or stdout, so output can
be piped.  Exit codes: 0 success, 1 internal error, 2 user/input error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dataset as ds
from .core import Label, preprocess
from .errors import EcgAugError
from .policy import apply_policy, augment_dataset, load_policy
from .render import render_svg
from .scoring import format_report, load_predictions, report_to_json, score_predictions

log = logging.getLogger("ecgaug")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2


class CliError(EcgAugError):
    """User-facing failure that should exit with code 2."""


def cmd_ingest(args) -> int:
    raw_dir = Path(args.raw_dir)
    if not raw_dir.is_dir():
        raise CliError(f"raw directory {raw_dir} does not exist")
    labels = ds.load_labels(Path(args.labels_csv).read_bytes())
    files = sorted(raw_dir.glob("*.mat"))
    if not files:
        raise CliError(f"no .mat container files in {raw_dir}")
    manifest_dir = Path(args.out_manifest).absolute().parent
    entries = []
    failures = []
    seen = set()
    for path in files:
        record_id = path.stem
        try:
            if record_id in seen:
                raise CliError(f"duplicate record id {record_id!r}")
            seen.add(record_id)
            matrix = ds.parse_matrix_container(path.read_bytes())
            signal = ds.signal_from_matrix(matrix, args.rate)
            if record_id not in labels:
                raise CliError(f"no label for record {record_id!r}")
            entries.append(
                ds.ManifestEntry(
                    record_id=record_id,
                    path=os.path.relpath(path.absolute(), start=manifest_dir),
                    label=labels[record_id],
                    length=signal.num_samples,
                    sample_rate_hz=args.rate,
                )
            )
        except EcgAugError as exc:
            failures.append(f"{path.name}: {exc}")
    for failure in failures:
        log.error("%s", failure)
    if failures:
        raise CliError(f"{len(failures)} of {len(files)} files failed to ingest")
    manifest = ds.DatasetManifest(tuple(entries), dataset_seed=args.seed)
    ds.write_manifest(manifest, args.out_manifest)
    counts = {label: 0 for label in Label}
    for e in entries:
        counts[e.label] += 1
    summary = " ".join(f"{label.name}={counts[label]}" for label in Label)
    log.info("ingested %d records: %s", len(entries), summary)
    print(f"{len(entries)} records -> {args.out_manifest} ({summary})")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    manifest = ds.load_manifest(args.manifest)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def one(entry):
        record = ds.load_record(entry, manifest.root)
        processed = preprocess(record)
        ds.save_record_signal(processed, out_dir / f"{entry.record_id}.npy")
        return ds.ManifestEntry(
            record_id=entry.record_id,
            path=f"{entry.record_id}.npy",
            label=entry.label,
            length=processed.signal.num_samples,
            sample_rate_hz=processed.signal.sample_rate_hz,
        )

    new_entries = _map_entries(one, manifest.entries, args.workers)
    out_manifest = out_dir / "manifest.tsv"
    ds.write_manifest(
        ds.DatasetManifest(tuple(new_entries), dataset_seed=manifest.dataset_seed,
                           split_tag=manifest.split_tag),
        out_manifest,
    )
    log.info("preprocessed %d records into %s", len(new_entries), out_dir)
    print(f"{len(new_entries)} records -> {out_manifest}")
    return EXIT_OK


def cmd_split(args) -> int:
    manifest = ds.load_manifest(args.manifest)
    spec = ds.SplitSpec(ratios=tuple(args.ratios), seed=args.seed, stratified=args.stratified)
    train, val, test = ds.split(manifest, spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for part in (train, val, test):
        ds.write_manifest(ds.rebase_manifest(part, out_dir), out_dir / f"{part.split_tag}.tsv")
    print(f"train={len(train)} val={len(val)} test={len(test)} -> {out_dir}")
    return EXIT_OK


def cmd_augment(args) -> int:
    manifest = ds.load_manifest(args.manifest)
    policy = load_policy(args.policy)
    records = [ds.load_record(e, manifest.root) for e in manifest.entries]
    augmented = augment_dataset(records, policy, epoch=args.epoch, workers=args.workers)
    out = Path(args.out)
    if args.emit == "batch":
        out.parent.mkdir(parents=True, exist_ok=True)
        ds.write_batch(augmented, out, policy_fingerprint=policy.fingerprint())
        print(f"{len(augmented)} records -> batch {out}")
        return EXIT_OK
    out.mkdir(parents=True, exist_ok=True)
    new_entries = []
    for entry, record in zip(manifest.entries, augmented):
        ds.save_record_signal(record, out / f"{entry.record_id}.npy")
        new_entries.append(
            ds.ManifestEntry(
                record_id=entry.record_id,
                path=f"{entry.record_id}.npy",
                label=entry.label,
                length=record.signal.num_samples,
                sample_rate_hz=record.signal.sample_rate_hz,
            )
        )
    out_manifest = out / "manifest.tsv"
    ds.write_manifest(
        ds.DatasetManifest(tuple(new_entries), dataset_seed=manifest.dataset_seed,
                           split_tag=manifest.split_tag),
        out_manifest,
    )
    print(f"{len(new_entries)} records -> {out}")
    return EXIT_OK


def cmd_score(args) -> int:
    manifest = ds.load_manifest(args.manifest)
    predictions = load_predictions(Path(args.predictions_csv).read_bytes())
    report = score_predictions(predictions, manifest.labels_by_id())
    print(format_report(report))
    if args.json:
        Path(args.json).write_text(report_to_json(report) + "\n", encoding="utf-8")
        log.info("wrote %s", args.json)
    return EXIT_OK


def cmd_render(args) -> int:
    manifest = ds.load_manifest(args.manifest)
    by_id = {e.record_id: e for e in manifest.entries}
    if args.record_id not in by_id:
        raise CliError(f"record {args.record_id!r} not in manifest {args.manifest}")
    record = ds.load_record(by_id[args.record_id], manifest.root)
    variants = {}
    if args.policy:
        policy = load_policy(args.policy)
        variants["augmented"] = apply_policy(record, policy, epoch=args.epoch)
    svg = render_svg(record, variants)
    Path(args.out_svg).write_text(svg, encoding="utf-8")
    print(f"{args.record_id} -> {args.out_svg}")
    return EXIT_OK


def _map_entries(fn, entries, workers: int):
    """Order-preserving map with optional thread fan-out and id-tagged errors."""

    def safe(entry):
        try:
            return fn(entry)
        except EcgAugError as exc:
            raise type(exc)(f"record {entry.record_id}: {exc}") from exc

    if workers <= 1 or len(entries) <= 1:
        return [safe(e) for e in entries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(safe, entries))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecgaug",
        description="Deterministic ECG preprocessing, augmentation, and scoring pipeline.",
    )
    parser.add_argument("--log-level", default="info",
                        choices=["debug", "info", "warning", "error"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="scan container files + label CSV into a manifest")
    p.add_argument("raw_dir")
    p.add_argument("labels_csv")
    p.add_argument("out_manifest")
    p.add_argument("--rate", type=float, default=300.0, help="raw sample rate in Hz")
    p.add_argument("--seed", type=int, default=0, help="dataset seed recorded in the manifest")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="scale, decimate, and head-pad every record")
    p.add_argument("manifest")
    p.add_argument("out_dir")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("split", help="seeded train/val/test split of a manifest")
    p.add_argument("manifest")
    p.add_argument("out_dir")
    p.add_argument("--ratios", type=float, nargs=3, default=[0.6, 0.2, 0.2],
                   metavar=("TRAIN", "VAL", "TEST"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratified", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("augment", help="apply a policy file to every record")
    p.add_argument("manifest")
    p.add_argument("policy")
    p.add_argument("out", help="output directory, or file path with --emit batch")
    p.add_argument("--epoch", type=int, default=0)
    p.add_argument("--emit", choices=["records", "batch"], default="records")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("score", help="score a prediction CSV against manifest labels")
    p.add_argument("predictions_csv")
    p.add_argument("manifest")
    p.add_argument("--json", help="also write a machine-readable report here")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("render", help="static SVG plot of a record, optionally augmented")
    p.add_argument("manifest")
    p.add_argument("record_id")
    p.add_argument("out_svg")
    p.add_argument("--policy", help="overlay this policy's augmented variant")
    p.add_argument("--epoch", type=int, default=0)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except EcgAugError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except Exception:  # pragma: no cover - genuine bugs
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
