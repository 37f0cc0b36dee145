#!/usr/bin/env python3
"""Directional check: does augmentation (magnitude 12, 5 ops) beat baseline?

Runs a reduced-schedule experiment on the CinC/Challenge 2017 public set:
for each of a few seeds, train the classifier once without augmentation and
once with the magnitude-12 / 5-op policy, score the held-out test split
through `ecgaug score`, and compare the medians.  This checks the sign of
the augmentation effect, not its magnitude.

Expects a directory with the public training archive contents:
8,528 record containers (A*.mat) plus REFERENCE.csv.

    python scripts/directional_experiment.py --data-dir /path/to/training2017 \
        --out-dir runs/directional --epochs 30 --seeds 3

Runtime is hours on CPU; use a GPU-enabled torch build if available.  This
script is deliberately not part of the test suite.
"""

from __future__ import annotations

import argparse
import json
import statistics
import subprocess
import sys
from pathlib import Path

POLICY_AUGMENT = """\
version: 1
magnitude: 12
num_ops: 5
master_seed: {seed}
"""

POLICY_IDENTITY = """\
version: 1
magnitude: 0
num_ops: 0
master_seed: 0
"""


def run_cli(*argv: str) -> None:
    command = [sys.executable, "-m", "ecgaug", *argv]
    print("$", " ".join(command), flush=True)
    subprocess.run(command, check=True)


def score_csv(predictions: Path, manifest: Path, report: Path) -> float:
    run_cli("score", str(predictions), str(manifest), "--json", str(report))
    return json.loads(report.read_text())["final_score"]


def train_and_score(tag: str, work: Path, splits: Path, policy: Path | None,
                    epochs: int, seed: int) -> float:
    import torch

    from ecgtrain import (
        ModelSpec, TrainConfig, build_model, load_checkpoint,
        read_batch_file, write_predictions,
    )

    run_dir = work / tag
    run_dir.mkdir(parents=True, exist_ok=True)
    identity = run_dir / "identity_policy.yaml"
    identity.write_text(POLICY_IDENTITY)

    # materialize fixed batches for train (baseline), val, and test
    batches = {}
    for part in ("train", "val", "test"):
        out = run_dir / f"{part}.ecgb"
        if not out.exists():
            run_cli("augment", str(splits / f"{part}.tsv"), str(identity),
                    str(out), "--emit", "batch")
        batches[part] = read_batch_file(out)

    torch.manual_seed(seed)
    model = build_model(ModelSpec())
    config = TrainConfig(
        epochs=epochs,
        batch_size=128,
        seed=seed,
        patience=15,
        policy_file=str(policy) if policy else None,
        train_manifest=str(splits / "train.tsv") if policy else None,
    )
    from ecgtrain import train as train_loop
    summary = train_loop(model, batches["train"], batches["val"], config, run_dir)
    best = load_checkpoint(summary["checkpoint"])
    predictions = run_dir / "test_predictions.csv"
    write_predictions(best, [batches["test"]], predictions,
                      expected_ids=list(batches["test"].ids))
    return score_csv(predictions, splits / "test.tsv", run_dir / "test_report.json")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", required=True,
                        help="directory with A*.mat containers and REFERENCE.csv")
    parser.add_argument("--out-dir", default="runs/directional")
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--seeds", type=int, default=3)
    args = parser.parse_args()

    data = Path(args.data_dir)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    manifest = out / "manifest.tsv"
    if not manifest.exists():
        run_cli("ingest", str(data), str(data / "REFERENCE.csv"), str(manifest))
    proc = out / "proc"
    if not (proc / "manifest.tsv").exists():
        run_cli("preprocess", str(manifest), str(proc), "--workers", "8")

    baseline_scores, augmented_scores = [], []
    for seed in range(args.seeds):
        splits = out / f"splits_seed{seed}"
        if not (splits / "train.tsv").exists():
            run_cli("split", str(proc / "manifest.tsv"), str(splits), "--seed", str(seed))
        policy = out / f"policy_seed{seed}.yaml"
        policy.write_text(POLICY_AUGMENT.format(seed=seed))

        baseline = train_and_score(f"seed{seed}_baseline", out, splits, None,
                                   args.epochs, seed)
        augmented = train_and_score(f"seed{seed}_augmented", out, splits, policy,
                                    args.epochs, seed)
        print(f"seed {seed}: baseline {baseline:.4f}  augmented {augmented:.4f}")
        baseline_scores.append(baseline)
        augmented_scores.append(augmented)

    median_base = statistics.median(baseline_scores)
    median_aug = statistics.median(augmented_scores)
    print(f"\nmedian baseline:  {median_base:.4f}")
    print(f"median augmented: {median_aug:.4f}")
    verdict = "PASS" if median_aug >= median_base else "FAIL"
    print(f"[{verdict}] augmented median >= baseline median")
    (out / "summary.json").write_text(json.dumps({
        "baseline_scores": baseline_scores,
        "augmented_scores": augmented_scores,
        "median_baseline": median_base,
        "median_augmented": median_aug,
        "verdict": verdict,
    }, indent=2))
    return 0 if verdict == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())
