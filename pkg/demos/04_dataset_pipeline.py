"""End-to-end dataset flow on a miniature synthetic corpus.

Builds 20 container files + a reference CSV in a temp directory, then runs
the same steps an experiment would: ingest -> preprocess -> split ->
augment -> batch file, all through the CLI entry points.

    python demos/04_dataset_pipeline.py
"""

import tempfile
from pathlib import Path

import numpy as np

from ecgaug import AugmentPolicy, save_policy
from ecgaug.cli import main
from ecgaug.dataset import build_matrix_container, load_manifest, read_batch

root = Path(tempfile.mkdtemp(prefix="ecgaug-demo-"))
raw = root / "raw"
raw.mkdir()

rng = np.random.default_rng(42)
codes = ["N", "N", "A", "O"]  # class imbalance, like the real set
rows = []
for i in range(20):
    record_id = f"A{i + 1:05d}"
    n = int(rng.integers(2700, 18301))
    counts = rng.integers(-400, 401, size=(1, n)).astype(np.int16)
    (raw / f"{record_id}.mat").write_bytes(build_matrix_container("val", counts))
    rows.append(f"{record_id},{codes[i % len(codes)]}")
(root / "REFERENCE.csv").write_text("\n".join(rows) + "\n")
print(f"synthetic corpus at {root}")

steps = [
    ["ingest", str(raw), str(root / "REFERENCE.csv"), str(root / "manifest.tsv")],
    ["preprocess", str(root / "manifest.tsv"), str(root / "proc"), "--workers", "4"],
    ["split", str(root / "proc" / "manifest.tsv"), str(root / "splits"),
     "--seed", "7", "--stratified"],
]
for argv in steps:
    print(f"\n$ ecgaug {' '.join(argv)}")
    assert main(argv) == 0

save_policy(AugmentPolicy(magnitude=12, num_ops=5, master_seed=7), root / "policy.yaml")
argv = ["augment", str(root / "splits" / "train.tsv"), str(root / "policy.yaml"),
        str(root / "train_epoch0.ecgb"), "--emit", "batch", "--epoch", "0"]
print(f"\n$ ecgaug {' '.join(argv)}")
assert main(argv) == 0

records, fingerprint = read_batch(root / "train_epoch0.ecgb")
train = load_manifest(root / "splits" / "train.tsv")
print(f"\nbatch file: {len(records)} records of length {records[0].signal.num_samples}, "
      f"policy fingerprint {fingerprint}")
assert [r.id for r in records] == [e.record_id for e in train.entries]
print("batch order matches the train manifest")
