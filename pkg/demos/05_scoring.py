"""The challenge scoring rule on a synthetic confusion pattern.

The final score is the mean F1 of Normal, AF, and Other; the Noisy class is
reported but never averaged in, so it only matters through misclassification
leakage.

    python demos/05_scoring.py
"""

import numpy as np

from ecgaug import Label, challenge_score, confusion
from ecgaug.scoring import format_report

rng = np.random.default_rng(1)

# simulate a classifier that is strong on Normal, weaker on AF and Other
truths, preds = [], []
accuracy = {Label.NORMAL: 0.95, Label.AF: 0.75, Label.OTHER: 0.8, Label.NOISY: 0.5}
support = {Label.NORMAL: 600, Label.AF: 90, Label.OTHER: 300, Label.NOISY: 10}
for label, n in support.items():
    for _ in range(n):
        truths.append(label)
        if rng.random() < accuracy[label]:
            preds.append(label)
        else:
            preds.append(Label(int(rng.choice([l for l in range(4) if l != int(label)]))))

report = challenge_score(confusion(truths, preds))
print(format_report(report))

# sanity: the mean really ignores the noisy F1
mean3 = (report.f1_normal + report.f1_af + report.f1_other) / 3
assert report.final_score == mean3
print(f"\nfinal score recomputed from the three per-class values: {mean3:.4f}")
