"""Render every augmentation op once, at a fixed magnitude, as SVG overlays.

Each figure shows the base waveform and one transformed variant.  Parameters
are drawn exactly the way a policy would draw them (same stream machinery),
so the gallery doubles as a visual check of the magnitude mapping.

    python demos/02_augmentation_gallery.py
"""

from pathlib import Path

import numpy as np

from ecgaug import ALL_OP_KINDS, Label, Record, Signal, apply_op, derive_stream, sample_params
from ecgaug.render import render_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

MAGNITUDE = 20

rng = np.random.default_rng(11)
n = 3050
beats = np.zeros(n)
beats[::130] = 1.0
wave = (np.convolve(beats, np.hanning(9), "same")
        + 0.15 * np.sin(2 * np.pi * np.arange(n) / 700)
        + rng.normal(0, 0.02, n)).astype(np.float32)
base = Record("GALLERY", Signal(50.0, wave), Label.NORMAL)

print(f"magnitude {MAGNITUDE}/30, one draw per op:")
for kind in ALL_OP_KINDS:
    stream = derive_stream(master_seed=5, epoch=0, record_id=f"gallery-{kind.value}")
    params = sample_params(kind, MAGNITUDE, n, 50.0, stream)
    out = apply_op(base.signal, params)
    delta = float(np.abs(out.leads - base.signal.leads).max())
    print(f"  {kind.value:<20} max|delta| = {delta:.3f}")
    svg = render_svg(base, {kind.value: Record(base.id, out, base.label)})
    (OUT / f"02_{kind.value}.svg").write_text(svg)

print(f"wrote {len(ALL_OP_KINDS)} figures to {OUT}")
