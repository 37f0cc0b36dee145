"""Static SVG plots of records, optionally overlaying an augmented variant.

Hand-rolled SVG keeps the output deterministic and dependency-free: one
polyline per waveform variant, axes annotated in seconds and normalized
amplitude units.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .core import Record

_WIDTH, _HEIGHT = 960, 360
_MARGIN_LEFT, _MARGIN_RIGHT = 60, 20
_MARGIN_TOP, _MARGIN_BOTTOM = 20, 40
_COLORS = ("#1f77b4", "#d62728", "#2ca02c")


def _polyline_points(samples: np.ndarray, rate_hz: float, t_max_s: float,
                     y_lo: float, y_hi: float) -> str:
    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM
    times = np.arange(samples.size) / rate_hz
    xs = _MARGIN_LEFT + times / t_max_s * plot_w
    ys = _MARGIN_TOP + (y_hi - samples) / (y_hi - y_lo) * plot_h
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))


def render_svg(record: Record, variants: dict[str, Record] | None = None) -> str:
    """Render the record's first lead, plus optional named overlay variants."""
    series = [("base", record)] + sorted((variants or {}).items())
    all_samples = np.concatenate([r.signal.leads[0] for _, r in series])
    y_lo = float(all_samples.min())
    y_hi = float(all_samples.max())
    if y_hi - y_lo < 1e-12:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    t_max_s = max(r.signal.duration_s for _, r in series)

    plot_right = _WIDTH - _MARGIN_RIGHT
    plot_bottom = _HEIGHT - _MARGIN_BOTTOM
    zero_y = _MARGIN_TOP + (y_hi - 0.0) / (y_hi - y_lo) * (plot_bottom - _MARGIN_TOP)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_MARGIN_LEFT}" y1="{plot_bottom}" x2="{plot_right}" y2="{plot_bottom}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" x2="{_MARGIN_LEFT}" y2="{plot_bottom}" '
        'stroke="black" stroke-width="1"/>',
    ]
    if y_lo <= 0.0 <= y_hi:
        parts.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{zero_y:.2f}" x2="{plot_right}" y2="{zero_y:.2f}" '
            'stroke="#cccccc" stroke-width="0.5"/>'
        )
    for i, (name, rec) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        points = _polyline_points(rec.signal.leads[0], rec.signal.sample_rate_hz,
                                  t_max_s, y_lo, y_hi)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="0.8" '
            f'data-series="{escape(name)}" points="{points}"/>'
        )
        parts.append(
            f'<text x="{plot_right - 150}" y="{_MARGIN_TOP + 14 + 16 * i}" '
            f'fill="{color}" font-size="12">{escape(name)}</text>'
        )
    # axis annotations: seconds along x, normalized units along y
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = _MARGIN_LEFT + frac * (plot_right - _MARGIN_LEFT)
        parts.append(
            f'<text x="{x:.1f}" y="{plot_bottom + 16}" font-size="11" '
            f'text-anchor="middle">{frac * t_max_s:.1f}</text>'
        )
        y = _MARGIN_TOP + (1 - frac) * (plot_bottom - _MARGIN_TOP)
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{y + 4:.1f}" font-size="11" '
            f'text-anchor="end">{y_lo + frac * (y_hi - y_lo):.2f}</text>'
        )
    parts.append(
        f'<text x="{(plot_right + _MARGIN_LEFT) / 2:.0f}" y="{_HEIGHT - 6}" font-size="12" '
        'text-anchor="middle">time (s)</text>'
    )
    parts.append(
        f'<text x="14" y="{(_MARGIN_TOP + plot_bottom) / 2:.0f}" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 14 {(_MARGIN_TOP + plot_bottom) / 2:.0f})">'
        'amplitude (normalized)</text>'
    )
    parts.append(f'<text x="{_MARGIN_LEFT}" y="14" font-size="12">{escape(record.id)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
