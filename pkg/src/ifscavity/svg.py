"""Single-panel SVG line plots of witness series, written by hand.

Output depends only on the data: fixed canvas, fixed number formatting, no
timestamps or random ids.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 72, 24, 40, 56
COLORS = {"paper": "#1f4e9c", "oracle": "#c0392b"}
Y_LABELS = {"mandel": "Qᴹ", "squeezing": "S_opt"}


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    raw = span / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = first
    while v <= hi + step * 1e-9:
        ticks.append(0.0 if abs(v) < step * 1e-9 else v)
        v = first + len(ticks) * step
    return ticks


def _tick_label(v: float) -> str:
    return format(round(v, 10), "g")


def _y_range(values):
    vals = [v for v in values if v is not None]
    lo, hi = min(vals + [0.0]), max(vals + [0.0])
    if hi - lo < 1e-12:
        return -1.0, 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def emit_svg(series_list, title: str | None = None) -> str:
    """One polyline per mode (split at undefined samples), zero line, axes, legend."""
    if not series_list or not any(s.rows for s in series_list):
        raise ValueError("cannot plot an empty series")
    xs = [r.gt for s in series_list for r in s.rows]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = _y_range([v for s in series_list for v in s.values()])
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return TOP + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')

    out.append('<g class="grid" stroke="#dddddd" stroke-width="0.5">')
    x_ticks = nice_ticks(x_lo, x_hi)
    y_ticks = nice_ticks(y_lo, y_hi)
    for t in x_ticks:
        out.append(f'<line x1="{px(t):.2f}" y1="{TOP}" x2="{px(t):.2f}" y2="{TOP + ph}"/>')
    for t in y_ticks:
        out.append(f'<line x1="{LEFT}" y1="{py(t):.2f}" x2="{LEFT + pw}" y2="{py(t):.2f}"/>')
    out.append("</g>")

    out.append(
        f'<line class="zero" x1="{LEFT}" y1="{py(0.0):.2f}" x2="{LEFT + pw}" y2="{py(0.0):.2f}" '
        'stroke="#555555" stroke-width="1" stroke-dasharray="4 3"/>'
    )
    out.append(f'<rect class="frame" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append('<g class="ticks" text-anchor="middle">')
    for t in x_ticks:
        out.append(f'<text x="{px(t):.2f}" y="{TOP + ph + 16}">{_tick_label(t)}</text>')
    out.append("</g>")
    out.append('<g class="ticks" text-anchor="end">')
    for t in y_ticks:
        out.append(f'<text x="{LEFT - 6}" y="{py(t) + 4:.2f}">{_tick_label(t)}</text>')
    out.append("</g>")
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 14}" text-anchor="middle">gt</text>')
    ylabel = escape(Y_LABELS.get(series_list[0].witness, series_list[0].witness))
    out.append(
        f'<text x="18" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + ph / 2:.2f})">{ylabel}</text>'
    )

    for s in series_list:
        color = COLORS.get(s.mode, "black")
        segment = []
        segments = []
        for r, v in zip(s.rows, s.values()):
            if v is None:
                if segment:
                    segments.append(segment)
                segment = []
            else:
                segment.append(f"{px(r.gt):.2f},{py(v):.2f}")
        if segment:
            segments.append(segment)
        for seg in segments:
            out.append(
                f'<polyline class="series" data-mode="{escape(s.mode)}" fill="none" stroke="{color}" '
                f'stroke-width="1.2" points="{" ".join(seg)}"/>'
            )

    out.append('<g class="legend">')
    for i, s in enumerate(series_list):
        y = TOP + 14 + 16 * i
        x = LEFT + pw - 90
        color = COLORS.get(s.mode, "black")
        out.append(f'<line x1="{x}" y1="{y - 4}" x2="{x + 20}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x + 26}" y="{y}">{escape(s.mode)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
