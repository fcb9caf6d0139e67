"""Minimal self-contained SVG line charts with a log10 y-axis."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd")
FLOOR = 1e-300
MAX_POINTS = 2000


def _thin(xs, ys):
    step = max(1, math.ceil(len(xs) / MAX_POINTS))
    idx = list(range(0, len(xs), step))
    if idx[-1] != len(xs) - 1:
        idx.append(len(xs) - 1)
    return [xs[i] for i in idx], [ys[i] for i in idx]


def log_line_chart(series: dict, title: str, xlabel: str = "n",
                   width: int = 640, height: int = 400) -> str:
    """``series`` maps a label to ``(xs, ys)``; non-positive y values are drawn at the floor."""
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    logs = {k: [math.log10(max(y, FLOOR)) for y in ys if math.isfinite(y)]
            for k, (_, ys) in series.items()}
    all_x = [x for xs, _ in series.values() for x in xs] or [0]
    all_y = [v for vs in logs.values() for v in vs] or [0.0]
    x0, x1 = min(all_x), max(all_x)
    y0, y1 = math.floor(min(all_y)), math.ceil(max(all_y))
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(x):
        return left + pw * (x - x0) / (x1 - x0)

    def sy(v):
        return top + ph * (1 - (v - y0) / (y1 - y0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    ticks = range(y0, y1 + 1, max(1, (y1 - y0) // 8))
    for t in ticks:
        y = sy(t)
        out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">1e{t}</text>')
    for frac in (0, 0.5, 1):
        xv = x0 + frac * (x1 - x0)
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 16}" text-anchor="middle">{xv:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    for i, (label, (xs, ys)) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        pairs = [(x, y) for x, y in zip(xs, ys) if math.isfinite(y)]
        if not pairs:
            continue
        txs, tys = _thin([p[0] for p in pairs], [p[1] for p in pairs])
        pts = " ".join(f"{sx(x):.2f},{sy(math.log10(max(y, FLOOR))):.2f}" for x, y in zip(txs, tys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 + 14 * i
        out.append(f'<line x1="{left + pw - 120}" y1="{ly - 4}" x2="{left + pw - 100}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 95}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
