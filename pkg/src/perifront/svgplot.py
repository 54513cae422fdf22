"""Minimal standalone SVG 1.1 line plots, no plotting dependency.

Enough for the curves this laboratory produces: front position against
time, profile snapshots, periodic drifts.  Each figure is a single SVG file
with axes, ticks, labels and a small legend.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 20, 36, 48
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    for nice in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= nice * mag:
            step = nice * mag
            break
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_plot(path, series, title: str = "", xlabel: str = "",
              ylabel: str = "") -> None:
    """Write an SVG with the given [(x, y, label), ...] series."""
    if not series:
        raise ValueError("line_plot needs at least one series")
    xs_all = np.concatenate([np.asarray(s[0], dtype=float) for s in series])
    ys_all = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    x_lo, x_hi = float(np.min(xs_all)), float(np.max(xs_all))
    y_lo, y_hi = float(np.min(ys_all)), float(np.max(ys_all))
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="15">'
                   f'{escape(title)}</text>')
    for xt in _ticks(x_lo, x_hi):
        X = px(xt)
        out.append(f'<line x1="{X:.1f}" y1="{MARGIN_T + ph}" x2="{X:.1f}" '
                   f'y2="{MARGIN_T + ph + 5}" stroke="#333"/>')
        out.append(f'<text x="{X:.1f}" y="{MARGIN_T + ph + 18}" '
                   'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{_fmt(xt)}</text>')
    for yt in _ticks(y_lo, y_hi):
        Y = py(yt)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{Y:.1f}" x2="{MARGIN_L}" '
                   f'y2="{Y:.1f}" stroke="#333"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{Y + 4:.1f}" '
                   'text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{_fmt(yt)}</text>')
    if xlabel:
        out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 10}" '
                   'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="13">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{MARGIN_T + ph / 2:.1f}" '
                   'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="13" transform="rotate(-90 16 '
                   f'{MARGIN_T + ph / 2:.1f})">{escape(ylabel)}</text>')

    for i, (x, y, label) in enumerate(series):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(c):.2f}" for a, c in zip(x, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   'stroke-width="1.5"/>')
        if label:
            ly = MARGIN_T + 14 + 16 * i
            lx = MARGIN_L + pw - 140
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" '
                       f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
            out.append(f'<text x="{lx + 30}" y="{ly}" '
                       'font-family="sans-serif" font-size="12">'
                       f'{escape(label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
