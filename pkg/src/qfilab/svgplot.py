"""Minimal standalone SVG line plots (no plotting dependency).

Curves are dicts: {"x": ..., "y": ..., "yerr": optional, "label": str,
"style": "data" | "prediction" | "fit"}. Data curves are solid with
markers and error bars, predictions dashed, fits dotted.
"""
from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 440
MARGIN = {"left": 72, "right": 24, "top": 40, "bottom": 56}
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
DASH = {"data": None, "prediction": "8,5", "fit": "2,4"}


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * step:
        out.append(round(v, 12))
        v += step
    return out


def _log_ticks(lo: float, hi: float) -> list[float]:
    out = []
    e = math.floor(math.log10(lo))
    while 10.0**e <= hi * (1 + 1e-12):
        if 10.0**e >= lo * (1 - 1e-12):
            out.append(10.0**e)
        e += 1
    return out or [lo, hi]


def emit_svg(curves, path, *, title: str = "", xlabel: str = "", ylabel: str = "",
             logy: bool = False) -> str:
    """Write a plot of the given curves to `path`; returns the SVG text."""
    if not curves:
        raise ValueError("need at least one curve")
    xs_all = [float(x) for c in curves for x in c["x"]]
    ys_all = [float(y) for c in curves for y in c["y"]]
    if logy:
        ys_all = [y for y in ys_all if y > 0]
        if not ys_all:
            raise ValueError("log-scale plot needs positive values")
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    if not logy:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    px_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    px_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x: float) -> float:
        return MARGIN["left"] + (x - x_lo) / (x_hi - x_lo) * px_w

    def sy(y: float) -> float:
        if logy:
            f = (math.log10(y) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
        else:
            f = (y - y_lo) / (y_hi - y_lo)
        return MARGIN["top"] + (1.0 - f) * px_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" '
                     f'font-size="14">{title}</text>')

    # axes
    x0, y0 = MARGIN["left"], MARGIN["top"] + px_h
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + px_w}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{MARGIN["top"]}" x2="{x0}" y2="{y0}" stroke="black"/>')
    for tx in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{sx(tx):.2f}" y1="{y0}" x2="{sx(tx):.2f}" y2="{y0 + 5}" '
                     'stroke="black"/>')
        parts.append(f'<text x="{sx(tx):.2f}" y="{y0 + 18}" text-anchor="middle">{tx:g}</text>')
    for ty in (_log_ticks(y_lo, y_hi) if logy else _ticks(y_lo, y_hi)):
        parts.append(f'<line x1="{x0 - 5}" y1="{sy(ty):.2f}" x2="{x0}" y2="{sy(ty):.2f}" '
                     'stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{sy(ty):.2f}" text-anchor="end" '
                     f'dominant-baseline="middle">{ty:g}</text>')
    if xlabel:
        parts.append(f'<text x="{x0 + px_w / 2}" y="{HEIGHT - 12}" '
                     f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{MARGIN["top"] + px_h / 2}" text-anchor="middle" '
                     f'transform="rotate(-90 18 {MARGIN["top"] + px_h / 2})">{ylabel}</text>')

    # curves
    for i, c in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        style = c.get("style", "data")
        dash = DASH.get(style)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                       for x, y in zip(c["x"], c["y"])
                       if not logy or float(y) > 0)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"{dash_attr}/>')
        if style == "data":
            yerr = c.get("yerr")
            for j, (x, y) in enumerate(zip(c["x"], c["y"])):
                x, y = float(x), float(y)
                if logy and y <= 0:
                    continue
                parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" '
                             f'fill="{color}"/>')
                if yerr is not None and float(yerr[j]) > 0:
                    e = float(yerr[j])
                    lo, hi = y - e, y + e
                    if logy:
                        lo = max(lo, y_lo * 1e-3)
                    parts.append(f'<line class="errorbar" x1="{sx(x):.2f}" '
                                 f'y1="{sy(lo):.2f}" x2="{sx(x):.2f}" y2="{sy(hi):.2f}" '
                                 f'stroke="{color}"/>')
        label = c.get("label", f"curve {i}")
        ly = MARGIN["top"] + 14 + 16 * i
        lx = MARGIN["left"] + px_w - 150
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.5"{dash_attr}/>')
        parts.append(f'<text x="{lx + 30}" y="{ly}">{label}</text>')

    parts.append("</svg>")
    text = "\n".join(parts)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
