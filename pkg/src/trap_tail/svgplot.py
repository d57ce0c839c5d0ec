"""Dependency-free static SVG line charts (log-t axis)."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _ticks(lo: float, hi: float, log: bool):
    if log:
        lo_e = int(math.floor(math.log10(lo)))
        hi_e = int(math.ceil(math.log10(hi)))
        return [10.0 ** e for e in range(lo_e, hi_e + 1)
                if lo <= 10.0 ** e <= hi]
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10.0 ** math.floor(math.log10(span / 4.0))
    for m in (1, 2, 5, 10):
        if span / (step * m) <= 6:
            step *= m
            break
    first = math.ceil(lo / step) * step
    return list(np.arange(first, hi + step / 2, step))


def line_chart_svg(path, curves, *, title: str = "", x_label: str = "t",
                   y_label: str = "", width: int = 720, height: int = 480,
                   log_x: bool = True) -> None:
    """Write a static SVG chart.

    curves: list of (label, x_array, y_array).
    """
    if not curves or any(len(x) == 0 for _, x, _ in curves):
        raise DomainError("nothing to plot")
    ml, mr, mt, mb = 70, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    xs = np.concatenate([np.asarray(x, float) for _, x, _ in curves])
    ys = np.concatenate([np.asarray(y, float) for _, _, y in curves])
    if log_x and np.any(xs <= 0):
        raise DomainError("log axis needs positive x")
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def px(x):
        if log_x:
            return ml + pw * (math.log(x) - math.log(x_lo)) / \
                (math.log(x_hi) - math.log(x_lo))
        return ml + pw * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        return mt + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="black"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="15">{title}</text>')
    for tx in _ticks(x_lo, x_hi, log_x):
        x = px(tx)
        parts.append(f'<line x1="{x:.2f}" y1="{mt + ph}" x2="{x:.2f}" '
                     f'y2="{mt + ph + 5}" stroke="black"/>')
        label = f"1e{int(round(math.log10(tx)))}" if log_x else f"{tx:g}"
        parts.append(f'<text x="{x:.2f}" y="{mt + ph + 20}" '
                     'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="12">{label}</text>')
    for ty in _ticks(y_lo, y_hi, False):
        y = py(ty)
        parts.append(f'<line x1="{ml - 5}" y1="{y:.2f}" x2="{ml}" '
                     f'y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{ml - 8}" y="{y + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="12">{ty:.4g}</text>')
    parts.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" '
                 'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="13">{x_label}</text>')
    if y_label:
        parts.append(f'<text x="16" y="{mt + ph / 2:.1f}" '
                     'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="13" transform="rotate(-90 16 '
                     f'{mt + ph / 2:.1f})">{y_label}</text>')
    for ci, (label, x, y) in enumerate(curves):
        color = _COLORS[ci % len(_COLORS)]
        pts = " ".join(f"{px(float(a)):.2f},{py(float(b)):.2f}"
                       for a, b in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        ly = mt + 18 + 16 * ci
        parts.append(f'<line x1="{ml + pw - 150}" y1="{ly - 4}" '
                     f'x2="{ml + pw - 125}" y2="{ly - 4}" stroke="{color}" '
                     'stroke-width="2"/>')
        parts.append(f'<text x="{ml + pw - 120}" y="{ly}" '
                     f'font-family="sans-serif" font-size="12">{label}</text>')
    parts.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
