"""Minimal static SVG line charts: axes, polylines, legend.

Pure presentation over already-computed rows; nothing downstream reads
these files back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 24, 40, 52
_PLOT_W, _PLOT_H = 520, 360


@dataclass
class Series:
    label: str
    xs: list[float]
    ys: list[float]


def render_line_chart(
    series: list[Series],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    width = _MARGIN_L + _PLOT_W + _MARGIN_R
    height = _MARGIN_T + _PLOT_H + _MARGIN_B
    pts = [(x, y) for s in series for x, y in zip(s.xs, s.ys)]
    if not pts:
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
            f'<text x="{width / 2}" y="{height / 2}" text-anchor="middle">no data</text></svg>'
        )
    x_lo, x_hi = _padded_range([p[0] for p in pts])
    y_lo, y_hi = _padded_range([p[1] for p in pts])

    def sx(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * _PLOT_W

    def sy(y: float) -> float:
        return _MARGIN_T + _PLOT_H - (y - y_lo) / (y_hi - y_lo) * _PLOT_H

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">{_esc(title)}</text>',
    ]
    # axes box and ticks
    out.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{_PLOT_W}" height="{_PLOT_H}" '
        'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for t in _ticks(x_lo, x_hi):
        px = sx(t)
        out.append(f'<line x1="{px:.1f}" y1="{_MARGIN_T + _PLOT_H}" x2="{px:.1f}" '
                   f'y2="{_MARGIN_T + _PLOT_H + 5}" stroke="#333"/>')
        out.append(f'<text x="{px:.1f}" y="{_MARGIN_T + _PLOT_H + 19}" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        py = sy(t)
        out.append(f'<line x1="{_MARGIN_L - 5}" y1="{py:.1f}" x2="{_MARGIN_L}" '
                   f'y2="{py:.1f}" stroke="#333"/>')
        out.append(f'<text x="{_MARGIN_L - 9}" y="{py + 4:.1f}" '
                   f'text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{_MARGIN_L + _PLOT_W / 2:.1f}" y="{height - 14}" '
               f'text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="18" y="{_MARGIN_T + _PLOT_H / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {_MARGIN_T + _PLOT_H / 2:.1f})">{_esc(ylabel)}</text>')

    for k, s in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(s.xs, s.ys))
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        for x, y in zip(s.xs, s.ys):
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.6" fill="{color}"/>')
        ly = _MARGIN_T + 14 + 16 * k
        lx = _MARGIN_L + _PLOT_W - 140
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="1.8"/>')
        out.append(f'<text x="{lx + 28}" y="{ly}">{_esc(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out)


def _padded_range(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = max(abs(hi), 1.0) * 0.1
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.06
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    span = hi - lo
    step = 10.0 ** np.floor(np.log10(span / n)) if span > 0 else 1.0
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = np.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(float(t))
        t += step
    return ticks


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e6:
        return str(int(x))
    return f"{x:.3g}"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
