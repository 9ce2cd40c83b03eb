"""Minimal SVG line charts, built as strings — no plotting dependency.

Produces a self-contained, well-formed SVG document: axes, tick labels,
optional decade-gridded log x axis, one polyline per series, and a legend.
Intended for quick visual inspection of loss curves, not publication plots.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import DomainError, InputError

__all__ = ["render_line_chart"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")

_MARGIN_LEFT = 74.0
_MARGIN_RIGHT = 24.0
_MARGIN_TOP = 42.0
_MARGIN_BOTTOM = 56.0


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _y_ticks(lo: float, hi: float) -> list[float]:
    return list(np.linspace(lo, hi, 5))


def _x_ticks_log(lo: float, hi: float) -> list[tuple[float, str]]:
    """Decade ticks for a log axis, thinned to at most ~10 labels."""
    first, last = math.ceil(lo - 1e-9), math.floor(hi + 1e-9)
    if first > last:
        return [(lo, f"{10.0**lo:.3g}"), (hi, f"{10.0**hi:.3g}")]
    step = max(1, (last - first) // 9)
    return [(float(k), f"1e{k}") for k in range(first, last + 1, step)]


def render_line_chart(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    *,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    log_x: bool = True,
    width: int = 720,
    height: int = 480,
) -> str:
    """Render ``(label, xs, ys)`` series to an SVG document string.

    The x axis is log-scaled by default (ticks at powers of ten), y is
    linear.  Labels are XML-escaped; the output parses as standalone XML.
    """
    if len(series) == 0:
        raise InputError("at least one series is required")
    prepared = []
    for label, xs, ys in series:
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        if x.shape != y.shape or x.ndim != 1 or x.size < 2:
            raise InputError(f"series {label!r} needs matching x/y arrays of length >= 2")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError(f"series {label!r} contains non-finite values")
        if log_x:
            if np.any(x <= 0):
                raise DomainError(f"series {label!r} has non-positive x on a log axis")
            x = np.log10(x)
        prepared.append((str(label), x, y))

    x_lo = min(float(x.min()) for _, x, _ in prepared)
    x_hi = max(float(x.max()) for _, x, _ in prepared)
    y_lo = min(float(y.min()) for _, _, y in prepared)
    y_hi = max(float(y.max()) for _, _, y in prepared)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    pad = (y_hi - y_lo) * 0.05 or max(abs(y_hi) * 0.05, 0.5)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x: float) -> float:
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>'
        )

    x_ticks = _x_ticks_log(x_lo, x_hi) if log_x else [(v, f"{v:.4g}") for v in np.linspace(x_lo, x_hi, 5)]
    for xv, lab in x_ticks:
        if not x_lo - 1e-9 <= xv <= x_hi + 1e-9:
            continue
        gx = _fmt(px(xv))
        parts.append(
            f'<line x1="{gx}" y1="{_fmt(_MARGIN_TOP)}" x2="{gx}" y2="{_fmt(_MARGIN_TOP + plot_h)}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{gx}" y="{_fmt(_MARGIN_TOP + plot_h + 18)}" text-anchor="middle">{escape(lab)}</text>'
        )
    for yv in _y_ticks(y_lo, y_hi):
        gy = _fmt(py(yv))
        parts.append(
            f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{gy}" x2="{_fmt(_MARGIN_LEFT + plot_w)}" y2="{gy}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 8)}" y="{_fmt(py(yv) + 4)}" text-anchor="end">{yv:.4g}</text>'
        )

    # axes on top of the grid
    parts.append(
        f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(_MARGIN_TOP)}" width="{_fmt(plot_w)}" '
        f'height="{_fmt(plot_h)}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    if x_label:
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT + plot_w / 2)}" y="{_fmt(height - 14)}" '
            f'text-anchor="middle">{escape(x_label)}</text>'
        )
    if y_label:
        cx, cy = 18.0, _MARGIN_TOP + plot_h / 2
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{escape(y_label)}</text>'
        )

    for i, (label, x, y) in enumerate(prepared):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, y))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )

    legend_x = _MARGIN_LEFT + plot_w - 150
    for i, (label, _, _) in enumerate(prepared):
        color = _PALETTE[i % len(_PALETTE)]
        ly = _MARGIN_TOP + 14 + 16 * i
        parts.append(
            f'<line x1="{_fmt(legend_x)}" y1="{_fmt(ly)}" x2="{_fmt(legend_x + 22)}" y2="{_fmt(ly)}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(f'<text x="{_fmt(legend_x + 28)}" y="{_fmt(ly + 4)}">{escape(label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts)
