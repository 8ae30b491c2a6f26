"""Minimal deterministic SVG line/scatter plots.

Self-contained vector output with no plotting dependency: fixed canvas,
fixed decimal formatting, and no timestamps or generated ids, so the
same data always renders byte-identical markup.  Supports line and
scatter series, vertical error bars, a log10 y-axis with power-of-ten
ticks, and a simple legend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mag * mult >= raw:
            step = mag * mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < step * 1e-6 else t)
        t += step
    return ticks


def _tick_label(value: float, ylog: bool) -> str:
    if ylog:
        if value == int(value):
            return f"1e{int(value)}"
        return f"{10.0 ** value:.2g}"
    if value == int(value) and abs(value) < 1e6:
        return str(int(value))
    return f"{value:g}"


@dataclass
class SvgPlot:
    """Accumulates series and renders a standalone SVG document."""

    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    width: int = 640
    height: int = 440
    ylog: bool = False
    series: list = field(default_factory=list)

    def line(self, xs, ys, label: str = "", color: str | None = None,
             dashed: bool = False):
        self.series.append(("line", tuple(map(float, xs)),
                            tuple(map(float, ys)), label, color, dashed))

    def scatter(self, xs, ys, label: str = "", color: str | None = None,
                open_marker: bool = False):
        self.series.append(("scatter", tuple(map(float, xs)),
                            tuple(map(float, ys)), label, color, open_marker))

    def errorbars(self, xs, ys, halves, label: str = "", color: str | None = None):
        self.series.append(("errorbar", tuple(map(float, xs)),
                            tuple(map(float, ys)), label, color,
                            tuple(map(float, halves))))

    # ------------------------------------------------------------- render

    def _transform_y(self, y: float) -> float:
        if self.ylog:
            return math.log10(y) if y > 0 else float("nan")
        return y

    def render(self) -> str:
        left, right, top, bottom = 62, 16, 30, 46
        pw, ph = self.width - left - right, self.height - top - bottom

        xs_all, ys_all = [], []
        for kind, xs, ys, *_rest in self.series:
            extra = _rest[-1] if kind == "errorbar" else None
            for i, (x, y) in enumerate(zip(xs, ys)):
                ty = self._transform_y(y)
                if math.isfinite(x) and math.isfinite(ty):
                    xs_all.append(x)
                    ys_all.append(ty)
                    if extra is not None:
                        for off in (-extra[i], extra[i]):
                            t2 = self._transform_y(y + off) if not self.ylog else None
                            if t2 is not None and math.isfinite(t2):
                                ys_all.append(t2)
        if not xs_all:
            xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
        x_lo, x_hi = min(xs_all), max(xs_all)
        y_lo, y_hi = min(ys_all), max(ys_all)
        if x_hi == x_lo:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        x_pad, y_pad = 0.04 * (x_hi - x_lo), 0.06 * (y_hi - y_lo)
        x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
        y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

        def px(x):
            return left + (x - x_lo) / (x_hi - x_lo) * pw

        def py(y):
            return top + (y_hi - y) / (y_hi - y_lo) * ph

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
            f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" '
            'fill="none" stroke="#333333" stroke-width="1"/>',
        ]
        if self.title:
            parts.append(f'<text x="{self.width // 2}" y="19" text-anchor="middle" '
                         f'font-family="sans-serif" font-size="13">{self.title}</text>')
        for t in _nice_ticks(x_lo, x_hi):
            x = px(t)
            parts.append(f'<line x1="{_fmt(x)}" y1="{top + ph}" x2="{_fmt(x)}" '
                         f'y2="{top + ph + 4}" stroke="#333333"/>')
            parts.append(f'<text x="{_fmt(x)}" y="{top + ph + 17}" text-anchor="middle" '
                         f'font-family="sans-serif" font-size="10">{_tick_label(t, False)}</text>')
        for t in _nice_ticks(y_lo, y_hi):
            y = py(t)
            parts.append(f'<line x1="{left - 4}" y1="{_fmt(y)}" x2="{left}" '
                         f'y2="{_fmt(y)}" stroke="#333333"/>')
            parts.append(f'<text x="{left - 7}" y="{_fmt(y + 3.5)}" text-anchor="end" '
                         f'font-family="sans-serif" font-size="10">{_tick_label(t, self.ylog)}</text>')
        if self.xlabel:
            parts.append(f'<text x="{left + pw // 2}" y="{self.height - 10}" '
                         'text-anchor="middle" font-family="sans-serif" '
                         f'font-size="11">{self.xlabel}</text>')
        if self.ylabel:
            yc = top + ph // 2
            parts.append(f'<text x="14" y="{yc}" text-anchor="middle" '
                         f'transform="rotate(-90 14 {yc})" font-family="sans-serif" '
                         f'font-size="11">{self.ylabel}</text>')

        legend = []
        for si, (kind, xs, ys, label, color, extra) in enumerate(self.series):
            col = color or _PALETTE[si % len(_PALETTE)]
            pts = [(px(x), py(self._transform_y(y))) for x, y in zip(xs, ys)
                   if math.isfinite(px(x)) and math.isfinite(self._transform_y(y))]
            if kind == "line" and len(pts) >= 2:
                d = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
                dash = ' stroke-dasharray="6 4"' if extra else ""
                parts.append(f'<polyline points="{d}" fill="none" '
                             f'stroke="{col}" stroke-width="1.5"{dash}/>')
            elif kind == "scatter":
                fill = "white" if extra else col
                for x, y in pts:
                    parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" '
                                 f'fill="{fill}" stroke="{col}" stroke-width="1.2"/>')
            elif kind == "errorbar":
                for (x, y), h in zip(zip(xs, ys), extra):
                    cx = px(x)
                    y1, y2 = self._transform_y(y - h), self._transform_y(y + h)
                    cy = self._transform_y(y)
                    if not (math.isfinite(cx) and math.isfinite(cy)):
                        continue
                    if math.isfinite(y1) and math.isfinite(y2):
                        parts.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(py(y1))}" '
                                     f'x2="{_fmt(cx)}" y2="{_fmt(py(y2))}" '
                                     f'stroke="{col}" stroke-width="1"/>')
                    parts.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(py(cy))}" r="3" '
                                 f'fill="{col}"/>')
            if label:
                legend.append((label, col, kind, extra))

        for li, (label, col, kind, extra) in enumerate(legend):
            ly = top + 8 + 16 * li
            lx = left + pw - 150
            if kind == "line":
                dash = ' stroke-dasharray="6 4"' if extra else ""
                parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
                             f'stroke="{col}" stroke-width="1.5"{dash}/>')
            else:
                fill = "white" if kind == "scatter" and extra else col
                parts.append(f'<circle cx="{lx + 11}" cy="{ly}" r="3" fill="{fill}" '
                             f'stroke="{col}" stroke-width="1.2"/>')
            parts.append(f'<text x="{lx + 28}" y="{ly + 3.5}" font-family="sans-serif" '
                         f'font-size="10">{label}</text>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
