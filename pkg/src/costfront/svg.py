"""Hand-written SVG scatter plots with frontier overlays.

Output is a pure function of its inputs: fixed 800x600 canvas, fixed number
formatting, no timestamps. Every plotted point carries its exact data
coordinates in ``data-x`` / ``data-y`` attributes so plots can be checked
against the JSON front output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from .core import CombinationMode, ContractError
from .pareto import Frontier

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 90, 30, 40, 70


@dataclass(frozen=True)
class PlotSpec:
    x: str
    y: str
    log_x: bool = False
    show_front: bool = True
    front_mode: CombinationMode | None = None
    annotate: bool = False
    gradient_arrows: tuple[tuple[float, float], ...] | None = None
    title: str = ""

    def __post_init__(self):
        if self.x == self.y:
            raise ContractError("x and y must be different dimensions")


def _num(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    out = []
    k = 0
    while start + k * step <= hi + step * 1e-9:
        out.append(round(start + k * step, 12))
        k += 1
    return out


class _Axis:
    def __init__(self, values: Sequence[float], lo_px: float, hi_px: float, log: bool):
        self.log = log
        if log:
            if any(v <= 0 for v in values):
                raise ContractError("log-scale axis needs strictly positive values")
            values = [math.log10(v) for v in values]
        lo, hi = min(values), max(values)
        pad = (hi - lo) * 0.05 if hi > lo else max(abs(hi) * 0.05, 0.5)
        self.lo, self.hi = lo - pad, hi + pad
        self.lo_px, self.hi_px = lo_px, hi_px

    def __call__(self, v: float) -> float:
        t = math.log10(v) if self.log else v
        return self.lo_px + (t - self.lo) / (self.hi - self.lo) * (self.hi_px - self.lo_px)

    def ticks(self) -> list[tuple[float, str]]:
        if self.log:
            return [(10.0 ** e, f"1e{e}") for e in range(math.ceil(self.lo), math.floor(self.hi) + 1)]
        return [(t, f"{t:g}") for t in _ticks(self.lo, self.hi)]


def render_svg(
    points: Sequence[tuple[str, float, float]],
    spec: PlotSpec,
    front: Frontier | None = None,
) -> str:
    """Scatter ``(id, x, y)`` points; overlay ``front`` members and polyline when given."""
    if not points:
        raise ContractError("nothing to plot")
    xs = [p[1] for p in points]
    ys = [p[2] for p in points]
    if front is not None and front.polyline:
        xs += [p[0] for p in front.polyline]
        ys += [p[1] for p in front.polyline]
    ax = _Axis(xs, LEFT, WIDTH - RIGHT, spec.log_x)
    ay = _Axis(ys, HEIGHT - BOTTOM, TOP, False)
    members = set(front.members) if front is not None and spec.show_front else set()

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12pt">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" '
        'orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#888888"/></marker></defs>',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle">{escape(spec.title)}</text>')
    x0, x1, y0, y1 = LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP
    out.append(f'<g class="axes" stroke="black" fill="none">'
               f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>')
    for v, label in ax.ticks():
        px = ax(v)
        out.append(f'<line x1="{_num(px)}" y1="{y0}" x2="{_num(px)}" y2="{y0 + 5}" stroke="black"/>'
                   f'<text x="{_num(px)}" y="{y0 + 20}" text-anchor="middle">{escape(label)}</text>')
    for v, label in ay.ticks():
        py = ay(v)
        out.append(f'<line x1="{x0 - 5}" y1="{_num(py)}" x2="{x0}" y2="{_num(py)}" stroke="black"/>'
                   f'<text x="{x0 - 8}" y="{_num(py + 4)}" text-anchor="end">{escape(label)}</text>')
    xlabel = spec.x + (" (log scale)" if spec.log_x else "")
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 20}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{(y0 + y1) / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {(y0 + y1) / 2:.2f})">{escape(spec.y)}</text>')

    if front is not None and spec.show_front and front.polyline:
        coords = " ".join(f"{_num(ax(x))},{_num(ay(y))}" for x, y in front.polyline)
        data = " ".join(f"{x!r},{y!r}" for x, y in front.polyline)
        mode = (spec.front_mode or front.mode or CombinationMode.CONVEX).value
        out.append(f'<polyline class="frontier" data-mode="{mode}" data-points={quoteattr(data)} '
                   f'points="{coords}" fill="none" stroke="#1f4fbf" stroke-width="2" stroke-dasharray="6 3"/>')

    if spec.gradient_arrows and len(spec.gradient_arrows) >= 2:
        pts = spec.gradient_arrows
        for (xa, ya), (xb, yb) in zip(pts, pts[1:]):
            out.append(f'<line class="gradient" x1="{_num(ax(xa))}" y1="{_num(ay(ya))}" '
                       f'x2="{_num(ax(xb))}" y2="{_num(ay(yb))}" stroke="#888888" stroke-width="3" '
                       f'marker-end="url(#arrow)"/>')

    for rid, x, y in points:
        cls = "member" if rid in members else "point"
        fill = "#1f4fbf" if rid in members else "#999999"
        out.append(f'<circle class="{cls}" data-id={quoteattr(rid)} data-x="{x!r}" data-y="{y!r}" '
                   f'cx="{_num(ax(x))}" cy="{_num(ay(y))}" r="5" fill="{fill}"/>')
        if spec.annotate:
            out.append(f'<text x="{_num(ax(x) + 7)}" y="{_num(ay(y) - 7)}">{escape(rid)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
