"""Barcode plots as standalone SVG documents (no plotting library needed)."""

from __future__ import annotations

import math
from typing import Optional
from xml.sax.saxutils import escape

from .persistence import Barcode

WIDTH = 640
MARGIN_LEFT = 48
MARGIN_RIGHT = 24
MARGIN_TOP = 24
BAR_HEIGHT = 6
BAR_GAP = 3
GROUP_GAP = 18
AXIS_HEIGHT = 36

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _num(x: float) -> str:
    return format(round(x, 3), "g")


def render_barcode_svg(barcode: Barcode, rmax: Optional[float] = None, title: Optional[str] = None) -> str:
    """SVG text with one horizontal bar per interval, grouped by degree.

    The x-axis spans ``[0, rmax]``; intervals still alive at ``rmax``
    (including essential ones) run to the right edge and end in an arrowhead.
    Each bar is a ``<rect class="bar">`` carrying its interval as data
    attributes.
    """
    if rmax is None:
        rmax = barcode.rmax
    if rmax is None or not math.isfinite(rmax) or rmax <= 0:
        finite = [v for _, b, d in barcode.intervals for v in (b, d) if math.isfinite(v)]
        rmax = 1.05 * max(finite) if finite and max(finite) > 0 else 1.0
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT

    def x(v):
        return MARGIN_LEFT + plot_w * min(max(v, 0.0), rmax) / rmax

    body = []
    y = MARGIN_TOP
    for dim in barcode.degrees:
        colour = _COLOURS[dim % len(_COLOURS)]
        bars = sorted(barcode.in_degree(dim).tolist(), key=lambda bd: (bd[0], -bd[1]))
        top = y
        for birth, death in bars:
            clipped = not death < rmax
            x0, x1 = x(birth), x(death)
            attrs = (f'class="bar" data-dim="{dim}" data-birth="{birth!r}" data-death="{death!r}" '
                     f'x="{x0:.3f}" y="{y}" width="{max(x1 - x0, 0.0):.3f}" height="{BAR_HEIGHT}" fill="{colour}"')
            body.append(f"  <rect {attrs}/>")
            if clipped:
                ym = y + BAR_HEIGHT / 2
                body.append(f'  <path class="arrow" d="M{x1:.3f},{y - 2} L{x1 + 8:.3f},{ym} '
                            f'L{x1:.3f},{y + BAR_HEIGHT + 2} Z" fill="{colour}"/>')
            y += BAR_HEIGHT + BAR_GAP
        label_y = (top + y) / 2 + 4
        body.append(f'  <text class="degree" x="{MARGIN_LEFT - 8}" y="{label_y:.1f}" '
                    f'text-anchor="end" font-size="12">H{dim}</text>')
        y += GROUP_GAP
    axis_y = y
    height = axis_y + AXIS_HEIGHT
    axis = [f'  <line class="axis" x1="{MARGIN_LEFT}" y1="{axis_y}" x2="{MARGIN_LEFT + plot_w}" '
            f'y2="{axis_y}" stroke="black"/>']
    for i in range(6):
        v = rmax * i / 5
        tx = x(v)
        axis.append(f'  <line class="tick" x1="{tx:.3f}" y1="{axis_y}" x2="{tx:.3f}" y2="{axis_y + 5}" stroke="black"/>')
        axis.append(f'  <text x="{tx:.3f}" y="{axis_y + 18}" text-anchor="middle" font-size="10">{_num(v)}</text>')
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" data-rmax="{rmax!r}">',
    ]
    if title:
        head.append(f"  <title>{escape(title)}</title>")
    return "\n".join(head + body + axis + ["</svg>"]) + "\n"
