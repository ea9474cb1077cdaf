"""Standalone SVG 1.1 rendering of a scene and its ray traces.

Geometry is emitted in scene coordinates (metres) inside a group that flips the
y axis, so a wall from (5,5) to (5,8) appears as ``<line x1="5" y1="5" .../>``.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape, quoteattr

from .geometry import Point2
from .metasurface import PlacedUnit
from .raytrace import Terminal, Trace
from .scene import Scene

_COLORS = {
    Terminal.RECEIVED: "#1f77b4",
    Terminal.ABSORBED: "#7f7f7f",
    Terminal.ESCAPED: "#bcbd22",
    Terminal.MAX_BOUNCES: "#9467bd",
}


def _num(v: float) -> str:
    return format(v, ".10g")


def _bounds(scene: Scene, deployment, traces) -> tuple[float, float, float, float]:
    pts: list[Point2] = []
    for w in scene.walls:
        pts += [w.a, w.b]
    for dev in (scene.tx, scene.rx):
        if dev is not None:
            pts.append(dev.position)
    pts += [s.position for s in scene.slots]
    for p in deployment:
        pts += [p.a, p.b]
    for tr in traces:
        # escaped rays run to max range; keep the view on the floorplan
        pts += tr.polyline[:-1] if tr.terminal is Terminal.ESCAPED else tr.polyline
    if not pts:
        return 0.0, 0.0, 1.0, 1.0
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    pad = 1.0
    return min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad


def _opacities(traces: Sequence[Trace]) -> list[float]:
    """Opacity in [0.05, 1] proportional to log10 of each trace's launch power."""
    logs = [math.log10(tr.powers[0]) if tr.powers and tr.powers[0] > 0 else None
            for tr in traces]
    finite = [v for v in logs if v is not None]
    if not finite:
        return [0.05] * len(traces)
    lo, hi = min(finite), max(finite)
    span = hi - lo
    return [0.05 if v is None else (1.0 if span == 0 else 0.05 + 0.95 * (v - lo) / span)
            for v in logs]


def render_svg(scene: Scene, traces: Sequence[Trace] = (),
               deployment: Sequence[PlacedUnit] = (), scale: float = 60.0,
               title: Optional[str] = None) -> str:
    x0, y0, x1, y1 = _bounds(scene, deployment, traces)
    width, height = (x1 - x0) * scale, (y1 - y0) * scale
    sw = _num(1.0 / scale)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{_num(width)}" height="{_num(height)}" fill="white"/>')
    out.append(f'<g transform="matrix({_num(scale)} 0 0 {_num(-scale)} '
               f'{_num(-x0 * scale)} {_num(y1 * scale)})">')

    out.append('<g class="traces" fill="none">')
    for tr, alpha in zip(traces, _opacities(traces)):
        pts = " ".join(f"{_num(p.x)},{_num(p.y)}" for p in tr.polyline)
        out.append(f'<polyline class={quoteattr("trace " + tr.terminal.value)} points="{pts}" '
                   f'stroke="{_COLORS[tr.terminal]}" stroke-opacity="{alpha:.4f}" '
                   f'stroke-width="{sw}"/>')
    out.append("</g>")

    out.append('<g class="walls">')
    for w in scene.walls:
        out.append(f'<line class="wall" x1="{_num(w.a.x)}" y1="{_num(w.a.y)}" '
                   f'x2="{_num(w.b.x)}" y2="{_num(w.b.y)}" stroke="red" '
                   f'stroke-width="{_num(4.0 / scale)}"/>')
    out.append("</g>")

    out.append('<g class="slots">')
    for s in scene.slots:
        out.append(f'<circle class="slot" cx="{_num(s.position.x)}" cy="{_num(s.position.y)}" '
                   f'r="{_num(3.0 / scale)}" fill="#ff9999"/>')
    out.append("</g>")

    out.append('<g class="units">')
    for p in deployment:
        out.append(f'<line class="unit" x1="{_num(p.a.x)}" y1="{_num(p.a.y)}" '
                   f'x2="{_num(p.b.x)}" y2="{_num(p.b.y)}" stroke="black" '
                   f'stroke-width="{_num(3.0 / scale)}"/>')
    out.append("</g>")

    out.append('<g class="devices">')
    for dev, color in ((scene.tx, "green"), (scene.rx, "blue")):
        if dev is None:
            continue
        out.append(f'<circle class="device {dev.role.value}" cx="{_num(dev.position.x)}" '
                   f'cy="{_num(dev.position.y)}" r="{_num(5.0 / scale)}" fill="{color}"/>')
    out.append("</g>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_svg(traces: Sequence[Trace], scene: Scene, path: Union[str, Path],
               deployment: Sequence[PlacedUnit] = (), **kwargs) -> str:
    """Write the SVG document to ``path`` and return it."""
    doc = render_svg(scene, traces, deployment, **kwargs)
    Path(path).write_text(doc)
    return doc
