"""Standalone SVG pictures of a loop soup.

Layers are painted in a fixed order: domain outline, cluster fillings, loops,
outer contours, exploration annotations.  Site (x, y) maps to pixel
((x - xmin + margin) * scale, (ymax - y + margin) * scale), so north is up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .clusters import boundary_touching_loops, build_clusters
from .loops import LoopSoupSample
from .topology import outer_contour

LAYERS = ("fillings", "loops", "contours", "boundary", "interior", "exploration")
DEFAULT_LAYERS = ("fillings", "boundary", "interior", "contours")

PALETTE = {
    "outline": "#808080",
    "filling": "#fbe3e3",
    "loop": "#9a9a9a",
    "contour": "red",
    "boundary": "blue",
    "interior": "black",
    "exploration": "green",
}


class UnknownLayer(ValueError):
    pass


@dataclass(frozen=True)
class RenderSpec:
    layers: tuple = DEFAULT_LAYERS
    colors: dict = field(default_factory=lambda: dict(PALETTE))
    scale: float = 4.0
    min_diameter: float = 0.0  # clusters below this are skipped in the cluster layers

    def __post_init__(self):
        bad = [name for name in self.layers if name not in LAYERS]
        if bad:
            raise UnknownLayer(f"unknown layer(s) {', '.join(bad)}; choose from {', '.join(LAYERS)}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @classmethod
    def parse(cls, text: str, **kw) -> "RenderSpec":
        names = tuple(t.strip() for t in text.split(",") if t.strip())
        return cls(layers=names, **kw)


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


class _Canvas:
    def __init__(self, bbox, scale: float, margin: float = 2.0):
        self.x0, self.y0, self.x1, self.y1 = bbox
        self.s = scale
        self.m = margin

    def px(self, x, y) -> str:
        return f"{_num((x - self.x0 + self.m) * self.s)},{_num((self.y1 - y + self.m) * self.s)}"

    def points(self, pts) -> str:
        return " ".join(self.px(x, y) for x, y in pts)

    @property
    def size(self) -> tuple[str, str]:
        return _num((self.x1 - self.x0 + 2 * self.m) * self.s), _num((self.y1 - self.y0 + 2 * self.m) * self.s)


def _outline(domain, cv: _Canvas, color: str) -> str:
    if domain.kind == "disk":
        r = domain.radius
        cx, cy = cv.px(0, 0).split(",")
        return (f'<circle cx="{cx}" cy="{cy}" r="{_num((r + 0.5) * cv.s)}" fill="none" '
                f'stroke="{color}" stroke-width="1"/>')
    x0, y0, x1, y1 = domain.bbox
    return (f'<polygon points="{cv.points([(x0 - .5, y0 - .5), (x1 + .5, y0 - .5), (x1 + .5, y1 + .5), (x0 - .5, y1 + .5)])}" '
            f'fill="none" stroke="{color}" stroke-width="1"/>')


def _closed_path(poly: np.ndarray, cv: _Canvas) -> str:
    """Path through every vertex of a closed polyline; the last vertex equals the first."""
    head, *rest = [cv.px(x, y) for x, y in poly]
    return "M" + head + "".join(" L" + p for p in rest) + " Z"


def _polyline(sites: np.ndarray, cv: _Canvas, color: str, width: float) -> str:
    closed = np.vstack([sites, sites[:1]])
    return (f'<polyline points="{cv.points(closed.tolist())}" fill="none" stroke="{color}" '
            f'stroke-width="{_num(width)}" stroke-linejoin="round"/>')


def render_svg(sample: LoopSoupSample, spec: RenderSpec | None = None, metadata: str | None = None) -> str:
    spec = spec or RenderSpec()
    col = spec.colors
    domain = sample.config.domain
    cv = _Canvas(domain.bbox, spec.scale)
    w, h = cv.size
    lw = max(0.5, spec.scale / 6)
    layers = set(spec.layers)

    fill_el, loop_el, contour_el, note_el = [], [], [], []
    if layers & {"fillings", "contours", "boundary", "interior"} and sample.loops:
        cs = build_clusters(sample)
        for cid in cs.outermost:
            if spec.min_diameter and cs.diameter(cid) < spec.min_diameter:
                continue
            cc = cs.complete(cid)
            d = _closed_path(cc.contour.polyline(), cv)
            if "fillings" in layers:
                fill_el.append(f'<path d="{d}" fill="{col["filling"]}" stroke="none"/>')
            if "contours" in layers:
                contour_el.append(f'<path d="{d}" fill="none" stroke="{col["contour"]}" '
                                  f'stroke-width="{_num(2 * lw)}"/>')
            if layers & {"boundary", "interior"}:
                touching = set(boundary_touching_loops(cc).tolist())
                for i in cc.members.tolist():
                    kind = "boundary" if i in touching else "interior"
                    if kind in layers:
                        loop_el.append(_polyline(sample.loops[i].sites, cv, col[kind], lw))
    if "loops" in layers:
        for loop in sample.loops:
            loop_el.append(_polyline(loop.sites, cv, col["loop"], lw))
    if "exploration" in layers and sample.loops:
        from .exploration import NoSurroundingCluster, default_chord, explore_chord

        try:
            res = explore_chord(sample)
        except NoSurroundingCluster:
            note_el.append("<!-- no surrounding cluster: nothing explored -->")
        else:
            chord = default_chord(domain)
            t = int(np.flatnonzero((chord == np.asarray(res.T)).all(axis=1))[0])
            seg = chord[: t + 1].tolist()
            note_el.append(f'<polyline points="{cv.points(seg)}" fill="none" stroke="{col["exploration"]}" '
                           f'stroke-width="{_num(2 * lw)}"/>')
            if len(res.discovered):
                d = _closed_path(outer_contour(res.discovered).polyline(), cv)
                note_el.append(f'<path d="{d}" fill="none" stroke="{col["exploration"]}" '
                               f'stroke-width="{_num(lw)}" stroke-dasharray="4,2"/>')
            tx, ty = cv.px(*res.T).split(",")
            note_el.append(f'<circle cx="{tx}" cy="{ty}" r="{_num(2 * lw)}" fill="{col["exploration"]}"/>')

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    if metadata is not None:
        out.append(f"<metadata>{escape(metadata)}</metadata>")
    out.append(f'<g id="outline">{_outline(domain, cv, col["outline"])}</g>')
    for name, items in (("fillings", fill_el), ("loops", loop_el), ("contours", contour_el),
                        ("annotations", note_el)):
        if items:
            out.append(f'<g id="{name}">')
            out.extend(items)
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
