"""SVG figures: dots, spanning tree and selected hypotheses."""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

SVG_NS = "http://www.w3.org/2000/svg"


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render(Z, tree=None, hypotheses=(), best=0, margin: float = 10.0) -> str:
    """SVG document; hypothesis number ``best`` is drawn black, the rest gray."""
    pts = np.asarray(Z.points if hasattr(Z, "points") else Z, dtype=float)
    if len(pts):
        lo, hi = pts.min(axis=0) - margin, pts.max(axis=0) + margin
    else:
        lo, hi = np.zeros(2), np.full(2, 2 * margin)
    w, h = hi - lo
    root = ET.Element("svg", xmlns=SVG_NS, width=_fmt(w), height=_fmt(h),
                      viewBox=" ".join(_fmt(v) for v in (lo[0], lo[1], w, h)))
    if tree is not None:
        g = ET.SubElement(root, "g", id="tree", stroke="#aaaaaa", fill="none")
        g.set("stroke-width", "0.5")
        for a, b, _ in tree.edges:
            ET.SubElement(g, "line", x1=_fmt(pts[a, 0]), y1=_fmt(pts[a, 1]),
                          x2=_fmt(pts[b, 0]), y2=_fmt(pts[b, 1]))
    g = ET.SubElement(root, "g", id="selection", fill="none")
    g.set("stroke-width", "1.5")
    order = [k for k in range(len(hypotheses)) if k != best] + ([best] if hypotheses else [])
    for k in order:  # best last so it sits on top
        idx = list(hypotheses[k].dot_indices)
        poly = ET.SubElement(g, "polygon",
                             points=" ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts[idx]))
        poly.set("stroke", "#000000" if k == best else "#999999")
        poly.set("data-dots", " ".join(map(str, idx)))
    g = ET.SubElement(root, "g", id="dots", fill="#000000")
    for x, y in pts:
        ET.SubElement(g, "circle", cx=_fmt(x), cy=_fmt(y), r="2")
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"
