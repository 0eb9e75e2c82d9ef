"""SVG pictures of the tiling in the Poincare disk.

A hyperboloid point (x, y, z) is drawn at (x, y) / (1 + z) in the unit disk,
scaled to the canvas.  Geodesics become arcs of circles orthogonal to the
boundary circle (or diameters), so pentagon sides are drawn as SVG arcs.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Iterable, Optional, Sequence

import numpy as np

from .pentagon import VERTICES

PROJECTION_NOTE = "Poincare disk: (x, y, z) -> (x, y) / (1 + z), unit disk scaled to the canvas"


def to_disk(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p[..., :2] / (1.0 + p[..., 2:3])


def _arc_cmd(a, b, size: float, scale: float) -> str:
    """Path segment from disk point a to b along the hyperbolic geodesic."""
    cross = a[0] * b[1] - a[1] * b[0]
    bx, by = (b * [1, -1]) * scale + size / 2
    if abs(cross) < 1e-12:
        return f"L {bx:.4f} {by:.4f}"
    # circle through a, b and the inversion of a in the unit circle
    a2 = a @ a
    ai = a / a2 if a2 > 1e-15 else None
    if ai is None:
        return f"L {bx:.4f} {by:.4f}"
    M = np.array([[2 * (b[0] - a[0]), 2 * (b[1] - a[1])], [2 * (ai[0] - a[0]), 2 * (ai[1] - a[1])]])
    rhs = np.array([b @ b - a2, ai @ ai - a2])
    c = np.linalg.solve(M, rhs)
    r = float(np.hypot(*(a - c))) * scale
    # sweep 1 runs with increasing screen angle; the screen flips y
    A, B, C = a * [1, -1], b * [1, -1], c * [1, -1]
    sweep = 1 if (A - C)[0] * (B - C)[1] - (A - C)[1] * (B - C)[0] > 0 else 0
    return f"A {r:.4f} {r:.4f} 0 0 {sweep} {bx:.4f} {by:.4f}"


def _polygon_path(pts: np.ndarray, size: float, scale: float) -> str:
    x0, y0 = (pts[0] * [1, -1]) * scale + size / 2
    parts = [f"M {x0:.4f} {y0:.4f}"]
    n = len(pts)
    for k in range(n):
        parts.append(_arc_cmd(pts[k], pts[(k + 1) % n], size, scale))
    parts.append("Z")
    return " ".join(parts)


def render_svg(radius: int = 2, geodesics: Sequence[str] = (), size: int = 600,
               seed: Optional[int] = None, provenance: Optional[dict] = None) -> str:
    """SVG of all chambers of word length <= radius, plus optional axes."""
    from .tables import ElementTable
    T = ElementTable(max(radius, 0))
    mats = T.matrices(radius)
    scale = size / 2 * 0.98
    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(size),
                      height=str(size), viewBox=f"0 0 {size} {size}")
    ET.SubElement(root, "desc").text = PROJECTION_NOTE
    if provenance:
        meta = ET.SubElement(root, "metadata")
        for k, v in sorted(provenance.items()):
            ET.SubElement(meta, "entry", key=str(k)).text = str(v)
    ET.SubElement(root, "circle", cx=str(size / 2), cy=str(size / 2), r=f"{scale:.4f}",
                  fill="none", stroke="#888", **{"stroke-width": "1"})
    g = ET.SubElement(root, "g", fill="#e8eef8", stroke="#223", **{"stroke-width": "0.6"})
    words = T.words_as_strings(np.arange(len(mats)))
    for M, w in zip(mats, words):
        pts = to_disk(VERTICES @ M.T)
        ET.SubElement(g, "path", d=_polygon_path(pts, size, scale), **{"class": "chamber",
                                                                    "data-word": w or "e"})
    for wd in geodesics:
        _draw_axis(root, wd, size, scale)
    return ET.tostring(root, encoding="unicode")


def _draw_axis(root, word: str, size: float, scale: float) -> None:
    from .coxeter import normal_form
    from .hyperboloid import axis
    g = normal_form(word)
    line = axis(g.isometry)
    ends = [line.p + line.v, line.p - line.v]
    pts = [e[:2] / e[2] for e in ends]                      # ideal points on the circle
    pts = [p / np.hypot(*p) * (1 - 1e-9) for p in pts]
    x0, y0 = (pts[0] * [1, -1]) * scale + size / 2
    d = f"M {x0:.4f} {y0:.4f} " + _arc_cmd(pts[0], pts[1], size, scale)
    ET.SubElement(root, "path", d=d, fill="none", stroke="#c22",
                  **{"stroke-width": "1.5", "class": "axis", "data-word": word})
