"""Deterministic SVG drawing of a boundary document."""
from __future__ import annotations

import numpy as np

SIZE = 500
CENTER = SIZE / 2
SCALE = 200.0

HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
    f'viewBox="0 0 {SIZE} {SIZE}">\n'
    f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>\n'
)


def _xy(z: complex) -> tuple[str, str]:
    return f"{CENTER + SCALE * z.real:.6f}", f"{CENTER - SCALE * z.imag:.6f}"


def _path(points, closed: bool) -> str:
    if len(points) == 0:
        return ""
    cmds = []
    for k, z in enumerate(points):
        x, y = _xy(z)
        cmds.append(f"{'M' if k == 0 else 'L'}{x},{y}")
    if closed:
        cmds.append("Z")
    return " ".join(cmds)


def render_svg(doc: dict, cloud=None) -> str:
    """SVG for a boundary document: unit circle, axes, the boundary polyline,
    eigenvalue direction markers and an optional point cloud."""
    poly = [complex(x, y) for x, y in doc.get("polyline", [])]
    closed = bool(doc.get("polyline_closed", True)) and len(poly) > 2
    out = [HEADER]
    out.append(f'<line x1="0" y1="{CENTER:.6f}" x2="{SIZE}" y2="{CENTER:.6f}" stroke="#999" stroke-width="0.5"/>\n')
    out.append(f'<line x1="{CENTER:.6f}" y1="0" x2="{CENTER:.6f}" y2="{SIZE}" stroke="#999" stroke-width="0.5"/>\n')
    out.append(f'<circle cx="{CENTER:.6f}" cy="{CENTER:.6f}" r="{SCALE:.6f}" fill="none" stroke="blue" '
               f'stroke-width="1" stroke-dasharray="4,3"/>\n')
    if cloud is not None:
        out.append('<g fill="#bbb">\n')
        for z in np.asarray(cloud, dtype=complex):
            x, y = _xy(z)
            out.append(f'<circle cx="{x}" cy="{y}" r="0.6"/>\n')
        out.append("</g>\n")
    if poly:
        fill = "#cfd8e8" if closed else "none"
        out.append(f'<path d="{_path(poly, closed)}" fill="{fill}" stroke="black" stroke-width="1"/>\n')
    for re, im in doc.get("eigenvalues", []):
        z = complex(re, im)
        if z != 0:
            x, y = _xy(z / abs(z))
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="red"/>\n')
    out.append("</svg>\n")
    return "".join(out)
