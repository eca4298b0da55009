"""Minimal SVG rendering of persistence diagram packs."""

from __future__ import annotations

import math


def _fmt(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


def render_panels(panels: list[tuple[str, list[tuple[float, float]]]],
                  threshold: float = 0.05, size: int = 220, pad: int = 34) -> str:
    """One square panel per (title, points) pair: diagonal, finite points as
    circles, essential points as diamonds pinned to the top border.  Points
    with persistence below the threshold are omitted."""
    axis_max = 1.0
    for _, pts in panels:
        for b, d in pts:
            axis_max = max(axis_max, b, d if d != math.inf else b)
    axis_max *= 1.1
    width = len(panels) * (size + pad) + pad
    height = size + 2 * pad
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>']

    def sx(x0, v):
        return x0 + v / axis_max * size

    def sy(v):
        return pad + size - v / axis_max * size

    for i, (title, pts) in enumerate(panels):
        x0 = pad + i * (size + pad)
        out.append(f'<rect x="{x0}" y="{pad}" width="{size}" height="{size}" '
                   'fill="none" stroke="#444" stroke-width="1"/>')
        out.append(f'<line x1="{x0}" y1="{pad + size}" x2="{x0 + size}" y2="{pad}" '
                   'stroke="#bbb" stroke-width="1"/>')
        out.append(f'<text x="{x0 + size / 2}" y="{pad - 8}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{title}</text>')
        for b, d in sorted(pts):
            if d != math.inf and d - b < threshold:
                continue
            px = sx(x0, b)
            if d == math.inf:
                py = pad
                s = 4
                out.append(f'<path d="M {_fmt(px)} {_fmt(py - s)} L {_fmt(px + s)} {_fmt(py)} '
                           f'L {_fmt(px)} {_fmt(py + s)} L {_fmt(px - s)} {_fmt(py)} Z" '
                           'fill="#c33"/>')
            else:
                py = sy(d)
                out.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="3" '
                           'fill="#1756a9" fill-opacity="0.8"/>')
        out.append(f'<text x="{x0 + size / 2}" y="{pad + size + 16}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10">axis 0..{axis_max:.3g}</text>')
    out.append('</svg>')
    return "\n".join(out)
