"""Deterministic SVG rendering of triangle meshes."""
import numpy as np


def _fmt(x):
    return f"{x:.6f}"


def render_svg(mesh, width=800, stroke_width=1.0, highlight=None, margin=10.0,
               highlight_color="#d62728"):
    """SVG text for ``mesh``; ``highlight`` is an optional list of node ids drawn as a polyline."""
    nodes = mesh.nodes
    lo, hi = nodes.min(axis=0), nodes.max(axis=0)
    span = np.maximum(hi - lo, 1e-300)
    scale = (width - 2 * margin) / span[0]
    height = span[1] * scale + 2 * margin

    def xy(p):
        return _fmt(margin + (p[0] - lo[0]) * scale), _fmt(height - margin - (p[1] - lo[1]) * scale)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
           f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
           f'<g fill="none" stroke="black" stroke-width="{_fmt(stroke_width)}" stroke-linejoin="round">']
    for tri in mesh.triangles:
        pts = " ".join(",".join(xy(nodes[i])) for i in tri)
        out.append(f'<polygon points="{pts}"/>')
    out.append("</g>")
    if highlight:
        pts = " ".join(",".join(xy(nodes[i])) for i in highlight)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{highlight_color}" '
                   f'stroke-width="{_fmt(3 * stroke_width)}"/>')
        for i in highlight:
            x, y = xy(nodes[i])
            out.append(f'<circle cx="{x}" cy="{y}" r="{_fmt(2 * stroke_width)}" fill="{highlight_color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
