"""Deterministic SVG rendering of two-dimensional scenes.

Canvas transform: the scene bounding box (ball at the origin, sites, and the
solution set, padded by 8%) is mapped to a fixed 640x640 canvas with a 30px
margin; y points up in world coordinates and down on the canvas. All
coordinates are printed with %.4f, so identical scenes give identical bytes.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput, WrongDimension
from .geometry import PolytopeBall
from .solver import Cone, FTSet

CANVAS = 640.0
MARGIN = 30.0

_STYLE = {
    "ball": 'fill="none" stroke="#2255aa" stroke-width="2"',
    "ftset_fill": 'fill="#ffaa00" fill-opacity="0.45" stroke="#cc7700" stroke-width="2"',
    "segment": 'stroke="#cc7700" stroke-width="5" stroke-linecap="round"',
    "site": 'fill="#cc2222"',
    "point": 'fill="#cc7700" stroke="#663300" stroke-width="1.5"',
    "cone": 'stroke="#448844" stroke-opacity="0.55" stroke-width="1.5" stroke-dasharray="6,4" fill="none"',
}


def _fmt(x: float) -> str:
    out = f"{x:.4f}"
    return "0.0000" if out == "-0.0000" else out


class _Transform:
    def __init__(self, points: np.ndarray):
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        pad = 0.08 * max(float((hi - lo).max()), 1e-9)
        lo = lo - pad
        hi = hi + pad
        span = float((hi - lo).max())
        self.scale = (CANVAS - 2 * MARGIN) / span
        self.lo = lo
        self.hi = hi

    def __call__(self, p) -> tuple[str, str]:
        x = MARGIN + (p[0] - self.lo[0]) * self.scale
        y = CANVAS - MARGIN - (p[1] - self.lo[1]) * self.scale
        return _fmt(x), _fmt(y)


def _polygon_points(T, pts) -> str:
    return " ".join(",".join(T(p)) for p in pts)


def _ordered_outline(ball: PolytopeBall) -> np.ndarray:
    ang = np.arctan2(ball.vertices[:, 1], ball.vertices[:, 0])
    return ball.vertices[np.argsort(ang, kind="stable")]


def render_svg(
    ball: PolytopeBall,
    sites: np.ndarray | None = None,
    ft_set: FTSet | None = None,
    cones: list[Cone] | None = None,
) -> str:
    """Render the unit ball outline, site markers, the solution set, and
    optional cone boundary rays into a standalone SVG document."""
    if ball.dim != 2:
        raise WrongDimension("SVG rendering is two-dimensional only")
    sites = np.zeros((0, 2)) if sites is None else np.atleast_2d(np.asarray(sites, float))
    if sites.size and sites.shape[1] != 2:
        raise InvalidInput("sites must be 2-vectors")

    boxes = [ball.vertices]
    if len(sites):
        boxes.append(sites)
    if ft_set is not None:
        boxes.append(ft_set.vertices)
    T = _Transform(np.vstack(boxes))

    lines: list[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(CANVAS)}" '
        f'height="{int(CANVAS)}" viewBox="0 0 {int(CANVAS)} {int(CANVAS)}">',
        "  <desc>polyhedral-norm scene</desc>",
        f'  <rect width="{int(CANVAS)}" height="{int(CANVAS)}" fill="white"/>',
    ]

    if cones:
        reach = 4.0 * max(1.0, float((T.hi - T.lo).max()))
        for c in cones:
            for g in c.generators:
                g = np.asarray(g, float)
                norm = np.linalg.norm(g)
                if norm < 1e-12:
                    continue
                tip = c.apex + g / norm * reach
                x1, y1 = T(c.apex)
                x2, y2 = T(tip)
                lines.append(
                    f'  <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {_STYLE["cone"]}/>'
                )

    lines.append(
        f'  <polygon points="{_polygon_points(T, _ordered_outline(ball))}" {_STYLE["ball"]}/>'
    )

    if ft_set is not None:
        V = ft_set.vertices
        if ft_set.affine_dim >= 2:
            lines.append(
                f'  <polygon points="{_polygon_points(T, V)}" {_STYLE["ftset_fill"]}/>'
            )
        elif ft_set.affine_dim == 1:
            (x1, y1), (x2, y2) = T(V[0]), T(V[1])
            lines.append(
                f'  <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {_STYLE["segment"]}/>'
            )
        else:
            x, y = T(V[0])
            lines.append(f'  <circle cx="{x}" cy="{y}" r="6" {_STYLE["point"]}/>')

    for s in sites:
        x, y = T(s)
        lines.append(f'  <circle cx="{x}" cy="{y}" r="4" {_STYLE["site"]}/>')

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
