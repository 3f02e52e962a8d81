"""Hand-emitted SVG scatter plots of select/reject decisions.

Only a 2-D scatter is ever needed, so the markup is assembled directly:
one circle per example, optional rectangle outlines for region geometry,
no plotting dependency.  Output is deterministic for identical inputs.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .scores import ScoreSet, predictions

__all__ = ["CLASS_COLORS", "REJECT_COLOR", "scatter_svg"]

# Distinct hues for up to ten classes; reused cyclically beyond that.
CLASS_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
REJECT_COLOR = "#000000"


def _axis_transform(values: np.ndarray, lo_px: float, hi_px: float):
    v_min = float(values.min())
    v_max = float(values.max())
    span = v_max - v_min
    if span <= 0.0:
        # Degenerate axis: park everything mid-range.
        v_min -= 0.5
        span = 1.0
    scale = (hi_px - lo_px) / span
    return v_min, scale


def scatter_svg(
    scores: ScoreSet,
    rejected: Sequence[bool],
    *,
    size: int = 640,
    margin: float = 40.0,
    radius: float = 2.5,
    outlines: Iterable[tuple[float, float, float, float]] = (),
) -> str:
    """Render the score set as SVG text.

    Selected points take their predicted class color; rejected points are
    drawn black on top so the reject region reads as in the report tables.
    `outlines` takes (x_min, x_max, y_min, y_max) boxes drawn as unfilled
    rectangles, useful for showing uniform class supports.
    """
    if scores.coords is None:
        raise ValueError("score set has no x,y coordinates to plot")
    rej = np.asarray(rejected, dtype=bool)
    if rej.shape != (len(scores.ids),):
        raise ValueError("rejected mask length does not match the score set")

    pts = scores.coords
    x0, sx = _axis_transform(pts[:, 0], margin, size - margin)
    y0, sy = _axis_transform(pts[:, 1], margin, size - margin)
    # Equal aspect so rectangles and circles keep their shape.
    s = min(sx, sy)

    def px(x: float) -> float:
        return margin + (x - x0) * s

    def py(y: float) -> float:
        # SVG y runs downward.
        return size - margin - (y - y0) * s

    preds = predictions(scores)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    for x_min, x_max, y_min, y_max in outlines:
        lines.append(
            f'<rect x="{px(x_min):.2f}" y="{py(y_max):.2f}" '
            f'width="{(x_max - x_min) * s:.2f}" height="{(y_max - y_min) * s:.2f}" '
            f'fill="none" stroke="#999999" stroke-width="1"/>'
        )
    order = np.concatenate([np.flatnonzero(~rej), np.flatnonzero(rej)])
    for i in order:
        color = REJECT_COLOR if rej[i] else CLASS_COLORS[preds[i] % len(CLASS_COLORS)]
        lines.append(
            f'<circle cx="{px(pts[i, 0]):.2f}" cy="{py(pts[i, 1]):.2f}" '
            f'r="{radius}" fill="{color}" fill-opacity="0.8"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
