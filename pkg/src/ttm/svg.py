"""Minimal SVG heatmap writer (rect per cell, no external tooling)."""

from __future__ import annotations

import numpy as np


def _color(v: float) -> str:
    """Blue (0) -> white (0.5) -> red (1)."""
    v = min(max(v, 0.0), 1.0)
    if v < 0.5:
        f = v / 0.5
        r, g, b = int(255 * f), int(255 * f), 255
    else:
        f = (v - 0.5) / 0.5
        r, g, b = 255, int(255 * (1 - f)), int(255 * (1 - f))
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_heatmap(values: np.ndarray, path, cell: int = 3) -> None:
    """Render a (rows, cols) array of values in [0, 1] as an SVG grid.

    Row 0 is drawn at the bottom so axes read like a conventional plot.
    """
    values = np.asarray(values, dtype=np.float64)
    rows, cols = values.shape
    w, h = cols * cell, rows * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">'
    ]
    for i in range(rows):
        y = (rows - 1 - i) * cell
        for j in range(cols):
            parts.append(
                f'<rect x="{j * cell}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{_color(values[i, j])}"/>'
            )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(parts))
        f.write("\n")
