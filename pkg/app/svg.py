"""SVG orbit plots: one horizontal axis per witness, orbit points as ticks."""
import logging
from typing import List, Optional, Sequence

import svgwrite

from app.iet import Iet
from app.orbits import Orbit, orbit
from app.scalar import Scalar

logger = logging.getLogger(__name__)

PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
]

WIDTH = 960
MARGIN = 40
ROW_HEIGHT = 48
LEGEND_LINE = 16
TICK = 8


def _x(value: float, total: float) -> float:
    return round(MARGIN + (WIDTH - 2 * MARGIN) * value / total, 3)


def _legend(index: int, witness: Scalar, traced: Orbit) -> str:
    text = f"w{index + 1} = {witness}: {len(traced.points)} points"
    if traced.halted:
        text += f" (truncated: hits singular point {traced.halt_point} at step {len(traced.points) - 1})"
    return text


def render_orbit_svg(
    T: Iet, witnesses: Sequence[Scalar], N: int, out_path: Optional[str] = None
) -> str:
    """Plot the length-N orbits of *witnesses*; returns the SVG text and writes it if asked."""
    total = float(T.total)
    traced: List[Orbit] = [orbit(T, w, N) for w in witnesses]
    axes_height = MARGIN + ROW_HEIGHT * max(1, len(witnesses))
    height = axes_height + LEGEND_LINE * (len(witnesses) + 1) + MARGIN

    dwg = svgwrite.Drawing(out_path or "orbits.svg", size=(WIDTH, height))
    dwg.add(dwg.rect(insert=(0, 0), size=(WIDTH, height), fill="white"))

    for row, (witness, path) in enumerate(zip(witnesses, traced)):
        colour = PALETTE[row % len(PALETTE)]
        y = MARGIN + ROW_HEIGHT * row + ROW_HEIGHT / 2
        dwg.add(dwg.line(start=(_x(0, total), y), end=(_x(total, total), y), stroke="black", stroke_width=1))
        for point in T.breakpoints:
            px = _x(float(point), total)
            dwg.add(dwg.line(start=(px, y - TICK), end=(px, y + TICK), stroke="#999999", stroke_width=1))
        for point in dict.fromkeys(path.points):
            px = _x(float(point), total)
            dwg.add(dwg.line(start=(px, y - TICK / 2), end=(px, y + TICK / 2), stroke=colour, stroke_width=1))
        if path.halted:
            hx = _x(float(path.halt_point), total)
            dwg.add(dwg.circle(center=(hx, y), r=3, fill="none", stroke=colour, stroke_width=1))

    legend_y = axes_height + LEGEND_LINE
    dwg.add(
        dwg.text(
            f"n={T.n}  p={T.perm}  N={N}  singular points in grey",
            insert=(MARGIN, legend_y),
            fill="black",
            font_size=12,
        )
    )
    for row, (witness, path) in enumerate(zip(witnesses, traced)):
        dwg.add(
            dwg.text(
                _legend(row, witness, path),
                insert=(MARGIN, legend_y + LEGEND_LINE * (row + 1)),
                fill=PALETTE[row % len(PALETTE)],
                font_size=12,
            )
        )

    text = dwg.tostring()
    if out_path:
        with open(out_path, "w") as f:
            f.write(text)
        logger.info("Orbit plot written to %s", out_path)
    return text
