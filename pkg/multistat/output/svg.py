"""
SVG figures for grid samples and classified regions.
"""
import io
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from ..services.pointsolve_service import GridResult, PointStatus
from ..services.region_service import CellClass

logger = logging.getLogger(__name__)

matplotlib.rcParams["svg.hashsalt"] = "multistat"

GLYPHS = {1: ("o", "disc", "#f2c500"), 3: ("s", "box", "#1f5fbf")}
OTHER_GLYPH = ("D", "diamond", "#c0392b")
UNSOLVED_GLYPH = ("X", "unsolved", "#555555")

CELL_COLORS: Dict[CellClass, str] = {
    CellClass.NO_SOLUTION: "#dddddd",
    CellClass.ONE_SOLUTION: "#f7e27a",
    CellClass.MULTISTATIONARY: "#7fa7e0",
    CellClass.NOT_IN_QUADRANT: "#ffffff",
    CellClass.UNDETERMINED: "#e59a9a",
}

Point = Tuple[Fraction, Fraction, Optional[int]]
Segment = Tuple[Fraction, Fraction, Fraction, CellClass]


def grid_points(result: GridResult) -> Tuple[Sequence[Point], Tuple[str, str]]:
    """(x, y, count) triples of a two-parameter grid, x being the first range.

    Points whose status is not OK carry count None and are drawn as crosses.
    """
    names = result.parameter_names
    if len(names) != 2:
        raise ValueError(f"a scatter figure needs exactly two swept parameters, got {names}")
    x, y = names
    points = [(e.point[x], e.point[y], e.count if e.status == PointStatus.OK else None)
              for e in result.entries]
    unsolved = sum(1 for p in points if p[2] is None)
    if unsolved:
        logger.warning(f"{unsolved} of {len(points)} grid points were not solved; drawn as crosses")
    return points, (x, y)


def _column_width(xs: Sequence[Fraction]) -> float:
    distinct = sorted(set(float(x) for x in xs))
    gaps = [b - a for a, b in zip(distinct, distinct[1:]) if b > a]
    return min(gaps) if gaps else 1.0


def emit_svg(points: Sequence[Point] = (), segments: Sequence[Segment] = (),
             axes: Tuple[str, str] = ("x", "y"),
             window: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None,
             title: Optional[str] = None) -> str:
    """Render scatter glyphs (disc = 1, box = 3, diamond = other counts, cross = unsolved) and region areas."""
    fig, ax = plt.subplots(figsize=(7, 5))
    try:
        width = _column_width([s[0] for s in segments]) if segments else 0.0
        for i, (x, y0, y1, cls) in enumerate(segments):
            ax.add_patch(Rectangle(
                (float(x) - width / 2, float(y0)), width, float(y1 - y0),
                facecolor=CELL_COLORS[cls], edgecolor="none", gid=f"area-{i}",
            ))

        groups: Dict[Tuple[str, str, str], list] = {}
        for x, y, count in points:
            glyph = UNSOLVED_GLYPH if count is None else GLYPHS.get(count, OTHER_GLYPH)
            groups.setdefault(glyph, []).append((float(x), float(y)))
        for (marker, name, color), xy in sorted(groups.items(), key=lambda g: g[0][1]):
            ax.scatter([p[0] for p in xy], [p[1] for p in xy], marker=marker, c=color,
                       s=18, edgecolors="black", linewidths=0.3, gid=f"glyph-{name}",
                       label=name)

        if window is not None:
            ax.set_xlim(*window[0])
            ax.set_ylim(*window[1])
        elif segments or points:
            ax.autoscale_view()
        ax.set_xlabel(axes[0])
        ax.set_ylabel(axes[1])
        if title:
            ax.set_title(title)

        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return buffer.getvalue()


def write_svg(document: str, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(document, encoding="utf-8")
    logger.info(f"Wrote figure to {path}")
    return path
