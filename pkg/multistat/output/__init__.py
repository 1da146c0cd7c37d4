"""
Result serialization: canonical text, CSV, JSON and SVG.
"""
from .serialization import (
    canonical_text,
    fixed_point_reports,
    grid_frame,
    rational_text,
    reduced_system_report,
    region_report,
    roots_report,
    write_grid_csv,
    write_json,
)
from .svg import emit_svg, grid_points, write_svg

__all__ = [
    "canonical_text",
    "emit_svg",
    "fixed_point_reports",
    "grid_frame",
    "grid_points",
    "rational_text",
    "reduced_system_report",
    "region_report",
    "roots_report",
    "write_grid_csv",
    "write_json",
    "write_svg",
]
