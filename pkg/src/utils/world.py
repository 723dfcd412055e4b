"""
Workspace model for the panel array: docking station, panels and connecting rails
unfolded into one planar strip, plus the per-cell dust grid the cleaning head works on.

Coordinates: +x runs along the array (the lateral axis), +y points up-slope.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MAX_INCLINE_DEG = 30.0
DEFAULT_CELL_SIZE_M = 0.02
DEFAULT_EFFICIENCY = 0.8

Point = Tuple[float, float]


@dataclass(frozen=True)
class PanelSpec:
    """One photovoltaic panel, measured on its own surface."""

    length_m: float
    width_m: float
    incline_deg: float = 30.0

    def __post_init__(self):
        if not self.length_m > 0 or not self.width_m > 0:
            raise ValueError(
                f"panel dimensions must be positive, got length_m={self.length_m}, "
                f"width_m={self.width_m}"
            )
        if not 0.0 <= self.incline_deg <= MAX_INCLINE_DEG:
            raise ValueError(
                f"incline_deg must lie in [0, {MAX_INCLINE_DEG}], got {self.incline_deg}"
            )


@dataclass(frozen=True)
class ArrayLayout:
    panels: Tuple[PanelSpec, ...] = (PanelSpec(1.0, 0.6, 30.0),)
    rail_length_m: float = 0.0
    dock_offset_m: float = 0.2
    extra_bump_y_m: Tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.panels) == 0:
            raise ValueError("layout needs at least one panel")
        if self.rail_length_m < 0:
            raise ValueError(f"rail_length_m must be >= 0, got {self.rail_length_m}")
        if self.dock_offset_m < 0:
            raise ValueError(f"dock_offset_m must be >= 0, got {self.dock_offset_m}")


class RegionKind(Enum):
    DOCK = "Dock"
    PANEL = "Panel"
    RAIL = "Rail"


@dataclass(frozen=True)
class Region:
    kind: RegionKind
    index: int
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    incline_deg: float = 0.0

    @property
    def name(self) -> str:
        if self.kind is RegionKind.DOCK:
            return "Dock"
        return f"{self.kind.value}({self.index})"

    def contains(self, point: Point) -> bool:
        x, y = point
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass(frozen=True)
class BumpLine:
    """A zero-width ridge. axis "x" is the vertical line x = position_m, "y" the lateral line y = position_m."""

    axis: str
    position_m: float
    span: Tuple[float, float]


@dataclass(frozen=True)
class Workspace:
    regions: Tuple[Region, ...]
    bump_lines: Tuple[BumpLine, ...] = ()

    @property
    def panels(self) -> Tuple[Region, ...]:
        return tuple(r for r in self.regions if r.kind is RegionKind.PANEL)

    @property
    def dock(self) -> Region:
        return self.regions[0]

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the whole strip."""
        return (
            min(r.x_min for r in self.regions),
            min(r.y_min for r in self.regions),
            max(r.x_max for r in self.regions),
            max(r.y_max for r in self.regions),
        )


@dataclass(frozen=True)
class Footprint:
    x_min: float
    y_min: float
    x_max: float
    y_max: float


@dataclass(frozen=True)
class CoverageGrid:
    """
    Dust fraction per cell over the strip's bounding box.

    Cells whose centre is not on a panel hold NaN in ``dust`` and are excluded from
    every count. Row i covers y in [origin_y + i*cell, origin_y + (i+1)*cell).
    """

    cell_size_m: float
    origin: Point
    dust: np.ndarray
    pass_count: np.ndarray = field(default=None)

    def __post_init__(self):
        if not self.cell_size_m > 0:
            raise ValueError(f"cell_size_m must be positive, got {self.cell_size_m}")
        if self.pass_count is None:
            object.__setattr__(self, "pass_count", np.zeros(self.dust.shape, dtype=np.int64))

    @property
    def panel_mask(self) -> np.ndarray:
        return ~np.isnan(self.dust)

    @property
    def n_cells(self) -> int:
        return int(self.panel_mask.sum())


def build_workspace(layout: ArrayLayout) -> Workspace:
    """
    Lay the array out as Dock, Panel 0, Rail 0, Panel 1, ... along +x.

    Args:
        layout: Panels, rail length and dock width

    Returns:
        Workspace with regions in layout order and a bump line at every panel junction
    """
    if len(layout.panels) == 0:
        raise ValueError("layout needs at least one panel")

    panels = layout.panels
    regions = [
        Region(RegionKind.DOCK, 0, 0.0, layout.dock_offset_m, 0.0, panels[0].length_m, 0.0)
    ]
    bump_lines = []
    x = layout.dock_offset_m
    for i, panel in enumerate(panels):
        regions.append(
            Region(RegionKind.PANEL, i, x, x + panel.width_m, 0.0, panel.length_m, panel.incline_deg)
        )
        if i > 0:
            bump_lines.append(BumpLine("x", x, (0.0, panel.length_m)))
        x += panel.width_m
        if i + 1 < len(panels) and layout.rail_length_m > 0:
            height = min(panel.length_m, panels[i + 1].length_m)
            regions.append(Region(RegionKind.RAIL, i, x, x + layout.rail_length_m, 0.0, height, 0.0))
            x += layout.rail_length_m

    first_x = regions[1].x_min
    for y in layout.extra_bump_y_m:
        bump_lines.append(BumpLine("y", float(y), (first_x, x)))

    ws = Workspace(tuple(regions), tuple(bump_lines))
    logger.debug(
        f"Built workspace with {len(ws.regions)} regions and {len(ws.bump_lines)} bump lines"
    )
    return ws


def region_at(ws: Workspace, point: Point) -> Optional[Region]:
    """Region containing ``point``; None means off the surface. Shared edges go to the earlier region."""
    for region in ws.regions:
        if region.contains(point):
            return region
    return None


def bump_crossing(ws: Workspace, p0: Point, p1: Point) -> Optional[BumpLine]:
    """
    First bump line crossed by the segment p0 -> p1.

    A point lying exactly on a line at p0 does not count again, so a robot resting
    on a ridge is not bumped twice.
    """
    for line in ws.bump_lines:
        along = 0 if line.axis == "x" else 1
        other = 1 - along
        a, b = p0[along], p1[along]
        c = line.position_m
        if not ((a < c <= b) or (a > c >= b)):
            continue
        t = (c - a) / (b - a)
        hit = p0[other] + t * (p1[other] - p0[other])
        lo, hi = line.span
        if lo <= hit <= hi:
            return line
    return None


def head_footprint(
    pose: Tuple[float, float, float],
    width_m: float,
    front_m: float,
    rear_m: float,
) -> Footprint:
    """
    Axis-aligned bounds of the cleaning head.

    Args:
        pose: (x, y, heading) of the drive axle
        width_m: Brush width across the direction of travel
        front_m: Reach ahead of the axle
        rear_m: Reach behind the axle

    Returns:
        Footprint enclosing the rotated head rectangle
    """
    x, y, heading = pose
    ux, uy = math.cos(heading), math.sin(heading)
    nx, ny = -uy, ux
    half = width_m / 2.0
    xs, ys = [], []
    for a in (-rear_m, front_m):
        for b in (-half, half):
            xs.append(x + a * ux + b * nx)
            ys.append(y + a * uy + b * ny)
    return Footprint(min(xs), min(ys), max(xs), max(ys))


def new_coverage_grid(ws: Workspace, cell_size_m: float = DEFAULT_CELL_SIZE_M) -> CoverageGrid:
    """Fresh grid over the strip: dust 1.0 on panel cells, NaN elsewhere."""
    if not cell_size_m > 0:
        raise ValueError(f"cell_size_m must be positive, got {cell_size_m}")
    x_min, y_min, x_max, y_max = ws.bounds
    n_cols = max(1, int(math.ceil((x_max - x_min) / cell_size_m - 1e-9)))
    n_rows = max(1, int(math.ceil((y_max - y_min) / cell_size_m - 1e-9)))

    cx = x_min + (np.arange(n_cols) + 0.5) * cell_size_m
    cy = y_min + (np.arange(n_rows) + 0.5) * cell_size_m
    gx, gy = np.meshgrid(cx, cy)
    on_panel = np.zeros(gx.shape, dtype=bool)
    for panel in ws.panels:
        on_panel |= (
            (gx >= panel.x_min) & (gx <= panel.x_max) & (gy >= panel.y_min) & (gy <= panel.y_max)
        )
    dust = np.where(on_panel, 1.0, np.nan)
    return CoverageGrid(cell_size_m, (x_min, y_min), dust, np.zeros(dust.shape, dtype=np.int64))


def _cell_range(lo: float, hi: float, origin: float, cell: float, n: int) -> Tuple[int, int]:
    first = int(math.ceil((lo - origin) / cell - 0.5))
    last = int(math.floor((hi - origin) / cell - 0.5))
    return max(first, 0), min(last, n - 1)


def apply_cleaning(
    grid: CoverageGrid,
    footprint: Footprint,
    efficiency: float = DEFAULT_EFFICIENCY,
) -> CoverageGrid:
    """
    Clean every panel cell whose centre lies in ``footprint``.

    Args:
        grid: Current grid (left untouched)
        footprint: Head bounds in workspace coordinates
        efficiency: Fraction of the remaining dust removed per pass, in (0, 1]

    Returns:
        New grid with dust scaled by (1 - efficiency) and pass_count incremented
    """
    if not 0.0 < efficiency <= 1.0:
        raise ValueError(f"efficiency must lie in (0, 1], got {efficiency}")

    n_rows, n_cols = grid.dust.shape
    ox, oy = grid.origin
    j0, j1 = _cell_range(footprint.x_min, footprint.x_max, ox, grid.cell_size_m, n_cols)
    i0, i1 = _cell_range(footprint.y_min, footprint.y_max, oy, grid.cell_size_m, n_rows)
    if j0 > j1 or i0 > i1:
        return grid

    dust = grid.dust.copy()
    passes = grid.pass_count.copy()
    block = dust[i0:i1 + 1, j0:j1 + 1]
    mask = ~np.isnan(block)
    if not mask.any():
        return grid
    block[mask] *= 1.0 - efficiency
    passes[i0:i1 + 1, j0:j1 + 1][mask] += 1
    return CoverageGrid(grid.cell_size_m, grid.origin, dust, passes)


def coverage_fraction(grid: CoverageGrid, clean_threshold: float = 0.1) -> float:
    """Share of panel cells whose dust is at or below ``clean_threshold``."""
    if not 0.0 <= clean_threshold < 1.0:
        raise ValueError(f"clean_threshold must lie in [0, 1), got {clean_threshold}")
    mask = grid.panel_mask
    total = int(mask.sum())
    if total == 0:
        raise ValueError("coverage grid has no panel cells")
    clean = int((grid.dust[mask] <= clean_threshold).sum())
    return clean / total

