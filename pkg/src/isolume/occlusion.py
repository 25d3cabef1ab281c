"""Screen-space obstacle map estimation.

Light rays stop at blocked cells. The map is estimated per placed
sprite from its opacity mask: a band of rows is scanned for each
sprite, the row whose longest opaque run is closest to the band's mean
run length donates a horizontal blocked segment, and a short vertical
bar through that segment's center fakes the sprite's depth. A box
noise-reduction pass then erases stray specks.

The map is built once per loaded map (it only depends on static
placements) and read concurrently by the ray tracers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assets import Atlas
from .raster import Raster
from .scene import PlacedSprite

DEFAULT_DELTA_Y = 25  # band height tuned for 128x128 block sprites
DEFAULT_NOISE_WINDOW = 3

BAND_ANCHORS = ("first-opaque-row", "sprite-top")


@dataclass(eq=False)
class ObstacleMap:
    blocked: np.ndarray  # (height, width) bool

    def __post_init__(self):
        if self.blocked.ndim != 2 or self.blocked.dtype != np.bool_:
            raise ValueError("obstacle grid must be a 2-D bool array")

    @property
    def width(self) -> int:
        return int(self.blocked.shape[1])

    @property
    def height(self) -> int:
        return int(self.blocked.shape[0])


def longest_run(row_mask: np.ndarray) -> tuple[int, int]:
    """(start, length) of the longest run of True values; leftmost on ties."""
    if not row_mask.any():
        return 0, 0
    padded = np.concatenate(([False], row_mask, [False]))
    edges = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    lengths = ends - starts
    best = int(np.argmax(lengths))  # argmax takes the first maximum
    return int(starts[best]), int(lengths[best])


def _band_rows(mask: np.ndarray, delta_y: int, band_anchor: str) -> tuple[int, int]:
    """Half-open row range scanned for one sprite (clamped at the bottom)."""
    if band_anchor == "sprite-top":
        first = 0
    else:
        rows = np.flatnonzero(mask.any(axis=1))
        if rows.size == 0:
            return 0, 0
        first = int(rows[0])
    return first, min(first + delta_y, mask.shape[0])


def _select_run(runs: Sequence[tuple[int, int, int]]) -> tuple[int, int, int]:
    # Least absolute deviation from the mean run length; topmost row wins ties.
    mean = sum(length for _, _, length in runs) / len(runs)
    return min(runs, key=lambda r: (abs(r[2] - mean), r[0]))


def build_obstacle_map(
    draw_list: Sequence[PlacedSprite],
    atlas: Atlas,
    out_size: tuple[int, int],
    delta_y: int = DEFAULT_DELTA_Y,
    offset: tuple[int, int] = (0, 0),
    band_anchor: str = "first-opaque-row",
) -> ObstacleMap:
    """Estimate the obstacle grid for all occluding placements.

    `out_size` is the (width, height) of the grid; `offset` translates
    screen coordinates into grid coordinates (grid = screen + offset),
    which aligns the grid with a margin-padded light texture. Placements
    whose atlas entry is tagged non-occluding contribute nothing. Each
    sprite only ever sets cells, so draw order does not matter.
    """
    if delta_y < 1:
        raise ValueError("delta_y must be at least 1")
    if band_anchor not in BAND_ANCHORS:
        raise ValueError(f"band_anchor must be one of {BAND_ANCHORS}")
    width, height = out_size
    ox, oy = offset
    grid = np.zeros((height, width), bool)
    for p in draw_list:
        if atlas.entry(p.sprite_id).non_occluding:
            continue
        opacity = atlas.opacity(p.sprite_id)
        if opacity.true_count == 0:
            continue
        mask = opacity.mask
        first, stop = _band_rows(mask, delta_y, band_anchor)
        runs = [(row, *longest_run(mask[row])) for row in range(first, stop)]
        if not runs:
            continue
        row, start, length = _select_run(runs)
        if length == 0:
            continue
        gx0 = p.x + start + ox
        gy = p.y + row + oy
        _mark_hspan(grid, gx0, gx0 + length, gy)
        center_x = gx0 + (length - 1) // 2
        reach = length // 4
        _mark_vspan(grid, center_x, gy - reach, gy + reach + 1)
    return ObstacleMap(grid)


def _mark_hspan(grid: np.ndarray, x0: int, x1: int, y: int) -> None:
    if 0 <= y < grid.shape[0]:
        grid[y, max(x0, 0) : max(min(x1, grid.shape[1]), 0)] = True


def _mark_vspan(grid: np.ndarray, x: int, y0: int, y1: int) -> None:
    if 0 <= x < grid.shape[1]:
        grid[max(y0, 0) : max(min(y1, grid.shape[0]), 0), x] = True


def reduce_noise(obstacle_map: ObstacleMap, n: int = DEFAULT_NOISE_WINDOW) -> ObstacleMap:
    """Erase tiny obstacles with an n-by-n counting window.

    The window slides with unit stride over every position where it fits
    entirely inside the grid; when it holds fewer than n blocked cells,
    the window's top-left cell is unset. All windows are evaluated
    against the input grid, so erasures never cascade within one pass.
    """
    if n < 1:
        raise ValueError("window size must be at least 1")
    src = obstacle_map.blocked
    out = src.copy()
    h, w = src.shape
    if n > h or n > w:
        return ObstacleMap(out)
    counts = _window_counts(src, n)
    out[: h - n + 1, : w - n + 1][counts < n] = False
    return ObstacleMap(out)


def _window_counts(mask: np.ndarray, n: int) -> np.ndarray:
    acc = np.cumsum(np.cumsum(mask.astype(np.int32), axis=0), axis=1)
    padded = np.zeros((mask.shape[0] + 1, mask.shape[1] + 1), np.int32)
    padded[1:, 1:] = acc
    return (
        padded[n:, n:]
        - padded[:-n, n:]
        - padded[n:, :-n]
        + padded[:-n, :-n]
    )


def obstacle_overlay(obstacle_map: ObstacleMap, region: tuple[int, int, int, int] | None = None) -> Raster:
    """White-on-transparent raster of the blocked cells.

    `region` is (x0, y0, width, height) in grid coordinates; omitted, the
    whole grid is rendered.
    """
    blocked = obstacle_map.blocked
    if region is not None:
        x0, y0, w, h = region
        window = np.zeros((h, w), bool)
        sx0, sy0 = max(x0, 0), max(y0, 0)
        sx1 = min(x0 + w, blocked.shape[1])
        sy1 = min(y0 + h, blocked.shape[0])
        if sx1 > sx0 and sy1 > sy0:
            window[sy0 - y0 : sy1 - y0, sx0 - x0 : sx1 - x0] = blocked[sy0:sy1, sx0:sx1]
        blocked = window
    out = np.zeros(blocked.shape + (4,), np.uint8)
    out[blocked] = (255, 255, 255, 255)
    return Raster(out)
