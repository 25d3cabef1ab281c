"""Isometric block placement and scene composition.

Blocks are laid out in the staggered isometric pattern: each row steps
down by the face height and every odd row shifts right by half a tile,
so a row's blocks sit centered between the blocks of the row above.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .assets import Atlas
from .procgen import SceneMap
from .raster import Raster, blit_over

DEFAULT_BACKGROUND = (0, 0, 0, 255)


@dataclass(frozen=True)
class IsoLayout:
    tile_w: int = 128
    tile_h: int = 128
    face_h: int = 32
    origin: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.tile_w <= 0 or self.tile_w % 2 != 0:
            raise ValueError("tile width must be positive and even")
        if not 0 < self.face_h <= self.tile_h:
            raise ValueError("face height must lie in 1..tile_h")


@dataclass(frozen=True)
class PlacedSprite:
    sprite_id: str
    x: int
    y: int
    layer: int  # 0 = block, 1..3 = overlays
    cell: tuple[int, int]

    def __post_init__(self):
        if self.layer not in (0, 1, 2, 3):
            raise ValueError("layer must be 0..3")


DrawList = list  # of PlacedSprite, in painter's order


def block_screen_position(row: int, col: int, layout: IsoLayout) -> tuple[int, int]:
    """Screen position of a cell's block sprite (top-left corner)."""
    if row < 0 or col < 0:
        raise ValueError("row and col must be nonnegative")
    ox, oy = layout.origin
    x = ox + col * layout.tile_w + (row % 2) * (layout.tile_w // 2)
    y = oy + row * layout.face_h
    return x, y


def build_draw_list(
    scene_map: SceneMap,
    atlas: Atlas,
    layout: IsoLayout,
    extra: Iterable[PlacedSprite] = (),
) -> list[PlacedSprite]:
    """Painter's-order placements: (row, col, layer) ascending.

    `extra` placements (e.g. characters) draw after all map cells.
    """
    placed = []
    for row in range(scene_map.rows):
        for col in range(scene_map.cols):
            cell = scene_map.cell(row, col)
            bx, by = block_screen_position(row, col, layout)
            ids = [cell.block, *cell.overlays]
            for layer, sprite_id in enumerate(ids):
                sprite = atlas.sprite(sprite_id)  # raises on unknown id
                ax, ay = sprite.anchor
                placed.append(
                    PlacedSprite(sprite_id, bx + ax, by + ay, layer, (row, col))
                )
    placed.extend(extra)
    return placed


def scene_extent(draw_list: Sequence[PlacedSprite], atlas: Atlas) -> tuple[int, int]:
    """(width, height) covering screen (0,0) through every placement."""
    w = h = 1
    for p in draw_list:
        sprite = atlas.sprite(p.sprite_id)
        w = max(w, p.x + sprite.width)
        h = max(h, p.y + sprite.height)
    return w, h


def composite_draw_list(
    draw_list: Sequence[PlacedSprite],
    atlas: Atlas,
    size: tuple[int, int],
    background: tuple[int, int, int, int] = DEFAULT_BACKGROUND,
) -> Raster:
    """Alpha-over every placement, in order, onto an opaque background."""
    width, height = size
    if width <= 0 or height <= 0:
        raise ValueError("raster size must be positive")
    canvas = np.empty((height, width, 4), np.uint8)
    canvas[:] = np.asarray(background, np.uint8)
    for p in draw_list:
        blit_over(canvas, atlas.sprite(p.sprite_id).image.pixels, p.x, p.y)
    return Raster(canvas)


def compose_scene(
    scene_map: SceneMap,
    atlas: Atlas,
    layout: IsoLayout | None = None,
    viewport: tuple[int, int] | None = None,
    background: tuple[int, int, int, int] = DEFAULT_BACKGROUND,
    extra: Iterable[PlacedSprite] = (),
) -> tuple[list[PlacedSprite], Raster]:
    """Compose the unlit scene raster in painter's order.

    The raster covers screen (0,0)..viewport when a viewport is given,
    otherwise the bounding extent of all placements.
    """
    layout = layout or IsoLayout()
    draw_list = build_draw_list(scene_map, atlas, layout, extra)
    size = viewport if viewport is not None else scene_extent(draw_list, atlas)
    return draw_list, composite_draw_list(draw_list, atlas, size, background)
