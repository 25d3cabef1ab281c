"""Sprites, opacity masks and the sprite atlas.

Sprites are loaded from PNG files or synthesized procedurally, so every
part of the engine (and its tests) runs without bundled art. Each sprite
gets an opacity map: a boolean mask of the pixels whose alpha exceeds a
threshold. The masks drive both obstacle estimation and the light
texture correction pass.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .procgen import hash_seed, next_random
from .raster import Raster, read_png

SPRITE_SIZE = 128
SYNTH_KINDS = ("floor-block", "bush", "tree", "character")

# Any nonzero alpha counts as opaque by default; crisp game art rarely
# carries meaningful fractional alpha at the silhouette.
DEFAULT_ALPHA_THRESHOLD = 0


@dataclass(frozen=True)
class Sprite:
    image: Raster
    anchor: tuple[int, int] = (0, 0)

    def __post_init__(self):
        ax, ay = self.anchor
        if not (0 <= ax < self.image.width and 0 <= ay < self.image.height):
            raise ValueError("sprite anchor must lie within the image")

    @property
    def width(self) -> int:
        return self.image.width

    @property
    def height(self) -> int:
        return self.image.height


@dataclass(eq=False)
class OpacityMap:
    """Boolean mask of a sprite's non-transparent pixels."""

    mask: np.ndarray  # (height, width) bool

    def __post_init__(self):
        if self.mask.ndim != 2 or self.mask.dtype != np.bool_:
            raise ValueError("opacity mask must be a 2-D bool array")
        self.mask.flags.writeable = False

    @property
    def width(self) -> int:
        return int(self.mask.shape[1])

    @property
    def height(self) -> int:
        return int(self.mask.shape[0])

    @cached_property
    def true_count(self) -> int:
        return int(self.mask.sum())

    @cached_property
    def cell_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """(ys, xs) int32 coordinates of all true cells, row-major."""
        ys, xs = np.nonzero(self.mask)
        return ys.astype(np.int32), xs.astype(np.int32)

    @cached_property
    def row_span(self) -> tuple[int, int] | None:
        """Inclusive (first, last) rows containing any true cell."""
        rows = np.flatnonzero(self.mask.any(axis=1))
        if rows.size == 0:
            return None
        return int(rows[0]), int(rows[-1])

    @cached_property
    def footprint_center_row(self) -> int | None:
        span = self.row_span
        if span is None:
            return None
        return (span[0] + span[1]) // 2


def extract_opacity_map(sprite: Sprite, alpha_threshold: int = DEFAULT_ALPHA_THRESHOLD) -> OpacityMap:
    """Mask of pixels whose alpha strictly exceeds `alpha_threshold`."""
    if not 0 <= alpha_threshold <= 255:
        raise ValueError("alpha threshold must lie in 0..255")
    alpha = sprite.image.pixels[..., 3]
    return OpacityMap((alpha > alpha_threshold).copy())


def load_sprite(path, anchor: tuple[int, int] = (0, 0)) -> Sprite:
    return Sprite(read_png(path), anchor)


# --- procedural sprite synthesis -----------------------------------------

def _rand_int(state: int, lo: int, hi: int) -> tuple[int, int]:
    state, value = next_random(state)
    return state, lo + value % (hi - lo + 1)


def _diamond_mask(size: int, cx: int, cy: int, half_w: int, half_h: int) -> np.ndarray:
    ys, xs = np.ogrid[:size, :size]
    return (np.abs(xs - cx) * half_h + np.abs(ys - cy) * half_w) <= half_w * half_h


def _disc_mask(size: int, cx: int, cy: int, r: int) -> np.ndarray:
    ys, xs = np.ogrid[:size, :size]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r


def _paint(canvas: np.ndarray, mask: np.ndarray, rgb: tuple[int, int, int]) -> None:
    canvas[mask] = (*rgb, 255)


def _floor_block(canvas: np.ndarray, state: int) -> None:
    state, r = _rand_int(state, 70, 180)
    state, g = _rand_int(state, 80, 200)
    state, b = _rand_int(state, 50, 150)
    top = _diamond_mask(SPRITE_SIZE, 64, 32, 63, 31)
    # Extrude the diamond straight down to fake a block's side faces.
    depth = 32
    body = top.copy()
    for d in range(1, depth + 1):
        body[d:] |= top[:-d]
    sides = body & ~top
    xs = np.arange(SPRITE_SIZE)[None, :]
    left = sides & (xs < 64)
    right = sides & (xs >= 64)
    _paint(canvas, right, (r * 2 // 3, g * 2 // 3, b * 2 // 3))
    _paint(canvas, left, (r // 2, g // 2, b // 2))
    _paint(canvas, top, (r, g, b))


def _bush(canvas: np.ndarray, state: int) -> None:
    state, n = _rand_int(state, 2, 4)
    state, g = _rand_int(state, 120, 200)
    for _ in range(n):
        state, dx = _rand_int(state, -14, 14)
        state, dy = _rand_int(state, -6, 6)
        state, rad = _rand_int(state, 10, 17)
        _paint(canvas, _disc_mask(SPRITE_SIZE, 64 + dx, 42 + dy, rad), (30, g, 40))


def _tree(canvas: np.ndarray, state: int) -> None:
    state, g = _rand_int(state, 100, 190)
    state, rad = _rand_int(state, 18, 25)
    trunk = np.zeros((SPRITE_SIZE, SPRITE_SIZE), bool)
    trunk[38:70, 60:68] = True
    _paint(canvas, trunk, (96, 64, 28))
    _paint(canvas, _disc_mask(SPRITE_SIZE, 64, 28, rad), (20, g, 30))


def _character(canvas: np.ndarray, state: int) -> None:
    state, r = _rand_int(state, 120, 230)
    state, b = _rand_int(state, 120, 230)
    ys, xs = np.ogrid[:SPRITE_SIZE, :SPRITE_SIZE]
    body = ((xs - 64) / 10.0) ** 2 + ((ys - 52) / 14.0) ** 2 <= 1.0
    _paint(canvas, body, (r, 60, b))
    _paint(canvas, _disc_mask(SPRITE_SIZE, 64, 32, 8), (235, 200, 170))


_SYNTH_PAINTERS = {
    "floor-block": _floor_block,
    "bush": _bush,
    "tree": _tree,
    "character": _character,
}


def synth_sprite(kind: str, rng_state: int) -> Sprite:
    """Deterministic 128x128 test sprite for (kind, rng_state)."""
    painter = _SYNTH_PAINTERS.get(kind)
    if painter is None:
        raise ValueError(f"unknown sprite kind {kind!r} (expected one of {SYNTH_KINDS})")
    canvas = np.zeros((SPRITE_SIZE, SPRITE_SIZE, 4), np.uint8)
    painter(canvas, rng_state)
    return Sprite(Raster(canvas))


# --- atlas ----------------------------------------------------------------

@dataclass(frozen=True)
class AtlasEntry:
    name: str
    sprite: Sprite
    kind: str
    non_occluding: bool = False

    @property
    def is_floor(self) -> bool:
        return self.kind == "floor-block"


class Atlas:
    """Named sprite set with cached opacity maps."""

    def __init__(self, entries, alpha_threshold: int = DEFAULT_ALPHA_THRESHOLD):
        self._entries: dict[str, AtlasEntry] = {e.name: e for e in entries}
        self.alpha_threshold = alpha_threshold
        self._opacity: dict[str, OpacityMap] = {}

    def names(self):
        return tuple(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def entry(self, name: str) -> AtlasEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise KeyError(f"unknown sprite id {name!r}") from None

    def sprite(self, name: str) -> Sprite:
        return self.entry(name).sprite

    def opacity(self, name: str) -> OpacityMap:
        om = self._opacity.get(name)
        if om is None:
            om = extract_opacity_map(self.sprite(name), self.alpha_threshold)
            self._opacity[name] = om
        return om


_BUILTIN_SPRITES = (
    ("grass", "floor-block", False),
    ("dirt", "floor-block", False),
    ("stone", "floor-block", False),
    ("bush", "bush", False),
    ("tree", "tree", False),
    ("hero", "character", True),
)


def builtin_atlas(alpha_threshold: int = DEFAULT_ALPHA_THRESHOLD) -> Atlas:
    """Synthetic atlas used when no atlas directory is given."""
    entries = [
        AtlasEntry(name, synth_sprite(kind, hash_seed(f"isolume/{name}")), kind, non_occ)
        for name, kind, non_occ in _BUILTIN_SPRITES
    ]
    return Atlas(entries, alpha_threshold)


def load_atlas(root, alpha_threshold: int = DEFAULT_ALPHA_THRESHOLD) -> Atlas:
    """Load an atlas directory laid out as `<root>/<kind>/<name>.png`.

    An optional `<root>/manifest.json` maps sprite names to
    `{"ax": int, "ay": int, "non_occluding": bool}`.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"atlas directory not found: {root}")
    manifest = {}
    manifest_path = root / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    entries = []
    for kind_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        kind = kind_dir.name
        for png in sorted(kind_dir.glob("*.png")):
            name = png.stem
            meta = manifest.get(name, {})
            anchor = (int(meta.get("ax", 0)), int(meta.get("ay", 0)))
            entries.append(
                AtlasEntry(
                    name,
                    load_sprite(png, anchor),
                    kind,
                    bool(meta.get("non_occluding", kind == "character")),
                )
            )
    if not entries:
        raise ValueError(f"atlas directory holds no sprites: {root}")
    return Atlas(entries, alpha_threshold)


def atlas_from_env(alpha_threshold: int = DEFAULT_ALPHA_THRESHOLD) -> Atlas:
    path = os.environ.get("ISOLUME_ATLAS")
    if path:
        return load_atlas(path, alpha_threshold)
    return builtin_atlas(alpha_threshold)
