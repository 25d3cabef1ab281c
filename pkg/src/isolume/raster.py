"""RGBA pixel grids and lossless PNG I/O."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

# Pinned so re-encoding the same raster always yields the same bytes.
_PNG_COMPRESS_LEVEL = 6


@dataclass(frozen=True, eq=False)
class Raster:
    """Rectangular RGBA image, 8 bits per channel, row-major.

    The pixel array is frozen on construction; rasters can be shared
    freely between threads.
    """

    pixels: np.ndarray  # (height, width, 4) uint8

    def __post_init__(self):
        px = self.pixels
        if not isinstance(px, np.ndarray) or px.ndim != 3 or px.shape[2] != 4:
            raise ValueError("raster pixels must be an (h, w, 4) array")
        if px.dtype != np.uint8:
            raise ValueError("raster pixels must be uint8")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise ValueError("raster must have nonzero width and height")
        if not px.flags.c_contiguous:
            px = np.ascontiguousarray(px)
            object.__setattr__(self, "pixels", px)
        px.flags.writeable = False

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def same_pixels(self, other: "Raster") -> bool:
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


def read_png(path) -> Raster:
    """Decode a PNG file into a Raster.

    RGBA files decode byte-for-byte; RGB files get an opaque alpha
    channel. Other color modes (palette, grayscale) are rejected.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "RGBA":
                arr = np.asarray(im, dtype=np.uint8)
            elif im.mode == "RGB":
                rgb = np.asarray(im, dtype=np.uint8)
                alpha = np.full(rgb.shape[:2] + (1,), 255, np.uint8)
                arr = np.concatenate([rgb, alpha], axis=2)
            else:
                raise ValueError(f"unsupported image mode {im.mode!r} (need RGB or RGBA)")
    except UnidentifiedImageError as exc:
        raise ValueError(f"not a decodable image: {path}") from exc
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"image has a zero dimension: {path}")
    return Raster(arr.copy())


def write_png(raster: Raster, path) -> None:
    """Write a Raster as a lossless RGBA PNG with fixed encoder settings."""
    if not isinstance(raster, Raster):
        raise TypeError("write_png expects a Raster")
    im = Image.fromarray(raster.pixels, "RGBA")
    im.save(path, format="PNG", compress_level=_PNG_COMPRESS_LEVEL)


def blit_over(canvas: np.ndarray, src: np.ndarray, x: int, y: int) -> None:
    """Alpha-over `src` (h, w, 4) onto a writable opaque canvas at (x, y).

    Integer blend with round-to-nearest: (src*a + dst*(255-a) + 127) // 255.
    The canvas alpha stays opaque. Off-canvas regions are clipped.
    """
    ch, cw = canvas.shape[:2]
    sh, sw = src.shape[:2]
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + sw, cw), min(y + sh, ch)
    if x0 >= x1 or y0 >= y1:
        return
    sub = src[y0 - y : y1 - y, x0 - x : x1 - x].astype(np.int32)
    dst = canvas[y0:y1, x0:x1]
    a = sub[..., 3:4]
    blended = (sub[..., :3] * a + dst[..., :3].astype(np.int32) * (255 - a) + 127) // 255
    dst[..., :3] = blended.astype(np.uint8)
    dst[..., 3] = 255
