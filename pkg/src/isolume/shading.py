"""Light-texture blur and the per-fragment shading blend.

The texture is box-blurred (which also hides the gaps left by ray
skipping), then every viewport pixel blends its scene color with the
light value sampled at the margin-offset texture coordinate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lighting import LightTexture
from .raster import Raster, write_png  # noqa: F401  (write_png re-exported here)

LUMA_R, LUMA_G, LUMA_B = 0.349, 0.114, 0.537


@dataclass(frozen=True)
class ShadeParams:
    ambient_clarity: float = 0.4
    blur_radius: int = 2
    dark_outside: bool = False

    def __post_init__(self):
        if not 0.0 <= self.ambient_clarity <= 1.0:
            raise ValueError("ambient clarity must lie in [0, 1]")
        if self.blur_radius < 0:
            raise ValueError("blur radius must be nonnegative")


def box_blur(tex: LightTexture, radius: int) -> LightTexture:
    """Rounded (2r+1)^2 window mean with clamp-to-edge sampling."""
    if radius < 0:
        raise ValueError("blur radius must be nonnegative")
    blurred = _kernels.active().box_blur_region(
        tex.intensity, radius, 0, 0, tex.width, tex.height
    )
    return LightTexture(blurred, tex.margin, tex.offset)


def blur_viewport(tex: LightTexture, radius: int, viewport: tuple[int, int]) -> np.ndarray:
    """Blurred texture values for the viewport window only.

    Identical to sampling box_blur(tex) at the margin offset; the blur is
    just not computed for margin texels nobody samples.
    """
    vw, vh = viewport
    m = tex.margin
    if vw + 2 * m > tex.width or vh + 2 * m > tex.height:
        raise ValueError("viewport exceeds the light texture coverage")
    return _kernels.active().box_blur_region(tex.intensity, radius, m, m, vw, vh)


def shade_fragment(
    tex_color: tuple[float, float, float, float],
    light_value: float,
    ambient_clarity: float,
    dark_outside: bool = False,
) -> tuple[float, float, float, float]:
    """Shading blend for one fragment, unit-interval channels.

    luminance weights the light contribution; sqrt(ambient) scales the
    base color; the sum clamps to [0, 1]. Alpha passes through.
    """
    r, g, b, a = tex_color
    lum = r * LUMA_R + g * LUMA_G + b * LUMA_B
    lf = lum * light_value / (ambient_clarity * ambient_clarity + 0.1)
    sa = math.sqrt(ambient_clarity)
    out = []
    for c in (r, g, b):
        v = c * sa
        if dark_outside:
            v = v * light_value
        v = v + lf
        out.append(min(max(v, 0.0), 1.0))
    return (out[0], out[1], out[2], a)


def shade_scene(
    scene_pixels: np.ndarray,
    light_region: np.ndarray,
    ambient_clarity: float,
    dark_outside: bool = False,
    threads: int = 1,
) -> np.ndarray:
    """Apply the fragment blend over a whole frame.

    `light_region` carries the blurred texture values aligned with the
    scene pixels. Rows are independent, so the threaded path splits them
    into bands; output is bit-identical either way.
    """
    h, w = light_region.shape
    out = np.empty((h, w, 4), np.uint8)
    kern = _kernels.active()
    if threads <= 1 or h < threads:
        kern.shade_frame(scene_pixels, light_region, ambient_clarity, dark_outside, 0, h, out)
        return out
    bounds = [(h * i // threads, h * (i + 1) // threads) for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(
                kern.shade_frame,
                scene_pixels, light_region, ambient_clarity, dark_outside, r0, r1, out,
            )
            for r0, r1 in bounds
        ]
        for f in futures:
            f.result()
    return out


def composite_frame(
    scene: Raster,
    tex: LightTexture,
    params: ShadeParams,
    viewport: tuple[int, int] | None = None,
    threads: int = 1,
) -> Raster:
    """Blur the light texture and shade the scene with it.

    The viewport defaults to the scene size; the scene raster and the
    texture must both cover it.
    """
    vw, vh = viewport or (scene.width, scene.height)
    if vw > scene.width or vh > scene.height:
        raise ValueError("viewport exceeds the scene raster")
    region = blur_viewport(tex, params.blur_radius, (vw, vh))
    window = np.ascontiguousarray(scene.pixels[:vh, :vw])
    shaded = shade_scene(window, region, params.ambient_clarity, params.dark_outside, threads)
    return Raster(shaded)
