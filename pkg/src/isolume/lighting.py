"""Per-light ray tracing into the light texture.

Each light traces one ray per border pixel of its surrounding
rectangle, walking an integer line from the light center outward and
writing a distance-falloff intensity until it hits an obstacle. The
texture is rebuilt once every `update_interval` frames; the frames in
between reuse it, displaced against the camera motion. A correction
pass then overwrites the footprints of overlay sprites: sprites above
the light center get lit with the same falloff, sprites below go dark.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .assets import Atlas
from .occlusion import ObstacleMap
from .scene import PlacedSprite

DEFAULT_MARGIN = 128  # off-screen ring so nearby lights spill onto the viewport

TRACE_MODES = ("light", "shadow")
REFERENCE_MODES = ("footprint-center", "anchor")


@dataclass
class LightSource:
    x: int
    y: int
    a: int = 256  # horizontal half-extent of the traced rectangle
    b: int = 256  # vertical half-extent
    enabled: bool = True

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError("light half-extents must be at least 1")


@dataclass(frozen=True)
class TraceConfig:
    skip: int = 2  # stride over border pixels; gaps are hidden by the blur
    update_interval: int = 3  # frames between full retraces
    mode: str = "light"

    def __post_init__(self):
        if self.skip < 1 or self.update_interval < 1:
            raise ValueError("skip and update_interval must be at least 1")
        if self.mode not in TRACE_MODES:
            raise ValueError(f"mode must be one of {TRACE_MODES}")


@dataclass(eq=False)
class LightTexture:
    """Single-channel 8-bit intensity field, viewport plus margin."""

    intensity: np.ndarray  # (height, width) uint8
    margin: int = DEFAULT_MARGIN
    offset: tuple[int, int] = (0, 0)  # displacement applied since the last trace

    def __post_init__(self):
        if self.intensity.ndim != 2 or self.intensity.dtype != np.uint8:
            raise ValueError("light texture must be a 2-D uint8 array")

    @classmethod
    def for_viewport(cls, viewport_w: int, viewport_h: int, margin: int = DEFAULT_MARGIN):
        if viewport_w < 1 or viewport_h < 1 or margin < 0:
            raise ValueError("viewport must be positive and margin nonnegative")
        shape = (viewport_h + 2 * margin, viewport_w + 2 * margin)
        return cls(np.zeros(shape, np.uint8), margin)

    @property
    def width(self) -> int:
        return int(self.intensity.shape[1])

    @property
    def height(self) -> int:
        return int(self.intensity.shape[0])

    def copy(self) -> "LightTexture":
        return LightTexture(self.intensity.copy(), self.margin, self.offset)


def intensity(dj: int, di: int) -> int:
    """Distance falloff: 255 // (1 + chebyshev distance), floor arithmetic."""
    if dj < 0 or di < 0:
        raise ValueError("distances must be nonnegative")
    return 255 // (1 + (dj if dj > di else di))


def ray_path(org: tuple[int, int], dst: tuple[int, int]):
    """Pixels visited walking from org toward dst, in walk order.

    Reference integer line walk: the dominant axis advances every step
    and an error accumulator decides when the other axis follows. This
    is the canonical visit sequence; the backend kernels must agree
    with it exactly.
    """
    x, y = org
    w = dst[0] - x
    h = dst[1] - y
    dx1 = (w > 0) - (w < 0)
    dy1 = (h > 0) - (h < 0)
    dx2, dy2 = dx1, 0
    longest, shortest = abs(w), abs(h)
    if not longest > shortest:
        longest, shortest = abs(h), abs(w)
        dx2, dy2 = 0, dy1
    numerator = longest >> 1
    for _ in range(longest + 1):
        yield x, y
        numerator += shortest
        if numerator >= longest:
            numerator -= longest
            x += dx1
            y += dy1
        else:
            x += dx2
            y += dy2


def border_pixels(cx: int, cy: int, a: int, b: int, skip: int = 1) -> list[tuple[int, int]]:
    """Border pixels of the (2a+1)x(2b+1) rectangle centered on (cx, cy).

    Clockwise from the top-left corner; every skip-th pixel of each edge
    interior, with the four corners always included.
    """
    if a < 1 or b < 1 or skip < 1:
        raise ValueError("half-extents and skip must be at least 1")
    x0, x1 = cx - a, cx + a
    y0, y1 = cy - b, cy + b
    pts = [(x0, y0)]
    pts.extend((x, y0) for x in range(x0 + 1, x1, skip))
    pts.append((x1, y0))
    pts.extend((x1, y) for y in range(y0 + 1, y1, skip))
    pts.append((x1, y1))
    pts.extend((x, y1) for x in range(x1 - 1, x0, -skip))
    pts.append((x0, y1))
    pts.extend((x0, y) for y in range(y1 - 1, y0, -skip))
    return pts


def _blocked_u8(obstacles: ObstacleMap, tex: LightTexture) -> np.ndarray:
    if (obstacles.height, obstacles.width) != (tex.height, tex.width):
        raise ValueError("obstacle map and light texture sizes differ")
    return obstacles.blocked.view(np.uint8)


def _dst_arrays(points: Sequence[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, np.int32).reshape(-1, 2)
    return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])


def trace_ray(
    tex: LightTexture,
    obstacles: ObstacleMap,
    org: tuple[int, int],
    dst: tuple[int, int],
    center: tuple[int, int],
) -> int:
    """Trace one light ray in texture coordinates; returns pixels written."""
    blocked = _blocked_u8(obstacles, tex)
    dx, dy = _dst_arrays([dst])
    return _kernels.active().trace_rays(
        tex.intensity, blocked, org[0], org[1], center[0], center[1], dx, dy
    )


def trace_shadow_ray(
    tex: LightTexture,
    obstacles: ObstacleMap,
    org: tuple[int, int],
    dst: tuple[int, int],
) -> int:
    """Zero the ray's pixels from its first obstacle onward; returns count."""
    blocked = _blocked_u8(obstacles, tex)
    dx, dy = _dst_arrays([dst])
    return _kernels.active().shadow_rays(tex.intensity, blocked, org[0], org[1], dx, dy)


def render_light(
    tex: LightTexture,
    light: LightSource,
    obstacles: ObstacleMap,
    cfg: TraceConfig,
    offset: tuple[int, int] = (0, 0),
) -> tuple[int, int, int]:
    """Trace all of one light's border rays into the texture.

    `offset` translates the light's screen position into texture
    coordinates. In shadow mode the light rays are traced first and the
    shadow rays are painted afterwards, so shadows override this light's
    own writes. Returns (rays, pixels_written, pixels_zeroed).
    """
    if not light.enabled:
        return 0, 0, 0
    ox, oy = offset
    cx, cy = light.x + ox, light.y + oy
    pts = border_pixels(cx, cy, light.a, light.b, cfg.skip)
    dx, dy = _dst_arrays(pts)
    blocked = _blocked_u8(obstacles, tex)
    kern = _kernels.active()
    writes = kern.trace_rays(tex.intensity, blocked, cx, cy, cx, cy, dx, dy)
    zeroed = 0
    if cfg.mode == "shadow":
        zeroed = kern.shadow_rays(tex.intensity, blocked, cx, cy, dx, dy)
    return len(pts), writes, zeroed


def displace_texture(tex: LightTexture, delta: tuple[int, int]) -> LightTexture:
    """Shift the texture contents by `delta`, zero-filling vacated cells."""
    dx, dy = delta
    out = np.zeros_like(tex.intensity)
    h, w = tex.intensity.shape
    if abs(dx) < w and abs(dy) < h:
        sx0, sx1 = max(-dx, 0), min(w - dx, w)
        sy0, sy1 = max(-dy, 0), min(h - dy, h)
        out[sy0 + dy : sy1 + dy, sx0 + dx : sx1 + dx] = tex.intensity[sy0:sy1, sx0:sx1]
    return LightTexture(out, tex.margin, (tex.offset[0] + dx, tex.offset[1] + dy))


def _light_intersects(light: LightSource, tex: LightTexture, offset: tuple[int, int]) -> bool:
    cx, cy = light.x + offset[0], light.y + offset[1]
    return (
        cx + light.a >= 0
        and cx - light.a < tex.width
        and cy + light.b >= 0
        and cy - light.b < tex.height
    )


def apply_opacity_correction(
    tex: LightTexture,
    placed: Iterable[PlacedSprite],
    atlas: Atlas,
    lights: Sequence[LightSource],
    offset: tuple[int, int] = (0, 0),
    reference: str = "footprint-center",
) -> int:
    """Overwrite overlay sprite footprints after tracing.

    For each overlay placement (floor blocks excluded) and each enabled
    light: when the sprite's reference row sits above the light center
    its opaque cells take max(existing, falloff intensity); at or below,
    they are forced dark. All darkening runs before all lighting, which
    keeps the result independent of light order. Returns cells touched.
    """
    if reference not in REFERENCE_MODES:
        raise ValueError(f"reference must be one of {REFERENCE_MODES}")
    ox, oy = offset
    active_lights = [l for l in lights if l.enabled]
    zero_jobs = []
    add_jobs = []
    for p in placed:
        entry = atlas.entry(p.sprite_id)
        if p.layer == 0 or entry.is_floor:
            continue
        opacity = atlas.opacity(p.sprite_id)
        if opacity.true_count == 0:
            continue
        if reference == "anchor":
            ref_y = p.y + entry.sprite.anchor[1]
        else:
            ref_y = p.y + opacity.footprint_center_row
        ys, xs = opacity.cell_coords
        for light in active_lights:
            job = (xs, ys, p.x + ox, p.y + oy, light.x + ox, light.y + oy)
            if ref_y < light.y:
                add_jobs.append(job)
            else:
                zero_jobs.append(job)
    kern = _kernels.active()
    touched = 0
    for xs, ys, px, py, _, _ in zero_jobs:
        touched += kern.zero_cells(tex.intensity, xs, ys, px, py)
    for xs, ys, px, py, cx, cy in add_jobs:
        touched += kern.add_cells(tex.intensity, xs, ys, px, py, cx, cy)
    return touched


@dataclass
class LightPassStats:
    retraced: bool = False
    trace_us: float = 0.0
    correction_us: float = 0.0
    displace_us: float = 0.0
    rays: int = 0
    writes: int = 0
    zeroed: int = 0
    correction_cells: int = 0


@dataclass
class LightCounters:
    traces: int = 0
    displacements: int = 0
    rays: int = 0
    writes: int = 0
    zeroed: int = 0
    correction_cells: int = 0

    def reset(self) -> None:
        self.__init__()


class LightRenderer:
    """Owns the cached light texture and the retrace cadence.

    On frames where frame_index % update_interval == 0 the texture is
    cleared and every intersecting light retraced (then corrected); on
    the frames between, the cached texture is displaced against the
    camera delta and reused.
    """

    def __init__(
        self,
        cfg: TraceConfig | None = None,
        margin: int = DEFAULT_MARGIN,
        reference: str = "footprint-center",
    ):
        self.cfg = cfg or TraceConfig()
        self.margin = margin
        self.reference = reference
        self.counters = LightCounters()
        self.last_stats = LightPassStats()
        self._cache: LightTexture | None = None

    def render(
        self,
        lights: Sequence[LightSource],
        obstacles: ObstacleMap,
        frame_index: int = 0,
        camera_delta: tuple[int, int] = (0, 0),
        placed: Sequence[PlacedSprite] | None = None,
        atlas: Atlas | None = None,
    ) -> LightTexture:
        stats = LightPassStats()
        if frame_index % self.cfg.update_interval == 0 or self._cache is None:
            stats.retraced = True
            tex = LightTexture(
                np.zeros((obstacles.height, obstacles.width), np.uint8), self.margin
            )
            off = (self.margin, self.margin)
            t0 = time.perf_counter_ns()
            for light in lights:
                if light.enabled and _light_intersects(light, tex, off):
                    rays, writes, zeroed = render_light(tex, light, obstacles, self.cfg, off)
                    stats.rays += rays
                    stats.writes += writes
                    stats.zeroed += zeroed
            t1 = time.perf_counter_ns()
            if placed is not None and atlas is not None:
                stats.correction_cells = apply_opacity_correction(
                    tex, placed, atlas, lights, off, self.reference
                )
            t2 = time.perf_counter_ns()
            stats.trace_us = (t1 - t0) / 1000.0
            stats.correction_us = (t2 - t1) / 1000.0
            self.counters.traces += 1
            self._cache = tex
        else:
            t0 = time.perf_counter_ns()
            self._cache = displace_texture(
                self._cache, (-camera_delta[0], -camera_delta[1])
            )
            stats.displace_us = (time.perf_counter_ns() - t0) / 1000.0
            self.counters.displacements += 1
        self.counters.rays += stats.rays
        self.counters.writes += stats.writes
        self.counters.zeroed += stats.zeroed
        self.counters.correction_cells += stats.correction_cells
        self.last_stats = stats
        return self._cache


def render_lights(
    lights: Sequence[LightSource],
    obstacles: ObstacleMap,
    cfg: TraceConfig | None = None,
    frame_index: int = 0,
    camera_delta: tuple[int, int] = (0, 0),
    cache: LightTexture | None = None,
    margin: int = DEFAULT_MARGIN,
    placed: Sequence[PlacedSprite] | None = None,
    atlas: Atlas | None = None,
    reference: str = "footprint-center",
) -> LightTexture:
    """One frame of the light pass without persistent state.

    Retrace frames (frame_index % update_interval == 0, or no cache yet)
    rebuild the texture from scratch; other frames displace `cache` by
    the inverse camera delta and reuse it.
    """
    renderer = LightRenderer(cfg, margin, reference)
    renderer._cache = cache
    return renderer.render(lights, obstacles, frame_index, camera_delta, placed, atlas)
