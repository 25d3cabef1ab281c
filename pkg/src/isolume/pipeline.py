"""End-to-end frame pipeline with per-phase instrumentation.

Builds the world once per map (composed scene raster, obstacle grid,
both in world space), then renders frames: window the world for the
camera, run the light pass (retrace or displace), blur, shade. Phase
timings and work counters feed the benchmark harness.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .assets import Atlas, atlas_from_env
from .lighting import DEFAULT_MARGIN, LightRenderer, LightTexture, TraceConfig
from .occlusion import (
    DEFAULT_DELTA_Y,
    DEFAULT_NOISE_WINDOW,
    ObstacleMap,
    build_obstacle_map,
    reduce_noise,
)
from .procgen import SceneMap
from .raster import Raster
from .scene import (
    IsoLayout,
    PlacedSprite,
    build_draw_list,
    composite_draw_list,
    scene_extent,
)
from .shading import ShadeParams, blur_viewport, shade_scene


@dataclass
class FrameStats:
    retraced: bool = False
    trace_us: float = 0.0
    correction_us: float = 0.0
    displace_us: float = 0.0
    blur_us: float = 0.0
    shade_us: float = 0.0
    total_us: float = 0.0
    rays: int = 0
    writes: int = 0
    zeroed: int = 0
    correction_cells: int = 0
    fragments: int = 0

    @property
    def light_phase_us(self) -> float:
        """Time spent updating the light texture this frame."""
        return self.trace_us + self.correction_us + self.displace_us


def _window2d(src: np.ndarray, x0: int, y0: int, w: int, h: int, fill=0) -> np.ndarray:
    out = np.full((h, w), fill, src.dtype)
    sx0, sy0 = max(x0, 0), max(y0, 0)
    sx1, sy1 = min(x0 + w, src.shape[1]), min(y0 + h, src.shape[0])
    if sx1 > sx0 and sy1 > sy0:
        out[sy0 - y0 : sy1 - y0, sx0 - x0 : sx1 - x0] = src[sy0:sy1, sx0:sx1]
    return out


class FrameRenderer:
    """Renders shaded frames of one scene map."""

    def __init__(
        self,
        scene_map: SceneMap,
        atlas: Atlas | None = None,
        layout: IsoLayout | None = None,
        viewport: tuple[int, int] = (1280, 720),
        margin: int = DEFAULT_MARGIN,
        trace_cfg: TraceConfig | None = None,
        shade_params: ShadeParams | None = None,
        characters: tuple[PlacedSprite, ...] = (),
        delta_y: int = DEFAULT_DELTA_Y,
        noise_window: int = DEFAULT_NOISE_WINDOW,
        reference: str = "footprint-center",
        threads: int = 1,
        background=(0, 0, 0, 255),
    ):
        self.atlas = atlas or atlas_from_env()
        self.layout = layout or IsoLayout()
        self.viewport = viewport
        self.margin = margin
        self.trace_cfg = trace_cfg or TraceConfig()
        self.shade_params = shade_params or ShadeParams()
        self.threads = threads
        self.scene_map = scene_map
        self.camera = (0, 0)
        self.last_stats = FrameStats()
        self._background = background

        self.draw_list = build_draw_list(scene_map, self.atlas, self.layout, characters)
        extent = scene_extent(self.draw_list, self.atlas)
        # World raster and world obstacle grid are built once per map; per
        # frame they are only windowed for the camera.
        world_size = (max(extent[0], viewport[0]), max(extent[1], viewport[1]))
        self._world = composite_draw_list(self.draw_list, self.atlas, world_size, background)
        grid_size = (self._world.width + 2 * margin, self._world.height + 2 * margin)
        obstacles = build_obstacle_map(
            self.draw_list, self.atlas, grid_size, delta_y, offset=(margin, margin)
        )
        self._world_obstacles = reduce_noise(obstacles, noise_window)
        self._lighting = LightRenderer(self.trace_cfg, margin, reference)

    @property
    def lighting(self) -> LightRenderer:
        return self._lighting

    def scene_raster(self, camera: tuple[int, int] = (0, 0)) -> Raster:
        """Unlit viewport window of the composed world."""
        vw, vh = self.viewport
        px = self._world.pixels
        out = np.empty((vh, vw, 4), np.uint8)
        for c in range(4):
            out[..., c] = _window2d(px[..., c], camera[0], camera[1], vw, vh, self._background[c])
        return Raster(out)

    def obstacles_for(self, camera: tuple[int, int] = (0, 0)) -> ObstacleMap:
        """Texture-aligned obstacle window for the given camera."""
        vw, vh = self.viewport
        tw, th = vw + 2 * self.margin, vh + 2 * self.margin
        return ObstacleMap(
            _window2d(self._world_obstacles.blocked, camera[0], camera[1], tw, th, False)
        )

    def placed_for(self, camera: tuple[int, int]) -> list[PlacedSprite]:
        cx, cy = camera
        if cx == 0 and cy == 0:
            return self.draw_list
        return [
            PlacedSprite(p.sprite_id, p.x - cx, p.y - cy, p.layer, p.cell)
            for p in self.draw_list
        ]

    def render_frame(
        self,
        lights,
        frame_index: int = 0,
        camera: tuple[int, int] | None = None,
        camera_delta: tuple[int, int] = (0, 0),
        correction: bool = True,
    ) -> tuple[Raster, FrameStats]:
        """Render one shaded frame; lights are given in screen coordinates."""
        t_start = time.perf_counter_ns()
        cam = camera if camera is not None else self.camera
        self.camera = cam
        obstacles = self.obstacles_for(cam)
        placed = self.placed_for(cam) if correction else None
        tex = self._lighting.render(
            lights, obstacles, frame_index, camera_delta, placed,
            self.atlas if correction else None,
        )
        light_stats = self._lighting.last_stats

        t0 = time.perf_counter_ns()
        region = blur_viewport(tex, self.shade_params.blur_radius, self.viewport)
        t1 = time.perf_counter_ns()
        scene = self.scene_raster(cam)
        t2 = time.perf_counter_ns()
        shaded = shade_scene(
            scene.pixels, region, self.shade_params.ambient_clarity,
            self.shade_params.dark_outside, self.threads,
        )
        t3 = time.perf_counter_ns()

        stats = FrameStats(
            retraced=light_stats.retraced,
            trace_us=light_stats.trace_us,
            correction_us=light_stats.correction_us,
            displace_us=light_stats.displace_us,
            blur_us=(t1 - t0) / 1000.0,
            shade_us=(t3 - t2) / 1000.0,
            total_us=(t3 - t_start) / 1000.0,
            rays=light_stats.rays,
            writes=light_stats.writes,
            zeroed=light_stats.zeroed,
            correction_cells=light_stats.correction_cells,
            fragments=self.viewport[0] * self.viewport[1],
        )
        self.last_stats = stats
        return Raster(shaded), stats

    def light_texture(self) -> LightTexture | None:
        return self._lighting._cache
