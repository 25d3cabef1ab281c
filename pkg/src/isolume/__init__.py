"""Deterministic headless 2.5D lighting for isometric tile maps.

Pipeline: a seeded generator picks blocks and overlays for every map
cell; the blocks are assembled in staggered isometric order and
composed into an unlit scene; an obstacle map is estimated from the
sprites' opacity masks; each light traces rays into an off-screen
intensity texture with distance falloff; an opacity-map correction
relights or darkens overlay sprites; finally the blurred texture is
blended with the scene colors into the output frame.

The hot kernels run in a compiled extension when available, with a
bit-identical NumPy fallback (see isolume._kernels).
"""

from ._kernels import available_backends, get_backend, set_backend
from .assets import (
    Atlas,
    OpacityMap,
    Sprite,
    builtin_atlas,
    extract_opacity_map,
    load_atlas,
    load_sprite,
    synth_sprite,
)
from .bench import BenchReport, BenchScenario, run_benchmark, write_csv
from .lighting import (
    LightRenderer,
    LightSource,
    LightTexture,
    TraceConfig,
    apply_opacity_correction,
    displace_texture,
    intensity,
    render_light,
    render_lights,
    trace_ray,
    trace_shadow_ray,
)
from .occlusion import ObstacleMap, build_obstacle_map, reduce_noise
from .pipeline import FrameRenderer
from .procgen import (
    Palette,
    SceneMap,
    generate_map,
    hash_seed,
    next_random,
    scenemap_from_json,
    scenemap_to_json,
)
from .raster import Raster, read_png, write_png
from .scene import IsoLayout, PlacedSprite, block_screen_position, compose_scene
from .shading import ShadeParams, box_blur, composite_frame, shade_fragment

__version__ = "0.1.0"

__all__ = [
    "Atlas", "BenchReport", "BenchScenario", "FrameRenderer", "IsoLayout",
    "LightRenderer", "LightSource", "LightTexture", "ObstacleMap", "OpacityMap",
    "Palette", "PlacedSprite", "Raster", "SceneMap", "ShadeParams", "Sprite",
    "TraceConfig", "apply_opacity_correction", "available_backends",
    "block_screen_position", "box_blur", "build_obstacle_map", "builtin_atlas",
    "compose_scene", "composite_frame", "displace_texture", "extract_opacity_map",
    "generate_map", "get_backend", "hash_seed", "intensity", "load_atlas",
    "load_sprite", "next_random", "read_png", "reduce_noise", "render_light",
    "render_lights", "run_benchmark", "scenemap_from_json", "scenemap_to_json",
    "set_backend", "shade_fragment", "synth_sprite", "trace_ray",
    "trace_shadow_ray", "write_csv", "write_png",
]
