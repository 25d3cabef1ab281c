"""Command-line entry point.

Subcommands: generate, render, animate, bench, inspect. Every command
with identical flags produces byte-identical outputs; all randomness
comes from the seed string. Exit codes: 0 success, 2 usage error,
1 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .assets import DEFAULT_ALPHA_THRESHOLD, atlas_from_env, load_atlas
from .bench import BenchScenario, compare_backends, run_benchmark, summarize, write_csv
from .lighting import DEFAULT_MARGIN, LightSource, TraceConfig
from .occlusion import DEFAULT_DELTA_Y, DEFAULT_NOISE_WINDOW, obstacle_overlay
from .pipeline import FrameRenderer
from .procgen import (
    default_palette,
    generate_map,
    load_palette,
    load_scenemap,
    save_scenemap,
)
from .raster import Raster, write_png
from .scene import IsoLayout, PlacedSprite
from .shading import ShadeParams


def _parse_pair(text: str, sep: str, what: str) -> tuple[int, int]:
    parts = text.split(sep)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"{what} must look like A{sep}B, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} needs two integers, got {text!r}")


def _size(text: str) -> tuple[int, int]:
    rows, cols = _parse_pair(text, "x", "size")
    if rows < 1 or cols < 1:
        raise argparse.ArgumentTypeError("size must be at least 1x1")
    return rows, cols


def _viewport(text: str) -> tuple[int, int]:
    w, h = _parse_pair(text, "x", "viewport")
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("viewport must be positive")
    return w, h


def _xy(text: str) -> tuple[int, int]:
    return _parse_pair(text, ",", "coordinate")


def _parse_lights(text: str) -> list[LightSource]:
    lights = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [int(v) for v in chunk.split(",")]
        if len(parts) == 2:
            lights.append(LightSource(parts[0], parts[1]))
        elif len(parts) == 4:
            lights.append(LightSource(*parts))
        else:
            raise argparse.ArgumentTypeError(
                f"light spec must be x,y or x,y,a,b; got {chunk!r}"
            )
    return lights


def _parse_characters(text: str) -> list[tuple[int, int]]:
    return [_xy(chunk) for chunk in text.split(";") if chunk.strip()]


def _add_scene_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", default="paper-demo", help="map seed string")
    p.add_argument("--map", help="scene map JSON file (overrides --seed)")
    p.add_argument("--size", type=_size, default=(8, 8), help="map rows x cols")
    p.add_argument("--palette", help="palette JSON file")
    p.add_argument("--atlas", help="atlas directory (default: $ISOLUME_ATLAS or builtin)")
    p.add_argument(
        "--alpha-threshold", type=int, default=DEFAULT_ALPHA_THRESHOLD,
        help="opacity mask threshold 0..255",
    )


def _add_frame_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--viewport", type=_viewport, default=(1280, 720), help="output WxH")
    p.add_argument("--origin", type=_xy, default=(0, 0), help="layout origin X,Y")
    p.add_argument("--face-h", type=int, default=32, help="vertical row step in pixels")
    p.add_argument("--margin", type=int, default=DEFAULT_MARGIN, help="light texture margin")
    p.add_argument("--lights", type=_parse_lights, default=None,
                   help='"x,y,a,b;x2,y2,a2,b2" (default: one light at the viewport center)')
    p.add_argument("--no-lights", action="store_true", help="render with an empty light set")
    p.add_argument("--characters", type=_parse_characters, default=None, help='"x,y;x2,y2"')
    p.add_argument("--ambient", type=float, default=0.4, help="ambient clarity in [0,1]")
    p.add_argument("--blur", type=int, default=2, help="box blur radius")
    p.add_argument("--dark-outside", action="store_true",
                   help="scale the base color by the light value as well")
    p.add_argument("--skip", type=int, default=2, help="border pixel stride")
    p.add_argument("--interval", type=int, default=3, help="frames between retraces")
    p.add_argument("--mode", choices=("light", "shadow"), default="light")
    p.add_argument("--reference", choices=("footprint-center", "anchor"),
                   default="footprint-center", help="correction above/below reference")
    p.add_argument("--no-correction", action="store_true",
                   help="skip the opacity correction pass")
    p.add_argument("--threads", type=int, default=1, help="shading worker threads")
    p.add_argument("--delta-y", type=int, default=DEFAULT_DELTA_Y, help="obstacle band height")
    p.add_argument("--noise-window", type=int, default=DEFAULT_NOISE_WINDOW,
                   help="obstacle noise reduction window")


def _load_atlas(args):
    if args.atlas:
        return load_atlas(args.atlas, args.alpha_threshold)
    return atlas_from_env(args.alpha_threshold)


def _load_map(args):
    if args.map:
        return load_scenemap(args.map)
    palette = load_palette(args.palette) if args.palette else default_palette()
    return generate_map(args.seed, args.size[0], args.size[1], palette)


def _default_lights(args) -> list[LightSource]:
    if args.no_lights:
        return []
    if args.lights is not None:
        return args.lights
    w, h = args.viewport
    return [LightSource(w // 2, h // 2)]


def _build_renderer(args) -> FrameRenderer:
    atlas = _load_atlas(args)
    scene_map = _load_map(args)
    characters = []
    if args.characters:
        if "hero" not in atlas:
            raise RuntimeError("atlas has no 'hero' sprite for --characters")
        characters = [
            PlacedSprite("hero", x, y, 3, (-1, i))
            for i, (x, y) in enumerate(args.characters)
        ]
    return FrameRenderer(
        scene_map,
        atlas=atlas,
        layout=IsoLayout(face_h=args.face_h, origin=args.origin),
        viewport=args.viewport,
        margin=args.margin,
        trace_cfg=TraceConfig(skip=args.skip, update_interval=args.interval, mode=args.mode),
        shade_params=ShadeParams(args.ambient, args.blur, args.dark_outside),
        characters=tuple(characters),
        delta_y=args.delta_y,
        noise_window=args.noise_window,
        reference=args.reference,
        threads=args.threads,
    )


def cmd_generate(args) -> int:
    scene_map = _load_map(args)
    save_scenemap(scene_map, args.out)
    print(f"wrote {args.out} ({scene_map.rows}x{scene_map.cols} cells, seed {scene_map.seed!r})")
    return 0


def _overlay_white(frame: Raster, renderer: FrameRenderer) -> Raster:
    vw, vh = renderer.viewport
    m = renderer.margin
    cam = renderer.camera
    overlay = obstacle_overlay(
        renderer.obstacles_for(cam), (m, m, vw, vh)
    )
    out = frame.pixels.copy()
    mask = overlay.pixels[..., 3] > 0
    out[mask] = (255, 255, 255, 255)
    return Raster(out)


def cmd_render(args) -> int:
    renderer = _build_renderer(args)
    lights = _default_lights(args)
    frame, _ = renderer.render_frame(lights, 0, correction=not args.no_correction)
    if args.inspect == "obstacles":
        frame = _overlay_white(frame, renderer)
    write_png(frame, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_animate(args) -> int:
    renderer = _build_renderer(args)
    lights = _default_lights(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lsx, lsy = args.light_step
    csx, csy = args.camera_step
    for f in range(args.frames):
        cam = (csx * f, csy * f)
        frame_lights = [
            LightSource(l.x + lsx * f - cam[0], l.y + lsy * f - cam[1], l.a, l.b, l.enabled)
            for l in lights
        ]
        delta = (csx, csy) if f > 0 else (0, 0)
        frame, _ = renderer.render_frame(
            frame_lights, f, camera=cam, camera_delta=delta,
            correction=not args.no_correction,
        )
        write_png(frame, out_dir / f"frame_{f:04d}.png")
    print(
        f"wrote {args.frames} frames to {out_dir} "
        f"({renderer.lighting.counters.traces} traces, "
        f"{renderer.lighting.counters.displacements} displaced)"
    )
    return 0


def cmd_bench(args) -> int:
    if args.scenario:
        scenario = BenchScenario.from_json(Path(args.scenario).read_text(encoding="utf-8"))
    else:
        scenario = BenchScenario()
    if args.frames is not None:
        scenario = BenchScenario(**{**scenario.__dict__, "frames": args.frames})
    if args.threads is not None:
        scenario = BenchScenario(**{**scenario.__dict__, "threads": args.threads})
    if args.compare_backends:
        reports = compare_backends(scenario)
    else:
        reports = [run_benchmark(scenario, args.backend)]
    for report in reports:
        print(summarize(report))
    if args.out:
        write_csv(reports, args.out, append=args.append)
        print(f"wrote {args.out}")
    return 0


def cmd_inspect(args) -> int:
    renderer = _build_renderer(args)
    if args.what == "obstacles":
        vw, vh = renderer.viewport
        m = renderer.margin
        raster = obstacle_overlay(renderer.obstacles_for((0, 0)), (m, m, vw, vh))
        write_png(raster, args.out)
    elif args.what == "lighttex":
        lights = _default_lights(args)
        renderer.render_frame(lights, 0, correction=not args.no_correction)
        tex = renderer.light_texture()
        gray = tex.intensity
        raster = Raster(np.dstack([gray, gray, gray, np.full_like(gray, 255)]))
        write_png(raster, args.out)
    else:  # opacity
        if not args.sprite:
            raise RuntimeError("inspect opacity needs --sprite NAME")
        mask = renderer.atlas.opacity(args.sprite).mask
        gray = np.where(mask, 255, 0).astype(np.uint8)
        raster = Raster(np.dstack([gray, gray, gray, np.full_like(gray, 255)]))
        write_png(raster, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isolume",
        description="Deterministic 2.5D lighting for procedurally generated isometric maps",
    )
    parser.add_argument("--backend", choices=("pure", "compiled"), default=None,
                        help="kernel backend (default: compiled when built)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a scene map JSON from a seed")
    _add_scene_args(p)
    p.add_argument("--out", default="map.json")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="render one shaded frame to PNG")
    _add_scene_args(p)
    _add_frame_args(p)
    p.add_argument("--inspect", choices=("obstacles",), default=None,
                   help="overlay white obstacle pixels on the frame")
    p.add_argument("--out", default="frame.png")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("animate", help="render a frame sequence")
    _add_scene_args(p)
    _add_frame_args(p)
    p.add_argument("--frames", type=int, default=6)
    p.add_argument("--light-step", type=_xy, default=(0, 0), help="light motion per frame")
    p.add_argument("--camera-step", type=_xy, default=(0, 0), help="camera motion per frame")
    p.add_argument("--out-dir", default="frames")
    p.set_defaults(func=cmd_animate)

    p = sub.add_parser("bench", help="run the performance harness")
    p.add_argument("--scenario", help="scenario JSON file (defaults otherwise)")
    p.add_argument("--frames", type=int, default=None, help="override scenario frame count")
    p.add_argument("--threads", type=int, default=None, help="override shading threads")
    p.add_argument("--compare-backends", action="store_true",
                   help="run every available kernel backend")
    p.add_argument("--out", help="write results CSV")
    p.add_argument("--append", action="store_true", help="append to the CSV without a header")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("inspect", help="dump intermediate data as PNG")
    p.add_argument("what", choices=("obstacles", "lighttex", "opacity"))
    _add_scene_args(p)
    _add_frame_args(p)
    p.add_argument("--sprite", help="sprite name for `inspect opacity`")
    p.add_argument("--out", default="inspect.png")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        try:
            _kernels.set_backend(args.backend)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
