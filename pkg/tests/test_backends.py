"""Bit-identity between the compiled kernels and the NumPy fallback."""

import numpy as np
import pytest

from isolume import _kernels
from isolume.lighting import LightSource
from isolume.pipeline import FrameRenderer
from isolume.procgen import generate_map

pytestmark = pytest.mark.skipif(
    "compiled" not in _kernels.available_backends(),
    reason="compiled extension not built",
)

COMPILED = lambda: _kernels.backend_module("compiled")
PURE = lambda: _kernels.backend_module("pure")


def random_grids(rng, w, h, density=0.08):
    tex = rng.integers(0, 256, (h, w), np.uint8)
    blocked = (rng.random((h, w)) < density).astype(bool)
    return tex, blocked


def test_trace_rays_equivalent():
    rng = np.random.default_rng(100)
    for _ in range(40):
        w, h = int(rng.integers(8, 90)), int(rng.integers(8, 90))
        tex, blocked = random_grids(rng, w, h)
        n = int(rng.integers(1, 50))
        dstx = rng.integers(-20, w + 20, n).astype(np.int32)
        dsty = rng.integers(-20, h + 20, n).astype(np.int32)
        ox, oy = int(rng.integers(0, w)), int(rng.integers(0, h))
        cx, cy = int(rng.integers(-5, w + 5)), int(rng.integers(-5, h + 5))
        t1, t2 = tex.copy(), tex.copy()
        b8 = blocked.view(np.uint8)
        w1 = COMPILED().trace_rays(t1, b8, ox, oy, cx, cy, dstx, dsty)
        w2 = PURE().trace_rays(t2, b8, ox, oy, cx, cy, dstx, dsty)
        assert w1 == w2
        assert np.array_equal(t1, t2)


def test_shadow_rays_equivalent():
    rng = np.random.default_rng(101)
    for _ in range(40):
        w, h = int(rng.integers(8, 90)), int(rng.integers(8, 90))
        tex, blocked = random_grids(rng, w, h, density=0.15)
        n = int(rng.integers(1, 50))
        dstx = rng.integers(-20, w + 20, n).astype(np.int32)
        dsty = rng.integers(-20, h + 20, n).astype(np.int32)
        ox, oy = int(rng.integers(0, w)), int(rng.integers(0, h))
        t1, t2 = tex.copy(), tex.copy()
        b8 = blocked.view(np.uint8)
        z1 = COMPILED().shadow_rays(t1, b8, ox, oy, dstx, dsty)
        z2 = PURE().shadow_rays(t2, b8, ox, oy, dstx, dsty)
        assert z1 == z2
        assert np.array_equal(t1, t2)


def test_blur_equivalent():
    rng = np.random.default_rng(102)
    for _ in range(40):
        w, h = int(rng.integers(4, 80)), int(rng.integers(4, 80))
        tex = rng.integers(0, 256, (h, w), np.uint8)
        radius = int(rng.integers(0, 6))
        rw = int(rng.integers(1, w + 1))
        rh = int(rng.integers(1, h + 1))
        rx = int(rng.integers(0, w - rw + 1))
        ry = int(rng.integers(0, h - rh + 1))
        a = COMPILED().box_blur_region(tex, radius, rx, ry, rw, rh)
        b = PURE().box_blur_region(tex, radius, rx, ry, rw, rh)
        assert np.array_equal(a, b)


def test_shade_equivalent():
    rng = np.random.default_rng(103)
    for _ in range(30):
        w, h = int(rng.integers(2, 60)), int(rng.integers(2, 60))
        scene = rng.integers(0, 256, (h, w, 4), np.uint8)
        light = rng.integers(0, 256, (h, w), np.uint8)
        ambient = float(rng.integers(0, 101)) / 100.0
        dark = bool(rng.integers(0, 2))
        out1 = np.empty((h, w, 4), np.uint8)
        out2 = np.empty((h, w, 4), np.uint8)
        COMPILED().shade_frame(scene, light, ambient, dark, 0, h, out1)
        PURE().shade_frame(scene, light, ambient, dark, 0, h, out2)
        assert np.array_equal(out1, out2), (ambient, dark)


def test_cell_kernels_equivalent():
    rng = np.random.default_rng(104)
    for _ in range(40):
        w, h = int(rng.integers(8, 80)), int(rng.integers(8, 80))
        tex = rng.integers(0, 256, (h, w), np.uint8)
        n = int(rng.integers(1, 400))
        xs = rng.integers(-8, 40, n).astype(np.int32)
        ys = rng.integers(-8, 40, n).astype(np.int32)
        ox, oy = int(rng.integers(-10, w)), int(rng.integers(-10, h))
        cx, cy = int(rng.integers(0, w)), int(rng.integers(0, h))
        t1, t2 = tex.copy(), tex.copy()
        assert COMPILED().zero_cells(t1, xs, ys, ox, oy) == PURE().zero_cells(t2, xs, ys, ox, oy)
        assert np.array_equal(t1, t2)
        t1, t2 = tex.copy(), tex.copy()
        assert COMPILED().add_cells(t1, xs, ys, ox, oy, cx, cy) == PURE().add_cells(
            t2, xs, ys, ox, oy, cx, cy
        )
        assert np.array_equal(t1, t2)


def test_full_pipeline_frames_equivalent():
    def run(backend):
        _kernels.set_backend(backend)
        try:
            scene_map = generate_map("backend-twin", 5, 5)
            renderer = FrameRenderer(scene_map, viewport=(300, 220), margin=48)
            frames = []
            for f in range(5):
                lights = [
                    LightSource(90 + 7 * f, 110, 96, 96),
                    LightSource(220, 60 + 5 * f, 64, 80),
                ]
                frame, _ = renderer.render_frame(lights, f, camera_delta=(2, 1))
                frames.append(frame.pixels)
            return frames, renderer.light_texture().intensity
        finally:
            _kernels.set_backend("compiled")

    frames_c, tex_c = run("compiled")
    frames_p, tex_p = run("pure")
    assert np.array_equal(tex_c, tex_p)
    for a, b in zip(frames_c, frames_p):
        assert np.array_equal(a, b)
