"""NumPy implementations of the per-frame hot kernels.

Selected when the compiled extension is unavailable (or forced via
ISOLUME_BACKEND=pure). Every function here must stay bit-identical to
its counterpart in _core.pyx; the test suite compares the two on
randomized inputs.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "pure"


def _ray_coords(orgx: int, orgy: int, dstx: int, dsty: int):
    # Closed form of the adapted Bresenham walk: the dominant axis
    # advances every step, the other axis has advanced
    # (longest//2 + k*shortest) // longest times after k steps.
    w = dstx - orgx
    h = dsty - orgy
    sx = (w > 0) - (w < 0)
    sy = (h > 0) - (h < 0)
    aw, ah = abs(w), abs(h)
    x_dominant = aw > ah
    longest, shortest = (aw, ah) if x_dominant else (ah, aw)
    if longest == 0:
        return np.array([orgx], np.int64), np.array([orgy], np.int64)
    k = np.arange(longest + 1, dtype=np.int64)
    diag = (longest // 2 + k * shortest) // longest
    if x_dominant:
        return orgx + sx * k, orgy + sy * diag
    return orgx + sx * diag, orgy + sy * k


def _clip_walk(xs, ys, width: int, height: int) -> int:
    """Index of the first out-of-bounds pixel (the walk stops there)."""
    inside = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
    if inside.all():
        return xs.shape[0]
    return int(np.argmin(inside))


def trace_rays(tex, blocked, orgx, orgy, cx, cy, dstx, dsty):
    """Trace one light's rays from (orgx, orgy) toward each destination.

    Every visited unblocked pixel takes
    max(existing, 255 // (1 + chebyshev distance to (cx, cy))); each walk
    halts at the first blocked or out-of-bounds pixel. Returns the
    number of pixels written.
    """
    height, width = tex.shape
    writes = 0
    for i in range(len(dstx)):
        xs, ys = _ray_coords(orgx, orgy, int(dstx[i]), int(dsty[i]))
        stop = _clip_walk(xs, ys, width, height)
        if stop == 0:
            continue
        xs, ys = xs[:stop], ys[:stop]
        hit = blocked[ys, xs]
        first_hit = int(np.argmax(hit)) if hit.any() else stop
        if first_hit > 0:
            lx, ly = xs[:first_hit], ys[:first_hit]
            values = 255 // (1 + np.maximum(np.abs(lx - cx), np.abs(ly - cy)))
            tex[ly, lx] = np.maximum(tex[ly, lx], values.astype(np.uint8))
            writes += first_hit
    return writes


def shadow_rays(tex, blocked, orgx, orgy, dstx, dsty):
    """Re-walk each ray and zero every pixel from the first blocked one on.

    Pixels before the first obstacle are left unchanged. Returns the
    number of pixels zeroed.
    """
    height, width = tex.shape
    zeroed = 0
    for i in range(len(dstx)):
        xs, ys = _ray_coords(orgx, orgy, int(dstx[i]), int(dsty[i]))
        stop = _clip_walk(xs, ys, width, height)
        if stop == 0:
            continue
        xs, ys = xs[:stop], ys[:stop]
        hit = blocked[ys, xs]
        if not hit.any():
            continue
        first_hit = int(np.argmax(hit))
        tex[ys[first_hit:], xs[first_hit:]] = 0
        zeroed += stop - first_hit
    return zeroed


def box_blur_region(tex, radius, rx, ry, rw, rh):
    """Blurred window of `tex`: rounded (2r+1)^2 means, clamp-to-edge."""
    height, width = tex.shape
    if (
        ry - radius >= 0
        and rx - radius >= 0
        and ry + rh + radius <= height
        and rx + rw + radius <= width
    ):
        # window plus halo fits: plain slice, no clamped gather needed
        sub = tex[ry - radius : ry + rh + radius, rx - radius : rx + rw + radius]
        sub = sub.astype(np.int64)
    else:
        rows = np.clip(np.arange(ry - radius, ry + rh + radius), 0, height - 1)
        cols = np.clip(np.arange(rx - radius, rx + rw + radius), 0, width - 1)
        sub = tex[np.ix_(rows, cols)].astype(np.int64)
    win = 2 * radius + 1
    hsum = _window_sum(sub, win, axis=1)
    total = _window_sum(hsum, win, axis=0)
    area = win * win
    return ((2 * total + area) // (2 * area)).astype(np.uint8)


def _window_sum(arr, win, axis):
    acc = np.cumsum(arr, axis=axis)
    if axis == 1:
        out = np.empty((arr.shape[0], arr.shape[1] - win + 1), acc.dtype)
        out[:, 0] = acc[:, win - 1]
        np.subtract(acc[:, win:], acc[:, :-win], out=out[:, 1:])
    else:
        out = np.empty((arr.shape[0] - win + 1, arr.shape[1]), acc.dtype)
        out[0] = acc[win - 1]
        np.subtract(acc[win:], acc[:-win], out=out[1:])
    return out


def shade_frame(scene, light, ambient, dark_outside, row0, row1, out):
    """Blend scene colors with light values for rows [row0, row1).

    Per fragment: luminance = 0.349 r + 0.114 g + 0.537 b,
    light_factor = luminance * light / (ambient^2 + 0.1),
    tex_factor = color * sqrt(ambient) (times light when dark_outside),
    result = clamp(tex_factor + light_factor, 0, 1) quantized half-up.
    """
    sc = scene[row0:row1].astype(np.float64) / 255.0
    lv = light[row0:row1].astype(np.float64) / 255.0
    lum = sc[..., 0] * 0.349 + sc[..., 1] * 0.114 + sc[..., 2] * 0.537
    denom = ambient * ambient + 0.1
    lf = lum * lv / denom
    sa = math.sqrt(ambient)
    rgb = sc[..., :3] * sa
    if dark_outside:
        rgb = rgb * lv[..., None]
    v = rgb + lf[..., None]
    np.clip(v, 0.0, 1.0, out=v)
    out[row0:row1, :, :3] = np.floor(v * 255.0 + 0.5).astype(np.uint8)
    out[row0:row1, :, 3] = scene[row0:row1, :, 3]


def zero_cells(tex, xs, ys, ox, oy):
    """Force the given sprite-local cells (translated by ox, oy) to 0."""
    height, width = tex.shape
    gx = xs.astype(np.int64) + ox
    gy = ys.astype(np.int64) + oy
    keep = (gx >= 0) & (gx < width) & (gy >= 0) & (gy < height)
    gx, gy = gx[keep], gy[keep]
    tex[gy, gx] = 0
    return int(gx.size)


def add_cells(tex, xs, ys, ox, oy, cx, cy):
    """Max-combine falloff intensity from (cx, cy) into the given cells."""
    height, width = tex.shape
    gx = xs.astype(np.int64) + ox
    gy = ys.astype(np.int64) + oy
    keep = (gx >= 0) & (gx < width) & (gy >= 0) & (gy < height)
    gx, gy = gx[keep], gy[keep]
    values = 255 // (1 + np.maximum(np.abs(gx - cx), np.abs(gy - cy)))
    tex[gy, gx] = np.maximum(tex[gy, gx], values.astype(np.uint8))
    return int(gx.size)
