# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-frame hot kernels: ray tracing, blur, shading, correction.

Semantics must stay bit-identical to the NumPy fallback in pure.py.
"""

from libc.math cimport sqrt

import numpy as np

BACKEND_NAME = "compiled"


cdef inline long _iabs(long v) nogil:
    return -v if v < 0 else v


cdef inline long _imax(long a, long b) nogil:
    return a if a > b else b


cdef inline long _clampi(long v, long lo, long hi) nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


cdef long _trace_one(unsigned char[:, ::1] tex, const unsigned char[:, ::1] blocked,
                     long orgx, long orgy, long dstx, long dsty,
                     long cx, long cy) nogil:
    cdef long height = tex.shape[0], width = tex.shape[1]
    cdef long w = dstx - orgx, h = dsty - orgy
    cdef long dx1 = 0, dy1 = 0, dx2 = 0, dy2 = 0
    if w < 0:
        dx1 = -1
    elif w > 0:
        dx1 = 1
    if h < 0:
        dy1 = -1
    elif h > 0:
        dy1 = 1
    dx2 = dx1
    cdef long longest = _iabs(w), shortest = _iabs(h)
    if not longest > shortest:
        longest = _iabs(h)
        shortest = _iabs(w)
        dx2 = 0
        dy2 = dy1
    cdef long numerator = longest >> 1
    cdef long x = orgx, y = orgy
    cdef long i, value, writes = 0
    for i in range(longest + 1):
        if x < 0 or x >= width or y < 0 or y >= height:
            break
        if blocked[y, x]:
            break
        value = 255 // (1 + _imax(_iabs(x - cx), _iabs(y - cy)))
        if value > <long>tex[y, x]:
            tex[y, x] = <unsigned char>value
        writes += 1
        numerator += shortest
        if numerator >= longest:
            numerator -= longest
            x += dx1
            y += dy1
        else:
            x += dx2
            y += dy2
    return writes


cdef long _shadow_one(unsigned char[:, ::1] tex, const unsigned char[:, ::1] blocked,
                      long orgx, long orgy, long dstx, long dsty) nogil:
    cdef long height = tex.shape[0], width = tex.shape[1]
    cdef long w = dstx - orgx, h = dsty - orgy
    cdef long dx1 = 0, dy1 = 0, dx2 = 0, dy2 = 0
    if w < 0:
        dx1 = -1
    elif w > 0:
        dx1 = 1
    if h < 0:
        dy1 = -1
    elif h > 0:
        dy1 = 1
    dx2 = dx1
    cdef long longest = _iabs(w), shortest = _iabs(h)
    if not longest > shortest:
        longest = _iabs(h)
        shortest = _iabs(w)
        dx2 = 0
        dy2 = dy1
    cdef long numerator = longest >> 1
    cdef long x = orgx, y = orgy
    cdef long i, zeroed = 0
    cdef bint in_shadow = False
    for i in range(longest + 1):
        if x < 0 or x >= width or y < 0 or y >= height:
            break
        if not in_shadow and blocked[y, x]:
            in_shadow = True
        if in_shadow:
            tex[y, x] = 0
            zeroed += 1
        numerator += shortest
        if numerator >= longest:
            numerator -= longest
            x += dx1
            y += dy1
        else:
            x += dx2
            y += dy2
    return zeroed


def trace_rays(unsigned char[:, ::1] tex, const unsigned char[:, ::1] blocked,
               long orgx, long orgy, long cx, long cy,
               const int[::1] dstx, const int[::1] dsty):
    """Trace one light's rays; see pure.trace_rays for the contract."""
    cdef long n = dstx.shape[0]
    cdef long i, writes = 0
    with nogil:
        for i in range(n):
            writes += _trace_one(tex, blocked, orgx, orgy, dstx[i], dsty[i], cx, cy)
    return writes


def shadow_rays(unsigned char[:, ::1] tex, const unsigned char[:, ::1] blocked,
                long orgx, long orgy,
                const int[::1] dstx, const int[::1] dsty):
    """Zero each ray's pixels from its first obstacle onward."""
    cdef long n = dstx.shape[0]
    cdef long i, zeroed = 0
    with nogil:
        for i in range(n):
            zeroed += _shadow_one(tex, blocked, orgx, orgy, dstx[i], dsty[i])
    return zeroed


def box_blur_region(const unsigned char[:, ::1] tex, long radius,
                    long rx, long ry, long rw, long rh):
    """Blurred window of `tex`: rounded (2r+1)^2 means, clamp-to-edge."""
    cdef long height = tex.shape[0], width = tex.shape[1]
    cdef long win = 2 * radius + 1
    cdef long area = win * win
    out_arr = np.empty((rh, rw), np.uint8)
    hbuf_arr = np.empty((rh + 2 * radius, rw), np.int64)
    vsum_arr = np.zeros(rw, np.int64)
    cdef unsigned char[:, ::1] out = out_arr
    cdef long long[:, ::1] hbuf = hbuf_arr
    cdef long long[::1] vsum = vsum_arr
    cdef long t, row, x, u, i
    cdef long long s
    with nogil:
        for t in range(rh + 2 * radius):
            row = _clampi(ry - radius + t, 0, height - 1)
            s = 0
            for u in range(rx - radius, rx + radius + 1):
                s += tex[row, _clampi(u, 0, width - 1)]
            hbuf[t, 0] = s
            for x in range(1, rw):
                s += tex[row, _clampi(rx + x + radius, 0, width - 1)]
                s -= tex[row, _clampi(rx + x - radius - 1, 0, width - 1)]
                hbuf[t, x] = s
        for x in range(rw):
            s = 0
            for t in range(win):
                s += hbuf[t, x]
            vsum[x] = s
            out[0, x] = <unsigned char>((2 * s + area) // (2 * area))
        for i in range(1, rh):
            for x in range(rw):
                vsum[x] += hbuf[i + win - 1, x] - hbuf[i - 1, x]
                out[i, x] = <unsigned char>((2 * vsum[x] + area) // (2 * area))
    return out_arr


def shade_frame(const unsigned char[:, :, ::1] scene, const unsigned char[:, ::1] light,
                double ambient, bint dark_outside, long row0, long row1,
                unsigned char[:, :, ::1] out):
    """Blend scene colors with light values; see pure.shade_frame."""
    cdef long width = scene.shape[1]
    cdef double denom = ambient * ambient + 0.1
    cdef double sa = sqrt(ambient)
    # unit[v] == v / 255.0 bit-for-bit; the table just hoists the division
    cdef double unit[256]
    cdef long i
    for i in range(256):
        unit[i] = i / 255.0
    cdef long x, y, c
    cdef double lv, lum, lf, v
    cdef double rgb[3]
    with nogil:
        for y in range(row0, row1):
            for x in range(width):
                lv = unit[light[y, x]]
                rgb[0] = unit[scene[y, x, 0]]
                rgb[1] = unit[scene[y, x, 1]]
                rgb[2] = unit[scene[y, x, 2]]
                lum = rgb[0] * 0.349 + rgb[1] * 0.114 + rgb[2] * 0.537
                lf = lum * lv / denom
                for c in range(3):
                    v = rgb[c] * sa
                    if dark_outside:
                        v = v * lv
                    v = v + lf
                    if v < 0.0:
                        v = 0.0
                    elif v > 1.0:
                        v = 1.0
                    # v is in [0, 1], so truncation equals floor here
                    out[y, x, c] = <unsigned char><long>(v * 255.0 + 0.5)
                out[y, x, 3] = scene[y, x, 3]


def zero_cells(unsigned char[:, ::1] tex, const int[::1] xs, const int[::1] ys,
               long ox, long oy):
    """Force the given sprite-local cells (translated by ox, oy) to 0."""
    cdef long height = tex.shape[0], width = tex.shape[1]
    cdef long n = xs.shape[0]
    cdef long i, gx, gy, touched = 0
    with nogil:
        for i in range(n):
            gx = xs[i] + ox
            gy = ys[i] + oy
            if 0 <= gx < width and 0 <= gy < height:
                tex[gy, gx] = 0
                touched += 1
    return touched


def add_cells(unsigned char[:, ::1] tex, const int[::1] xs, const int[::1] ys,
              long ox, long oy, long cx, long cy):
    """Max-combine falloff intensity from (cx, cy) into the given cells."""
    cdef long height = tex.shape[0], width = tex.shape[1]
    cdef long n = xs.shape[0]
    cdef long i, gx, gy, value, touched = 0
    with nogil:
        for i in range(n):
            gx = xs[i] + ox
            gy = ys[i] + oy
            if 0 <= gx < width and 0 <= gy < height:
                value = 255 // (1 + _imax(_iabs(gx - cx), _iabs(gy - cy)))
                if value > <long>tex[gy, gx]:
                    tex[gy, gx] = <unsigned char>value
                touched += 1
    return touched
