# cython: language_level=3
"""Compiled inner loops for Hough voting and bilinear sampling.

Both functions mirror ``coinrec._fallback`` exactly; the import-time switch
in ``coinrec.kernels`` picks whichever is available.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def hough_vote(const cnp.int64_t[::1] xs, const cnp.int64_t[::1] ys,
               const cnp.int64_t[::1] dx, const cnp.int64_t[::1] dy,
               const cnp.int64_t[::1] bounds, cnp.int32_t[:, :, ::1] counts):
    """Add one vote per (edge pixel, radius, distinct offset) into ``counts``.

    ``bounds[i]:bounds[i+1]`` slices the offsets that belong to radius index i.
    Offsets are already de-duplicated per radius.
    """
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t n_r = bounds.shape[0] - 1
    cdef Py_ssize_t h = counts.shape[0], w = counts.shape[1]
    cdef Py_ssize_t p, ri, k
    cdef cnp.int64_t x, y, u, v
    with nogil:
        for p in range(n):
            x = xs[p]
            y = ys[p]
            for ri in range(n_r):
                for k in range(bounds[ri], bounds[ri + 1]):
                    u = x - dx[k]
                    v = y - dy[k]
                    if 0 <= u < w and 0 <= v < h:
                        counts[v, u, ri] += 1


def bilinear_sample(const double[:, ::1] img, const double[::1] sx,
                    const double[::1] sy):
    """Bilinear samples at (sx, sy); neighbours outside the raster read as 0."""
    cdef Py_ssize_t n = sx.shape[0]
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef long x0, y0, x1, y1
    cdef double fx, fy, p00, p01, p10, p11, top, bot
    with nogil:
        for i in range(n):
            x0 = <long>floor(sx[i])
            y0 = <long>floor(sy[i])
            fx = sx[i] - x0
            fy = sy[i] - y0
            x1 = x0 + 1
            y1 = y0 + 1
            p00 = img[y0, x0] if (0 <= x0 < w and 0 <= y0 < h) else 0.0
            p01 = img[y0, x1] if (0 <= x1 < w and 0 <= y0 < h) else 0.0
            p10 = img[y1, x0] if (0 <= x0 < w and 0 <= y1 < h) else 0.0
            p11 = img[y1, x1] if (0 <= x1 < w and 0 <= y1 < h) else 0.0
            top = (1.0 - fx) * p00 + fx * p01
            bot = (1.0 - fx) * p10 + fx * p11
            o[i] = (1.0 - fy) * top + fy * bot
    return out
