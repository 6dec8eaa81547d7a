# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels. Semantics and floating-point accumulation order
mirror backend/py_kernels.py exactly; the two are interchangeable."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "compiled"

ctypedef fused real:
    float
    double


def im2col(real[:, :, :, ::1] xp, int kh, int kw, int sy, int sx,
           int oh, int ow):
    cdef Py_ssize_t b = xp.shape[0], c = xp.shape[1]
    dtype = np.float32 if real is float else np.float64
    cols_arr = np.empty((b, oh, ow, c, kh, kw), dtype=dtype)
    cdef real[:, :, :, :, :, ::1] cols = cols_arr
    cdef Py_ssize_t ib, ic, oy, ox, ky, kx
    with nogil:
        for ib in range(b):
            for oy in range(oh):
                for ox in range(ow):
                    for ic in range(c):
                        for ky in range(kh):
                            for kx in range(kw):
                                cols[ib, oy, ox, ic, ky, kx] = \
                                    xp[ib, ic, oy * sy + ky, ox * sx + kx]
    return cols_arr


def col2im(real[:, :, :, :, :, ::1] dcols, int hp, int wp, int kh, int kw,
           int sy, int sx):
    cdef Py_ssize_t b = dcols.shape[0], oh = dcols.shape[1]
    cdef Py_ssize_t ow = dcols.shape[2], c = dcols.shape[3]
    dtype = np.float32 if real is float else np.float64
    dxp_arr = np.zeros((b, c, hp, wp), dtype=dtype)
    cdef real[:, :, :, ::1] dxp = dxp_arr
    cdef Py_ssize_t ib, ic, oy, ox, ky, kx
    with nogil:
        for ib in range(b):
            # (ky,kx) outermost per element: same add order as the numpy version
            for ky in range(kh):
                for kx in range(kw):
                    for ic in range(c):
                        for oy in range(oh):
                            for ox in range(ow):
                                dxp[ib, ic, oy * sy + ky, ox * sx + kx] += \
                                    dcols[ib, oy, ox, ic, ky, kx]
    return dxp_arr


def maxpool2x2(real[:, :, :, ::1] x):
    cdef Py_ssize_t b = x.shape[0], c = x.shape[1]
    cdef Py_ssize_t oh = x.shape[2] // 2, ow = x.shape[3] // 2
    dtype = np.float32 if real is float else np.float64
    y_arr = np.empty((b, c, oh, ow), dtype=dtype)
    arg_arr = np.empty((b, c, oh, ow), dtype=np.uint8)
    cdef real[:, :, :, ::1] y = y_arr
    cdef unsigned char[:, :, :, ::1] arg = arg_arr
    cdef Py_ssize_t ib, ic, oy, ox, dy, dx
    cdef real best, v
    cdef unsigned char ai
    with nogil:
        for ib in range(b):
            for ic in range(c):
                for oy in range(oh):
                    for ox in range(ow):
                        best = x[ib, ic, 2 * oy, 2 * ox]
                        ai = 0
                        for dy in range(2):
                            for dx in range(2):
                                v = x[ib, ic, 2 * oy + dy, 2 * ox + dx]
                                if v > best:
                                    best = v
                                    ai = <unsigned char> (2 * dy + dx)
                        y[ib, ic, oy, ox] = best
                        arg[ib, ic, oy, ox] = ai
    return y_arr, arg_arr


def maxpool2x2_backward(real[:, :, :, ::1] dy, unsigned char[:, :, :, ::1] arg):
    cdef Py_ssize_t b = dy.shape[0], c = dy.shape[1]
    cdef Py_ssize_t oh = dy.shape[2], ow = dy.shape[3]
    dtype = np.float32 if real is float else np.float64
    dx_arr = np.zeros((b, c, oh * 2, ow * 2), dtype=dtype)
    cdef real[:, :, :, ::1] dx = dx_arr
    cdef Py_ssize_t ib, ic, oy, ox
    cdef unsigned char ai
    with nogil:
        for ib in range(b):
            for ic in range(c):
                for oy in range(oh):
                    for ox in range(ow):
                        ai = arg[ib, ic, oy, ox]
                        dx[ib, ic, 2 * oy + (ai >> 1), 2 * ox + (ai & 1)] = \
                            dy[ib, ic, oy, ox]
    return dx_arr


def upsample2x(real[:, :, :, ::1] x):
    cdef Py_ssize_t b = x.shape[0], c = x.shape[1]
    cdef Py_ssize_t h = x.shape[2], w = x.shape[3]
    dtype = np.float32 if real is float else np.float64
    y_arr = np.empty((b, c, h * 2, w * 2), dtype=dtype)
    cdef real[:, :, :, ::1] y = y_arr
    cdef Py_ssize_t ib, ic, iy, ix
    cdef real v
    with nogil:
        for ib in range(b):
            for ic in range(c):
                for iy in range(h):
                    for ix in range(w):
                        v = x[ib, ic, iy, ix]
                        y[ib, ic, 2 * iy, 2 * ix] = v
                        y[ib, ic, 2 * iy, 2 * ix + 1] = v
                        y[ib, ic, 2 * iy + 1, 2 * ix] = v
                        y[ib, ic, 2 * iy + 1, 2 * ix + 1] = v
    return y_arr


def upsample2x_backward(real[:, :, :, ::1] dy):
    cdef Py_ssize_t b = dy.shape[0], c = dy.shape[1]
    cdef Py_ssize_t h = dy.shape[2] // 2, w = dy.shape[3] // 2
    dtype = np.float32 if real is float else np.float64
    dx_arr = np.empty((b, c, h, w), dtype=dtype)
    cdef real[:, :, :, ::1] dx = dx_arr
    cdef Py_ssize_t ib, ic, iy, ix
    with nogil:
        for ib in range(b):
            for ic in range(c):
                for iy in range(h):
                    for ix in range(w):
                        # same (0,0),(0,1),(1,0),(1,1) order as the numpy version
                        dx[ib, ic, iy, ix] = (
                            (dy[ib, ic, 2 * iy, 2 * ix]
                             + dy[ib, ic, 2 * iy, 2 * ix + 1])
                            + dy[ib, ic, 2 * iy + 1, 2 * ix]
                        ) + dy[ib, ic, 2 * iy + 1, 2 * ix + 1]
    return dx_arr


def minmax_filter(unsigned char[:, ::1] mask, int radius, bint maximum):
    cdef Py_ssize_t h = mask.shape[0], w = mask.shape[1]
    if radius == 0:
        return np.asarray(mask).copy()
    rows_arr = np.empty((h, w), dtype=np.uint8)
    out_arr = np.empty((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] rows = rows_arr
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t iy, ix, t
    cdef unsigned char acc, v
    with nogil:
        for iy in range(h):
            for ix in range(w):
                acc = 0 if maximum else 1
                for t in range(-radius, radius + 1):
                    if 0 <= iy + t < h:
                        v = mask[iy + t, ix]
                    else:
                        v = 0
                    if maximum:
                        if v > acc:
                            acc = v
                    else:
                        if v < acc:
                            acc = v
                rows[iy, ix] = acc
        for iy in range(h):
            for ix in range(w):
                acc = 0 if maximum else 1
                for t in range(-radius, radius + 1):
                    if 0 <= ix + t < w:
                        v = rows[iy, ix + t]
                    else:
                        v = 0
                    if maximum:
                        if v > acc:
                            acc = v
                    else:
                        if v < acc:
                            acc = v
                out[iy, ix] = acc
    return out_arr


def blur1d(double[:, :, ::1] x, double[::1] kernel, int axis):
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    cdef Py_ssize_t n = h if axis == 0 else w
    cdef int radius = <int> ((kernel.shape[0] - 1) // 2)
    idx_arr = _reflect101(n, radius)
    cdef Py_ssize_t[::1] idx = idx_arr
    out_arr = np.empty((c, h, w), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t ic, iy, ix, t
    cdef Py_ssize_t k = kernel.shape[0]
    cdef double acc
    with nogil:
        if axis == 0:
            for ic in range(c):
                for iy in range(h):
                    for ix in range(w):
                        acc = kernel[0] * x[ic, idx[iy], ix]
                        for t in range(1, k):
                            acc += kernel[t] * x[ic, idx[iy + t], ix]
                        out[ic, iy, ix] = acc
        else:
            for ic in range(c):
                for iy in range(h):
                    for ix in range(w):
                        acc = kernel[0] * x[ic, iy, idx[ix]]
                        for t in range(1, k):
                            acc += kernel[t] * x[ic, iy, idx[ix + t]]
                        out[ic, iy, ix] = acc
    return out_arr


def _reflect101(Py_ssize_t n, int radius):
    if n == 1:
        return np.zeros(n + 2 * radius, dtype=np.intp)
    i = np.arange(-radius, n + radius, dtype=np.intp)
    period = 2 * (n - 1)
    i = np.abs(i) % period
    return np.ascontiguousarray(np.where(i >= n, period - i, i))
