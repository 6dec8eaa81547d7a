"""Pure-numpy implementations of the hot kernels.

The compiled module in _ckernels.pyx mirrors these exactly, including the
accumulation order of every floating-point reduction, so both backends
produce bit-identical results and can be swapped freely.
"""
from __future__ import annotations

import numpy as np

NAME = "python"


def im2col(xp: np.ndarray, kh: int, kw: int, sy: int, sx: int,
           oh: int, ow: int) -> np.ndarray:
    """Gather conv patches from a padded (B,C,Hp,Wp) array.

    Returns (B, OH, OW, C, KH, KW); reshaping to (B*OH*OW, C*KH*KW) gives
    the GEMM operand.
    """
    b, c = xp.shape[0], xp.shape[1]
    cols = np.empty((b, oh, ow, c, kh, kw), dtype=xp.dtype)
    for ky in range(kh):
        for kx in range(kw):
            cols[:, :, :, :, ky, kx] = \
                xp[:, :, ky:ky + oh * sy:sy, kx:kx + ow * sx:sx].transpose(0, 2, 3, 1)
    return cols


def col2im(dcols: np.ndarray, hp: int, wp: int, kh: int, kw: int,
           sy: int, sx: int) -> np.ndarray:
    """Scatter-add patch gradients back onto the padded input grid."""
    b, oh, ow, c = dcols.shape[:4]
    dxp = np.zeros((b, c, hp, wp), dtype=dcols.dtype)
    for ky in range(kh):
        for kx in range(kw):
            dxp[:, :, ky:ky + oh * sy:sy, kx:kx + ow * sx:sx] += \
                dcols[:, :, :, :, ky, kx].transpose(0, 3, 1, 2)
    return dxp


def maxpool2x2(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2/stride-2 max pool. Returns (pooled, argmax) with argmax in 0..3
    encoding the window offset (dy*2+dx), first maximum in scan order."""
    b, c, h, w = x.shape
    win = x.reshape(b, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    win = np.ascontiguousarray(win).reshape(b, c, h // 2, w // 2, 4)
    arg = win.argmax(axis=-1).astype(np.uint8)
    y = np.take_along_axis(win, arg[..., None].astype(np.intp), axis=-1)[..., 0]
    return y, arg


def maxpool2x2_backward(dy: np.ndarray, arg: np.ndarray) -> np.ndarray:
    b, c, oh, ow = dy.shape
    dwin = np.zeros((b, c, oh, ow, 4), dtype=dy.dtype)
    np.put_along_axis(dwin, arg[..., None].astype(np.intp), dy[..., None], axis=-1)
    dx = dwin.reshape(b, c, oh, ow, 2, 2).transpose(0, 1, 2, 4, 3, 5)
    return np.ascontiguousarray(dx).reshape(b, c, oh * 2, ow * 2)


def upsample2x(x: np.ndarray) -> np.ndarray:
    """Nearest-neighbour 2x upsample."""
    b, c, h, w = x.shape
    y = np.empty((b, c, h * 2, w * 2), dtype=x.dtype)
    y.reshape(b, c, h, 2, w, 2)[:] = x[:, :, :, None, :, None]
    return y


def upsample2x_backward(dy: np.ndarray) -> np.ndarray:
    b, c, h2, w2 = dy.shape
    d = dy.reshape(b, c, h2 // 2, 2, w2 // 2, 2)
    # fixed (0,0),(0,1),(1,0),(1,1) addition order, mirrored by the compiled kernel
    return ((d[:, :, :, 0, :, 0] + d[:, :, :, 0, :, 1])
            + d[:, :, :, 1, :, 0]) + d[:, :, :, 1, :, 1]


def minmax_filter(mask: np.ndarray, radius: int, maximum: bool) -> np.ndarray:
    """Square-window max (dilate) or min (erode) of a {0,1} uint8 mask.

    Pixels outside the image count as 0, so erosion eats the border.
    """
    if radius == 0:
        return mask.copy()
    h, w = mask.shape
    k = 2 * radius + 1
    reduce_fn = np.maximum if maximum else np.minimum

    pad = np.zeros((h + 2 * radius, w), dtype=mask.dtype)
    pad[radius:radius + h] = mask
    rows = pad[0:h].copy()
    for t in range(1, k):
        rows = reduce_fn(rows, pad[t:t + h])

    pad2 = np.zeros((h, w + 2 * radius), dtype=mask.dtype)
    pad2[:, radius:radius + w] = rows
    out = pad2[:, 0:w].copy()
    for t in range(1, k):
        out = reduce_fn(out, pad2[:, t:t + w])
    return out


def blur1d(x: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """Correlate one spatial axis of a (C,H,W) float64 image with `kernel`,
    mirror (reflect-101) border handling; accumulation in tap order."""
    c, h, w = x.shape
    n = h if axis == 0 else w
    radius = (len(kernel) - 1) // 2
    idx = reflect101_indices(n, radius)
    if axis == 0:
        ext = x[:, idx, :]
        out = kernel[0] * ext[:, 0:n, :]
        for t in range(1, len(kernel)):
            out += kernel[t] * ext[:, t:t + n, :]
    else:
        ext = x[:, :, idx]
        out = kernel[0] * ext[:, :, 0:n]
        for t in range(1, len(kernel)):
            out += kernel[t] * ext[:, :, t:t + n]
    return out


def reflect101_indices(n: int, radius: int) -> np.ndarray:
    """Index map of length n+2*radius implementing mirror-without-edge-repeat
    (… 2 1 | 0 1 2 … n-1 | n-2 n-3 …), extended periodically for any radius."""
    if n == 1:
        return np.zeros(n + 2 * radius, dtype=np.intp)
    i = np.arange(-radius, n + radius, dtype=np.intp)
    period = 2 * (n - 1)
    i = np.abs(i) % period
    return np.where(i >= n, period - i, i)
