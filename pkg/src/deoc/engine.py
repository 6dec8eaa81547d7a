"""Minimal reverse-mode autodiff over numpy arrays.

Just enough machinery for the networks and losses in this package: dense
graph of Tensor nodes, each op stores a backward closure. Heavy kernels
(conv patch gather/scatter, pooling, upsampling) go through deoc.backend.
"""
from __future__ import annotations

import numpy as np

from . import backend
from .errors import ShapeMismatch

_GRAD_ENABLED = True


class no_grad:
    """Context manager: skip graph construction inside the block."""

    def __enter__(self):
        global _GRAD_ENABLED
        self._prev = _GRAD_ENABLED
        _GRAD_ENABLED = False
        return self

    def __exit__(self, *exc):
        global _GRAD_ENABLED
        _GRAD_ENABLED = self._prev
        return False


def is_grad_enabled() -> bool:
    return _GRAD_ENABLED


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_backward", "_parents")

    def __init__(self, data, requires_grad: bool = False):
        self.data = data if isinstance(data, np.ndarray) else np.asarray(data)
        self.grad = None
        self.requires_grad = requires_grad
        self._backward = None
        self._parents = ()

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def backward(self):
        if self.data.size != 1:
            raise ShapeMismatch("backward() requires a scalar loss")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # operator sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return add(self, mul(other, -1.0))

    def __rsub__(self, other):
        return add(mul(self, -1.0), other)

    def __neg__(self):
        return mul(self, -1.0)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise TypeError("tensor/tensor division not supported")
        return mul(self, 1.0 / other)

    def sum(self):
        return tsum(self)

    def mean(self):
        return tmean(self)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) > 1 else shape[0])


def _as_tensor(x) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x))


def _accum(t: Tensor, g: np.ndarray):
    if t.requires_grad:
        if t.grad is None:
            t.grad = g if g.flags.writeable and g.base is None else g.copy()
        else:
            t.grad = t.grad + g


def _make(data: np.ndarray, parents: tuple[Tensor, ...], backward) -> Tensor:
    out = Tensor(data)
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


# elementwise ---------------------------------------------------------
def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    data = a.data + b.data

    def bw(g):
        _accum(a, _unbroadcast(g, a.data.shape))
        _accum(b, _unbroadcast(g, b.data.shape))

    return _make(data, (a, b), bw)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    data = a.data * b.data

    def bw(g):
        _accum(a, _unbroadcast(g * b.data, a.data.shape))
        _accum(b, _unbroadcast(g * a.data, b.data.shape))

    return _make(data, (a, b), bw)


def square(a: Tensor) -> Tensor:
    data = a.data * a.data

    def bw(g):
        _accum(a, g * (2.0 * a.data))

    return _make(data, (a,), bw)


def log(a: Tensor) -> Tensor:
    data = np.log(a.data)

    def bw(g):
        _accum(a, g / a.data)

    return _make(data, (a,), bw)


def exp(a: Tensor) -> Tensor:
    data = np.exp(a.data)

    def bw(g):
        _accum(a, g * data)

    return _make(data, (a,), bw)


def tanh(a: Tensor) -> Tensor:
    data = np.tanh(a.data)

    def bw(g):
        _accum(a, g * (1.0 - data * data))

    return _make(data, (a,), bw)


def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    data = np.empty_like(x)
    pos = x >= 0
    data[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    data[~pos] = ex / (1.0 + ex)

    def bw(g):
        _accum(a, g * (data * (1.0 - data)))

    return _make(data, (a,), bw)


def relu(a: Tensor) -> Tensor:
    data = np.maximum(a.data, 0)

    def bw(g):
        _accum(a, g * (a.data > 0))

    return _make(data, (a,), bw)


def leaky_relu(a: Tensor, alpha: float = 0.2) -> Tensor:
    data = np.where(a.data > 0, a.data, alpha * a.data)

    def bw(g):
        _accum(a, np.where(a.data > 0, g, alpha * g))

    return _make(data, (a,), bw)


def clip(a: Tensor, lo: float, hi: float) -> Tensor:
    data = np.clip(a.data, lo, hi)

    def bw(g):
        _accum(a, g * ((a.data > lo) & (a.data < hi)))

    return _make(data, (a,), bw)


# reductions / shape --------------------------------------------------
def tsum(a: Tensor) -> Tensor:
    data = np.asarray(a.data.sum())

    def bw(g):
        _accum(a, np.broadcast_to(g, a.data.shape))

    return _make(data, (a,), bw)


def tmean(a: Tensor) -> Tensor:
    n = a.data.size
    data = np.asarray(a.data.sum() / n)

    def bw(g):
        _accum(a, np.broadcast_to(g / n, a.data.shape))

    return _make(data, (a,), bw)


def mean_hw(a: Tensor) -> Tensor:
    """Global average pool: (B,C,H,W) -> (B,C)."""
    b, c, h, w = a.data.shape
    data = a.data.mean(axis=(2, 3))

    def bw(g):
        _accum(a, np.broadcast_to((g / (h * w))[:, :, None, None], a.data.shape))

    return _make(data, (a,), bw)


def reshape(a: Tensor, shape) -> Tensor:
    data = a.data.reshape(shape)

    def bw(g):
        _accum(a, g.reshape(a.data.shape))

    return _make(data, (a,), bw)


def concat(parts: list[Tensor], axis: int = 1) -> Tensor:
    datas = [p.data for p in parts]
    data = np.concatenate(datas, axis=axis)
    offsets = np.cumsum([0] + [d.shape[axis] for d in datas])

    def bw(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(lo, hi)
            _accum(p, g[tuple(sl)])

    return _make(data, tuple(parts), bw)


# linear algebra ------------------------------------------------------
def linear(x: Tensor, w: Tensor, b: Tensor | None) -> Tensor:
    """x (B,F) @ w(O,F).T + b."""
    data = x.data @ w.data.T
    if b is not None:
        data += b.data

    def bw(g):
        if x.requires_grad:
            _accum(x, g @ w.data)
        if w.requires_grad:
            _accum(w, g.T @ x.data)
        if b is not None and b.requires_grad:
            _accum(b, g.sum(axis=0))

    parents = (x, w) if b is None else (x, w, b)
    return _make(data, parents, bw)


def _same_pads(n: int, k: int, s: int) -> tuple[int, int, int]:
    """TF-style SAME padding: output ceil(n/s), extra pixel goes after."""
    out = -(-n // s)
    total = max((out - 1) * s + k - n, 0)
    return out, total // 2, total - total // 2


def conv2d(x: Tensor, w: Tensor, b: Tensor | None, stride: int = 1) -> Tensor:
    """Cross-correlation with SAME padding, NCHW layout."""
    bsz, c, h, wd = x.data.shape
    oc, ic, kh, kw = w.data.shape
    if ic != c:
        raise ShapeMismatch(f"conv2d: input has {c} channels, weight expects {ic}")
    oh, pt, pb = _same_pads(h, kh, stride)
    ow, pl, pr = _same_pads(wd, kw, stride)
    xp = np.pad(x.data, ((0, 0), (0, 0), (pt, pb), (pl, pr)))
    cols = backend.im2col(xp, kh, kw, stride, stride, oh, ow)
    cols2 = cols.reshape(bsz * oh * ow, c * kh * kw)
    w2 = w.data.reshape(oc, -1)
    y2 = cols2 @ w2.T
    if b is not None:
        y2 += b.data
    data = np.ascontiguousarray(y2.reshape(bsz, oh, ow, oc).transpose(0, 3, 1, 2))

    def bw(g):
        g2 = np.ascontiguousarray(g.transpose(0, 2, 3, 1)).reshape(bsz * oh * ow, oc)
        if w.requires_grad:
            _accum(w, (g2.T @ cols2).reshape(w.data.shape))
        if b is not None and b.requires_grad:
            _accum(b, g2.sum(axis=0))
        if x.requires_grad:
            dcols = (g2 @ w2).reshape(bsz, oh, ow, c, kh, kw)
            dxp = backend.col2im(dcols, h + pt + pb, wd + pl + pr, kh, kw,
                                 stride, stride)
            _accum(x, dxp[:, :, pt:pt + h, pl:pl + wd])

    parents = (x, w) if b is None else (x, w, b)
    return _make(data, parents, bw)


def maxpool2x2(x: Tensor) -> Tensor:
    if x.data.shape[2] % 2 or x.data.shape[3] % 2:
        raise ShapeMismatch("maxpool2x2 needs even spatial dims")
    data, arg = backend.maxpool2x2(x.data)

    def bw(g):
        _accum(x, backend.maxpool2x2_backward(np.ascontiguousarray(g), arg))

    return _make(data, (x,), bw)


def upsample2x(x: Tensor) -> Tensor:
    data = backend.upsample2x(x.data)

    def bw(g):
        _accum(x, backend.upsample2x_backward(np.ascontiguousarray(g)))

    return _make(data, (x,), bw)


def batchnorm2d_train(x: Tensor, gamma: Tensor, beta: Tensor, eps: float):
    """Batch statistics over (B,H,W). Returns (out, batch_mean, batch_var)."""
    xd = x.data
    n = xd.shape[0] * xd.shape[2] * xd.shape[3]
    mu = xd.mean(axis=(0, 2, 3), keepdims=True)
    xc = xd - mu
    var = (xc * xc).mean(axis=(0, 2, 3), keepdims=True)
    ivar = 1.0 / np.sqrt(var + eps)
    xhat = xc * ivar
    g4 = gamma.data[None, :, None, None]
    data = g4 * xhat + beta.data[None, :, None, None]

    def bw(g):
        if gamma.requires_grad:
            _accum(gamma, (g * xhat).sum(axis=(0, 2, 3)))
        if beta.requires_grad:
            _accum(beta, g.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            dxhat = g * g4
            t1 = dxhat.sum(axis=(0, 2, 3), keepdims=True)
            t2 = (dxhat * xhat).sum(axis=(0, 2, 3), keepdims=True)
            _accum(x, (ivar / n) * (n * dxhat - t1 - xhat * t2))

    out = _make(data, (x, gamma, beta), bw)
    return out, mu.reshape(-1), var.reshape(-1)


def batchnorm2d_eval(x: Tensor, gamma: Tensor, beta: Tensor,
                     running_mean: np.ndarray, running_var: np.ndarray,
                     eps: float) -> Tensor:
    ivar = 1.0 / np.sqrt(running_var + eps)
    scale = (gamma.data * ivar)[None, :, None, None]
    xhat = (x.data - running_mean[None, :, None, None]) * ivar[None, :, None, None]
    data = scale * x.data + (beta.data - gamma.data * running_mean * ivar)[None, :, None, None]

    def bw(g):
        if gamma.requires_grad:
            _accum(gamma, (g * xhat).sum(axis=(0, 2, 3)))
        if beta.requires_grad:
            _accum(beta, g.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            _accum(x, g * scale)

    return _make(data, (x, gamma, beta), bw)
