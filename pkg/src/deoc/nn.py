"""Layers and parameter containers on top of the autodiff engine."""
from __future__ import annotations

import numpy as np

from . import engine
from .engine import Tensor
from .errors import ShapeMismatch


class Parameter(Tensor):
    def __init__(self, data):
        super().__init__(np.asarray(data), requires_grad=True)


class Module:
    def __init__(self):
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_buffers", {})
        object.__setattr__(self, "_modules", {})
        object.__setattr__(self, "training", True)

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._params[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def register_buffer(self, name, value: np.ndarray):
        self._buffers[name] = value
        object.__setattr__(self, name, value)

    def _set_buffer(self, name, value: np.ndarray):
        self._buffers[name] = value
        object.__setattr__(self, name, value)

    def named_parameters(self, prefix: str = ""):
        for name, p in self._params.items():
            yield prefix + name, p
        for mname, m in self._modules.items():
            yield from m.named_parameters(prefix + mname + ".")

    def parameters(self):
        for _, p in self.named_parameters():
            yield p

    def named_buffers(self, prefix: str = ""):
        for name in self._buffers:
            yield prefix + name, getattr(self, name)
        for mname, m in self._modules.items():
            yield from m.named_buffers(prefix + mname + ".")

    def modules(self):
        yield self
        for m in self._modules.values():
            yield from m.modules()

    def train(self, mode: bool = True):
        for m in self.modules():
            object.__setattr__(m, "training", mode)
        return self

    def eval(self):
        return self.train(False)

    def requires_grad_(self, flag: bool):
        for p in self.parameters():
            p.requires_grad = flag
        return self

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None

    def state_dict(self) -> dict[str, np.ndarray]:
        state = {name: p.data for name, p in self.named_parameters()}
        state.update({name: buf for name, buf in self.named_buffers()})
        return state

    def load_state_dict(self, state: dict[str, np.ndarray]):
        own_params = dict(self.named_parameters())
        own_bufs = {name: None for name, _ in self.named_buffers()}
        missing = (set(own_params) | set(own_bufs)) - set(state)
        extra = set(state) - (set(own_params) | set(own_bufs))
        if missing or extra:
            raise KeyError(f"state mismatch: missing={sorted(missing)} extra={sorted(extra)}")
        for name, p in own_params.items():
            arr = np.asarray(state[name], dtype=p.data.dtype)
            if arr.shape != p.data.shape:
                raise ShapeMismatch(f"{name}: {arr.shape} vs {p.data.shape}")
            p.data = arr.copy()
        for name in own_bufs:
            self._assign_buffer_by_path(name, np.asarray(state[name]).copy())

    def _assign_buffer_by_path(self, path: str, value: np.ndarray):
        parts = path.split(".")
        mod = self
        for part in parts[:-1]:
            mod = mod._modules[part]
        cur = getattr(mod, parts[-1])
        mod._set_buffer(parts[-1], value.astype(cur.dtype, copy=False))

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)


class Sequential(Module):
    def __init__(self, *layers: Module):
        super().__init__()
        for i, layer in enumerate(layers):
            setattr(self, f"l{i}", layer)
        self.layers = list(layers)

    def __setattr__(self, name, value):
        if name == "layers":
            object.__setattr__(self, name, value)
        else:
            super().__setattr__(name, value)

    def forward(self, x):
        for layer in self.layers:
            x = layer(x)
        return x


class Conv2d(Module):
    """3x3/5x5/1x1 cross-correlation, SAME padding."""

    def __init__(self, in_ch: int, out_ch: int, kernel: int, stride: int = 1,
                 bias: bool = True, dtype=np.float32):
        super().__init__()
        self.in_ch, self.out_ch, self.kernel, self.stride = in_ch, out_ch, kernel, stride
        self.weight = Parameter(np.zeros((out_ch, in_ch, kernel, kernel), dtype=dtype))
        self.bias = Parameter(np.zeros(out_ch, dtype=dtype)) if bias else None

    def forward(self, x):
        return engine.conv2d(x, self.weight, self.bias, stride=self.stride)


class Linear(Module):
    def __init__(self, in_f: int, out_f: int, dtype=np.float32):
        super().__init__()
        self.in_f, self.out_f = in_f, out_f
        self.weight = Parameter(np.zeros((out_f, in_f), dtype=dtype))
        self.bias = Parameter(np.zeros(out_f, dtype=dtype))

    def forward(self, x):
        return engine.linear(x, self.weight, self.bias)


class BatchNorm2d(Module):
    def __init__(self, ch: int, eps: float = 1e-5, momentum: float = 0.1,
                 dtype=np.float32):
        super().__init__()
        self.ch, self.eps, self.momentum = ch, eps, momentum
        self.weight = Parameter(np.ones(ch, dtype=dtype))
        self.bias = Parameter(np.zeros(ch, dtype=dtype))
        self.register_buffer("running_mean", np.zeros(ch, dtype=dtype))
        self.register_buffer("running_var", np.ones(ch, dtype=dtype))

    def forward(self, x):
        if self.training:
            out, mu, var = engine.batchnorm2d_train(x, self.weight, self.bias, self.eps)
            m = self.momentum
            self._set_buffer("running_mean", (1 - m) * self.running_mean + m * mu)
            self._set_buffer("running_var", (1 - m) * self.running_var + m * var)
            return out
        return engine.batchnorm2d_eval(x, self.weight, self.bias,
                                       self.running_mean, self.running_var, self.eps)


class ReLU(Module):
    def forward(self, x):
        return engine.relu(x)


class LeakyReLU(Module):
    def __init__(self, alpha: float = 0.2):
        super().__init__()
        self.alpha = alpha

    def forward(self, x):
        return engine.leaky_relu(x, self.alpha)


class Tanh(Module):
    def forward(self, x):
        return engine.tanh(x)


class Sigmoid(Module):
    def forward(self, x):
        return engine.sigmoid(x)


class MaxPool2x2(Module):
    def forward(self, x):
        return engine.maxpool2x2(x)


class UpsampleNearest2x(Module):
    def forward(self, x):
        return engine.upsample2x(x)


def init_dcgan(module: Module, rng: np.random.Generator, std: float = 0.02):
    """Conv/linear weights ~ N(0,std), biases 0, batch-norm affine (1,0).

    Iterates named_parameters in registration order so a given seed always
    produces the same parameters.
    """
    for mod in module.modules():
        if isinstance(mod, (Conv2d, Linear)):
            w = mod.weight.data
            mod.weight.data = rng.normal(0.0, std, size=w.shape).astype(w.dtype)
            if mod.bias is not None:
                mod.bias.data = np.zeros_like(mod.bias.data)
        elif isinstance(mod, BatchNorm2d):
            mod.weight.data = np.ones_like(mod.weight.data)
            mod.bias.data = np.zeros_like(mod.bias.data)


def init_he(module: Module, rng: np.random.Generator):
    """He-normal conv/linear init: keeps activation scale through deep
    frozen stacks, where a flat 0.02 std would collapse them."""
    for mod in module.modules():
        if isinstance(mod, (Conv2d, Linear)):
            w = mod.weight.data
            fan_in = int(np.prod(w.shape[1:]))
            mod.weight.data = rng.normal(0.0, np.sqrt(2.0 / fan_in),
                                         size=w.shape).astype(w.dtype)
            if mod.bias is not None:
                mod.bias.data = np.zeros_like(mod.bias.data)
