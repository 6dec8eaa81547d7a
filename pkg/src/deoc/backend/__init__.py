"""Kernel backend selection.

The compiled Cython module is preferred when importable; otherwise the
pure-numpy fallback is used. Both expose the same functions with identical
numerics. Override with DEOC_BACKEND=python|compiled (requesting `compiled`
when the extension is missing raises at import).
"""
from __future__ import annotations

import os

from . import py_kernels

_requested = os.environ.get("DEOC_BACKEND", "auto").lower()

if _requested == "python":
    _impl = py_kernels
elif _requested in ("auto", "compiled"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "DEOC_BACKEND=compiled but deoc.backend._ckernels is not built; "
                "run `pip install -e .` with a C toolchain or unset DEOC_BACKEND"
            )
        _impl = py_kernels
else:
    raise ValueError(f"unknown DEOC_BACKEND {_requested!r}; use auto|python|compiled")

BACKEND = _impl.NAME

im2col = _impl.im2col
col2im = _impl.col2im
maxpool2x2 = _impl.maxpool2x2
maxpool2x2_backward = _impl.maxpool2x2_backward
upsample2x = _impl.upsample2x
upsample2x_backward = _impl.upsample2x_backward
minmax_filter = _impl.minmax_filter
blur1d = _impl.blur1d


def get_backend(name: str):
    """Return a specific kernel module (for parity tests and benchmarks)."""
    if name == "python":
        return py_kernels
    if name == "compiled":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
