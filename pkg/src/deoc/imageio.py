"""PNG I/O and the canonical [-1,1] <-> 8-bit range maps."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .errors import IOFailure


def to_canonical(u8: np.ndarray, dtype=np.float64) -> np.ndarray:
    """8-bit [0,255] -> [-1,1] via v/127.5 - 1."""
    return u8.astype(dtype) / 127.5 - 1.0


def to_uint8(img: np.ndarray) -> np.ndarray:
    """[-1,1] -> 8-bit with round-half-away-from-zero."""
    v = 127.5 * (np.clip(img, -1.0, 1.0) + 1.0)
    return np.floor(v + 0.5).astype(np.uint8)


def chw_to_hwc(img: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.moveaxis(img, 0, -1))


def hwc_to_chw(img: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.moveaxis(img, -1, 0))


def write_png(path: str | Path, u8: np.ndarray):
    """Write an (H,W,3) RGB or (H,W) grayscale uint8 array."""
    if u8.dtype != np.uint8:
        raise ValueError("write_png expects uint8")
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        PILImage.fromarray(u8).save(path, format="PNG")
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc


def read_png(path: str | Path) -> np.ndarray:
    """Read a PNG as (H,W,3) RGB or (H,W) grayscale uint8."""
    try:
        with PILImage.open(path) as im:
            if im.mode not in ("RGB", "L"):
                im = im.convert("RGB")
            return np.asarray(im, dtype=np.uint8)
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc


def write_mask_png(path: str | Path, mask: np.ndarray):
    """Store a {0,1} mask as {0,255} grayscale."""
    write_png(path, (np.asarray(mask, dtype=np.uint8) * 255))


def read_mask_png(path: str | Path) -> np.ndarray:
    u8 = read_png(path)
    if u8.ndim == 3:
        u8 = u8[..., 0]
    return (u8 >= 128).astype(np.uint8)
