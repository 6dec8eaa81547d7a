"""Binary-mask morphology with a square structuring element."""
from __future__ import annotations

import numpy as np

from .. import backend


def _as_mask(mask: np.ndarray) -> np.ndarray:
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    return np.ascontiguousarray((m != 0).astype(np.uint8))


def dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Max filter, side 2*radius+1; outside pixels count as 0."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return backend.minmax_filter(_as_mask(mask), radius, True)


def erode(mask: np.ndarray, radius: int) -> np.ndarray:
    """Min filter, side 2*radius+1; outside pixels count as 0, so the
    border erodes away."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return backend.minmax_filter(_as_mask(mask), radius, False)


def morphological_band(mask: np.ndarray, radius: int) -> np.ndarray:
    """dilate XOR erode: the ring around the mask boundary."""
    return dilate(mask, radius) ^ erode(mask, radius)
