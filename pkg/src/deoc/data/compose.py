"""Synthetic occlusion compositing.

occ = dest * ~translated(mask) + translated(mask * occluder), followed by a
Gaussian blur restricted to the dilate-XOR-erode band of the translated
mask so the pasting seam is softened while every pixel outside mask+band
stays bit-identical to the destination.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import backend
from ..errors import NoValidPlacement, ShapeMismatch
from .morphology import morphological_band


@dataclass
class OcclusionSpec:
    blur_sigma: float = 2.0
    band_radius: int = 3
    height_fraction_limit: Fraction = field(default_factory=lambda: Fraction(6, 7))
    rng_seed: int = 0

    def __post_init__(self):
        if isinstance(self.height_fraction_limit, (list, tuple)):
            self.height_fraction_limit = Fraction(*self.height_fraction_limit)
        else:
            self.height_fraction_limit = Fraction(self.height_fraction_limit)
        if not (0 < self.height_fraction_limit <= 1):
            raise ValueError("height_fraction_limit must be in (0, 1]")
        if self.blur_sigma < 0:
            raise ValueError("blur_sigma must be >= 0 (0 disables the blur)")
        if self.band_radius < 0:
            raise ValueError("band_radius must be >= 0")

    def row_limit(self, height: int) -> int:
        """Exclusive upper bound on occluder rows: floor(limit * H)."""
        f = self.height_fraction_limit * height
        return f.numerator // f.denominator

    def to_dict(self) -> dict:
        return {
            "blur_sigma": self.blur_sigma,
            "band_radius": self.band_radius,
            "height_fraction_limit": [self.height_fraction_limit.numerator,
                                      self.height_fraction_limit.denominator],
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OcclusionSpec":
        return cls(blur_sigma=d["blur_sigma"], band_radius=d["band_radius"],
                   height_fraction_limit=d["height_fraction_limit"],
                   rng_seed=d["rng_seed"])


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian truncated at 3*sigma."""
    radius = max(1, math.floor(3.0 * sigma + 0.5))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur of a (H,W,C) or (H,W) float image, mirror
    (reflect-101) borders."""
    if sigma <= 0:
        return img.copy()
    k = gaussian_kernel(sigma)
    squeeze = img.ndim == 2
    if squeeze:
        img = img[..., None]
    chw = np.ascontiguousarray(np.moveaxis(img, -1, 0).astype(np.float64))
    out = backend.blur1d(chw, k, 0)
    out = backend.blur1d(out, k, 1)
    out = np.moveaxis(out, 0, -1)
    return out[..., 0] if squeeze else out


def translate_mask(mask: np.ndarray, src: np.ndarray, dest_dims: tuple[int, int],
                   spec: OcclusionSpec, rng: np.random.Generator
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Place (mask, src) on the destination grid at a uniform admissible
    integer offset.

    Vertically the whole mask must land inside rows [0, floor(limit*H));
    horizontally the mask's bounding box only has to intersect the frame,
    and off-frame columns are cropped. Raises NoValidPlacement when the
    mask is taller than the allowed band.
    """
    mask = np.asarray(mask)
    if mask.shape != src.shape[:2]:
        raise ShapeMismatch(f"mask {mask.shape} vs occluder {src.shape[:2]}")
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise ValueError("translate_mask requires a nonempty mask")
    dh, dw = dest_dims
    limit = spec.row_limit(dh)
    y0, y1 = int(ys.min()), int(ys.max())
    x0, x1 = int(xs.min()), int(xs.max())

    dy_lo, dy_hi = -y0, limit - 1 - y1
    if dy_lo > dy_hi:
        raise NoValidPlacement(
            f"mask rows span {y1 - y0 + 1} > allowed band {limit} "
            f"(limit {spec.height_fraction_limit} of height {dh})")
    dx_lo, dx_hi = -x1, dw - 1 - x0

    dy = int(rng.integers(dy_lo, dy_hi + 1))
    dx = int(rng.integers(dx_lo, dx_hi + 1))

    out_mask = np.zeros((dh, dw), dtype=np.uint8)
    out_img = np.zeros((dh, dw) + src.shape[2:], dtype=src.dtype)
    sy0, sy1 = max(0, -dy), min(mask.shape[0], dh - dy)
    sx0, sx1 = max(0, -dx), min(mask.shape[1], dw - dx)
    if sy0 < sy1 and sx0 < sx1:
        sub = mask[sy0:sy1, sx0:sx1] != 0
        out_mask[sy0 + dy:sy1 + dy, sx0 + dx:sx1 + dx] = sub
        region = out_img[sy0 + dy:sy1 + dy, sx0 + dx:sx1 + dx]
        np.copyto(region, src[sy0:sy1, sx0:sx1], where=sub[..., None] if src.ndim == 3 else sub)
    return out_mask, out_img


def compose_occlusion(dest: np.ndarray, occluder: np.ndarray,
                      occluder_mask: np.ndarray, spec: OcclusionSpec,
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Paste a randomly translated masked occluder onto dest and soften the
    seam. Returns (composed float64 image, translated mask on the dest grid)."""
    dest = np.asarray(dest, dtype=np.float64)
    occluder = np.asarray(occluder, dtype=np.float64)
    occluder_mask = np.asarray(occluder_mask)
    if occluder_mask.shape != occluder.shape[:2]:
        raise ShapeMismatch(f"occluder mask {occluder_mask.shape} vs "
                            f"occluder {occluder.shape[:2]}")
    if not occluder_mask.any():
        return dest.copy(), np.zeros(dest.shape[:2], dtype=np.uint8)

    tmask, timg = translate_mask(occluder_mask, occluder, dest.shape[:2], spec, rng)
    where = tmask[..., None] != 0 if dest.ndim == 3 else tmask != 0
    composed = np.where(where, timg, dest)
    band = morphological_band(tmask, spec.band_radius)
    if band.any() and spec.blur_sigma > 0:
        blurred = gaussian_blur(composed, spec.blur_sigma)
        sel = band != 0
        composed[sel] = blurred[sel]
    return composed, tmask
