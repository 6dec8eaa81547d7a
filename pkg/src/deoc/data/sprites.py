"""Procedural toy pedestrians.

A sample is a humanoid sprite (head, hair, optional hat, torso+arms,
optional bag, pants/skirt/shorts legs, a nose marker on the facing side)
over a flat noisy background. Rendering is a pure function of the sampled
parameters, the silhouette mask is exactly the set of painted pixels, and
every attribute drives a visible primitive so a classifier can recover it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_ATTRIBUTES = (
    "shirt-red", "shirt-blue", "has-hat", "long-pants",
    "skirt", "has-bag", "dark-hair", "facing-left",
)

#: attributes whose label toggles when the image is flipped horizontally
DEFAULT_FLIP_TOGGLES = ("facing-left",)


@dataclass
class ToyConfig:
    height: int = 64
    width: int = 32
    attribute_names: tuple[str, ...] = DEFAULT_ATTRIBUTES
    height_range: tuple[float, float] = (0.72, 0.92)
    background_noise: int = 12

    def __post_init__(self):
        if self.height % 16 or self.width % 16:
            raise ValueError("toy image dims must be divisible by 16")
        if tuple(self.attribute_names) != DEFAULT_ATTRIBUTES:
            raise ValueError("the toy sampler renders the default 8-attribute schema")
        self.attribute_names = tuple(self.attribute_names)


@dataclass
class SpriteParams:
    shirt_kind: str          # red | blue | other
    bottom_kind: str         # pants | skirt | shorts
    has_hat: bool
    has_bag: bool
    dark_hair: bool
    facing_left: bool
    height_frac: float
    aspect: float
    feet_margin_frac: float
    x_center_frac: float
    shirt_color: tuple[int, int, int] = (0, 0, 0)
    pants_color: tuple[int, int, int] = (0, 0, 0)
    skirt_color: tuple[int, int, int] = (0, 0, 0)
    hat_color: tuple[int, int, int] = (0, 0, 0)
    bag_color: tuple[int, int, int] = (0, 0, 0)
    hair_color: tuple[int, int, int] = (0, 0, 0)
    skin_color: tuple[int, int, int] = (0, 0, 0)

    def labels(self) -> np.ndarray:
        return np.array([
            self.shirt_kind == "red",
            self.shirt_kind == "blue",
            self.has_hat,
            self.bottom_kind == "pants",
            self.bottom_kind == "skirt",
            self.has_bag,
            self.dark_hair,
            self.facing_left,
        ], dtype=np.uint8)


def _jitter(rng: np.random.Generator, base: tuple[int, int, int],
            amount: int = 18) -> tuple[int, int, int]:
    lo = np.maximum(np.array(base) - amount, 0)
    hi = np.minimum(np.array(base) + amount, 255)
    return tuple(int(rng.integers(l, h + 1)) for l, h in zip(lo, hi))


def sample_sprite_params(rng: np.random.Generator,
                         height_range: tuple[float, float]) -> SpriteParams:
    u = rng.random()
    shirt_kind = "red" if u < 0.35 else ("blue" if u < 0.70 else "other")
    u = rng.random()
    bottom_kind = "pants" if u < 0.45 else ("skirt" if u < 0.80 else "shorts")
    p = SpriteParams(
        shirt_kind=shirt_kind,
        bottom_kind=bottom_kind,
        has_hat=bool(rng.random() < 0.5),
        has_bag=bool(rng.random() < 0.4),
        dark_hair=bool(rng.random() < 0.5),
        facing_left=bool(rng.random() < 0.5),
        height_frac=float(rng.uniform(*height_range)),
        aspect=float(rng.uniform(0.42, 0.55)),
        feet_margin_frac=float(rng.uniform(0.01, 0.06)),
        x_center_frac=float(rng.uniform(0.42, 0.58)),
    )
    if shirt_kind == "red":
        p.shirt_color = _jitter(rng, (205, 40, 40))
    elif shirt_kind == "blue":
        p.shirt_color = _jitter(rng, (40, 40, 205))
    else:
        p.shirt_color = _jitter(rng, (45, 170, 45) if rng.random() < 0.5 else (225, 200, 50))
    p.pants_color = _jitter(rng, (55, 55, 75))
    p.skirt_color = _jitter(rng, (215, 90, 185))
    p.hat_color = _jitter(rng, (235, 160, 40))
    p.bag_color = _jitter(rng, (120, 75, 35))
    p.hair_color = _jitter(rng, (40, 28, 18) if p.dark_hair else (200, 175, 110), 14)
    p.skin_color = _jitter(rng, (220, 170, 140), 12)
    return p


def _fill_rect(img, mask, y0, y1, x0, x1, color):
    """Half-open rect clipped to the canvas; marks the silhouette mask."""
    h, w = mask.shape
    y0, y1 = max(0, y0), min(h, y1)
    x0, x1 = max(0, x0), min(w, x1)
    if y0 < y1 and x0 < x1:
        img[y0:y1, x0:x1] = color
        mask[y0:y1, x0:x1] = 1


def _fill_ellipse(img, mask, cy, cx, ry, rx, color):
    h, w = mask.shape
    yy, xx = np.ogrid[:h, :w]
    sel = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    img[sel] = color
    mask[sel] = 1


def render_sprite(params: SpriteParams, canvas: np.ndarray) -> np.ndarray:
    """Paint the sprite onto canvas (H,W,3 uint8, modified in place);
    returns the exact silhouette mask."""
    h, w = canvas.shape[:2]
    mask = np.zeros((h, w), dtype=np.uint8)
    hs = max(12, round(params.height_frac * h))
    ws = min(w - 2, max(6, round(params.aspect * hs)))
    yf = h - 1 - round(params.feet_margin_frac * h)
    y0 = yf - hs + 1
    xc = round(params.x_center_frac * w)
    sign = -1 if params.facing_left else 1

    def ry_(f):  # row offset from sprite top
        return y0 + round(f * hs)

    hat_h = max(2, round(0.10 * hs))
    head_ry = max(2, round(0.105 * hs))
    head_rx = max(2, round(0.17 * ws))
    head_cy = y0 + hat_h + head_ry + 1
    # legs
    leg_in = max(1, round(0.05 * ws))
    leg_out = max(leg_in + 1, round(0.26 * ws))
    if params.bottom_kind == "pants":
        _fill_rect(canvas, mask, ry_(0.56), yf + 1, xc - leg_out, xc - leg_in + 1,
                   params.pants_color)
        _fill_rect(canvas, mask, ry_(0.56), yf + 1, xc + leg_in, xc + leg_out + 1,
                   params.pants_color)
    elif params.bottom_kind == "skirt":
        _fill_rect(canvas, mask, ry_(0.56), ry_(0.80), xc - round(0.34 * ws),
                   xc + round(0.34 * ws) + 1, params.skirt_color)
        thin = max(1, round(0.09 * ws))
        _fill_rect(canvas, mask, ry_(0.80), yf + 1, xc - leg_out + 1,
                   xc - leg_out + 1 + thin, params.skin_color)
        _fill_rect(canvas, mask, ry_(0.80), yf + 1, xc + leg_out - thin,
                   xc + leg_out, params.skin_color)
    else:  # shorts
        _fill_rect(canvas, mask, ry_(0.56), ry_(0.74), xc - leg_out, xc - leg_in + 1,
                   params.pants_color)
        _fill_rect(canvas, mask, ry_(0.56), ry_(0.74), xc + leg_in, xc + leg_out + 1,
                   params.pants_color)
        thin = max(1, round(0.10 * ws))
        _fill_rect(canvas, mask, ry_(0.74), yf + 1, xc - leg_out + 1,
                   xc - leg_out + 1 + thin, params.skin_color)
        _fill_rect(canvas, mask, ry_(0.74), yf + 1, xc + leg_out - thin,
                   xc + leg_out, params.skin_color)
    # torso and sleeves
    torso_hw = max(2, round(0.30 * ws))
    arm_hw = max(torso_hw + 1, round(0.42 * ws))
    _fill_rect(canvas, mask, ry_(0.24), ry_(0.56), xc - torso_hw, xc + torso_hw + 1,
               params.shirt_color)
    _fill_rect(canvas, mask, ry_(0.26), ry_(0.52), xc - arm_hw, xc - torso_hw,
               params.shirt_color)
    _fill_rect(canvas, mask, ry_(0.26), ry_(0.52), xc + torso_hw + 1, xc + arm_hw + 1,
               params.shirt_color)
    # bag hangs on the facing side, outside the arm
    if params.has_bag:
        bx0 = xc + sign * arm_hw + (1 if sign > 0 else -1) * 1
        bag_w = max(2, round(0.16 * ws))
        x0, x1 = (bx0, bx0 + bag_w) if sign > 0 else (bx0 - bag_w, bx0)
        _fill_rect(canvas, mask, ry_(0.38), ry_(0.60), x0, x1 + 1, params.bag_color)
    # neck + head
    _fill_rect(canvas, mask, ry_(0.20), ry_(0.25), xc - max(1, round(0.06 * ws)),
               xc + max(1, round(0.06 * ws)) + 1, params.skin_color)
    _fill_ellipse(canvas, mask, head_cy, xc, head_ry, head_rx, params.skin_color)
    # hair: top cap of the head
    hair_rows = max(1, round(0.8 * head_ry))
    yy, xx = np.ogrid[:h, :w]
    cap = (((yy - head_cy) / head_ry) ** 2 + ((xx - xc) / head_rx) ** 2 <= 1.0) \
        & (yy <= head_cy - head_ry + hair_rows)
    canvas[cap] = params.hair_color
    mask[cap] = 1
    # nose marker on the facing side of the head
    nx = xc + sign * head_rx
    _fill_rect(canvas, mask, head_cy - 1, head_cy + 1, min(nx, nx + sign),
               max(nx, nx + sign) + 1, tuple(max(0, c - 60) for c in params.skin_color))
    # hat sits above the head, inside the sprite bounding box
    if params.has_hat:
        brim_h = max(1, hat_h // 3)
        crown_hw = max(2, round(0.8 * head_rx))
        brim_hw = max(crown_hw + 1, round(1.35 * head_rx))
        top = head_cy - head_ry - hat_h
        _fill_rect(canvas, mask, top, top + hat_h - brim_h + 1, xc - crown_hw,
                   xc + crown_hw + 1, params.hat_color)
        _fill_rect(canvas, mask, top + hat_h - brim_h + 1, top + hat_h + 1,
                   xc - brim_hw, xc + brim_hw + 1, params.hat_color)
    return mask


def render_background(rng: np.random.Generator, height: int, width: int,
                      noise: int) -> np.ndarray:
    base = rng.integers(60, 201, size=3)
    img = np.broadcast_to(base, (height, width, 3)).astype(np.int16)
    if noise > 0:
        img = img + rng.integers(-noise, noise + 1, size=(height, width, 3),
                                 dtype=np.int16)
    return np.clip(img, 0, 255).astype(np.uint8)


def generate_toy_sample(rng: np.random.Generator, config: ToyConfig
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray, SpriteParams]:
    """Draw one sample: returns (image u8 HxWx3, silhouette mask, labels, params)."""
    canvas = render_background(rng, config.height, config.width, config.background_noise)
    params = sample_sprite_params(rng, config.height_range)
    mask = render_sprite(params, canvas)
    return canvas, mask, params.labels(), params
