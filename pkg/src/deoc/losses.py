"""Loss components and their weighted combination.

Conventions: probabilities are clamped to [eps, 1-eps] before logs; every
loss uses batch-mean reduction so weight presets do not depend on batch
size; the per-tap perceptual term normalizes by W*H only (channels are
summed, not averaged).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .engine import Tensor
from .errors import LengthMismatch, ShapeMismatch

CONTENT_MODES = ("mse", "perceptual")


@dataclass
class LossWeights:
    lambda1: float = 10.0
    lambda2: float = 0.0
    content_mode: str = "perceptual"
    log_epsilon: float = 1e-7

    def __post_init__(self):
        if not (np.isfinite(self.lambda1) and self.lambda1 >= 0):
            raise ValueError(f"lambda1 must be finite and >= 0, got {self.lambda1}")
        if not (np.isfinite(self.lambda2) and self.lambda2 >= 0):
            raise ValueError(f"lambda2 must be finite and >= 0, got {self.lambda2}")
        if self.content_mode not in CONTENT_MODES:
            raise ValueError(f"content_mode must be one of {CONTENT_MODES}")


@dataclass
class LossBreakdown:
    adv: float
    content: float
    attr: float
    total: float


def _as_t(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float64))


def adversarial_generator_loss(d_fake, eps: float = 1e-7) -> Tensor:
    """Mean of -log D(G(.)): the non-saturating generator objective."""
    d_fake = _as_t(d_fake)
    p = engine.clip(d_fake, eps, 1.0 - eps)
    return engine.mul(engine.tsum(engine.log(p)), -1.0 / d_fake.size)


def discriminator_loss(d_real, d_fake, eps: float = 1e-7) -> Tensor:
    """Mean of -log D(real) - log(1 - D(fake))."""
    d_real, d_fake = _as_t(d_real), _as_t(d_fake)
    if d_real.size != d_fake.size:
        raise ShapeMismatch("d_real and d_fake batches differ in size")
    pr = engine.clip(d_real, eps, 1.0 - eps)
    pf = engine.clip(d_fake, eps, 1.0 - eps)
    term = engine.add(engine.log(pr), engine.log(engine.add(1.0, engine.mul(pf, -1.0))))
    return engine.mul(engine.tsum(term), -1.0 / d_real.size)


def mse_loss(gt, gen) -> Tensor:
    """Mean squared pixel difference over all elements."""
    gt, gen = _as_t(gt), _as_t(gen)
    if gt.shape != gen.shape:
        raise ShapeMismatch(f"mse: {gt.shape} vs {gen.shape}")
    return engine.tmean(engine.square(engine.add(gen, engine.mul(gt, -1.0))))


def perceptual_loss(feats_gt, feats_gen) -> Tensor:
    """Sum over taps of (1/(W*H)) * sum_{x,y,c} (phi_gt - phi_gen)^2,
    batch-meaned."""
    if len(feats_gt) != len(feats_gen):
        raise ShapeMismatch("tap lists differ in length")
    total = None
    for fgt, fgen in zip(feats_gt, feats_gen):
        fgt, fgen = _as_t(fgt), _as_t(fgen)
        if fgt.shape != fgen.shape:
            raise ShapeMismatch(f"tap shapes differ: {fgt.shape} vs {fgen.shape}")
        if fgt.ndim != 4:
            raise ShapeMismatch("taps must be (B,C,H,W) feature maps")
        b, _, h, w = fgt.shape
        d2 = engine.square(engine.add(fgt, engine.mul(fgen, -1.0)))
        term = engine.mul(engine.tsum(d2), 1.0 / (w * h * b))
        total = term if total is None else engine.add(total, term)
    if total is None:
        raise ShapeMismatch("perceptual loss needs at least one tap")
    return total


def attribute_loss(psi, labels, positive_ratio, eps: float = 1e-7) -> Tensor:
    """Weighted BCE: positives weighted exp(1-r_i), negatives exp(r_i);
    summed over attributes, batch-meaned."""
    psi = _as_t(psi)
    labels = np.asarray(labels, dtype=psi.dtype)
    r = np.asarray(getattr(positive_ratio, "positive_ratio", positive_ratio),
                   dtype=psi.dtype)
    if psi.ndim != 2:
        raise ShapeMismatch(f"psi must be (B,N_A), got {psi.shape}")
    if labels.shape != psi.shape:
        raise LengthMismatch(f"labels {labels.shape} vs psi {psi.shape}")
    if r.shape != (psi.shape[1],):
        raise LengthMismatch(f"positive_ratio has length {r.shape}, "
                             f"expected ({psi.shape[1]},)")
    b = psi.shape[0]
    w_pos = np.exp(1.0 - r)
    w_neg = np.exp(r)
    p = engine.clip(psi, eps, 1.0 - eps)
    pos = engine.mul(engine.log(p), w_pos * labels)
    neg = engine.mul(engine.log(engine.add(1.0, engine.mul(p, -1.0))),
                     w_neg * (1.0 - labels))
    return engine.mul(engine.tsum(engine.add(pos, neg)), -1.0 / b)


def combine(adv: Tensor, content: Tensor | None, attr: Tensor | None,
            weights: LossWeights) -> Tensor:
    """Differentiable total = adv + lambda1*content + lambda2*attr."""
    total = adv
    if content is not None and weights.lambda1 != 0.0:
        total = engine.add(total, engine.mul(content, weights.lambda1))
    if attr is not None and weights.lambda2 != 0.0:
        total = engine.add(total, engine.mul(attr, weights.lambda2))
    return total


def total_loss(adv: float, content: float, attr: float,
               weights: LossWeights) -> LossBreakdown:
    """Scalar bookkeeping form of the combination."""
    for name, v in (("adv", adv), ("content", content), ("attr", attr)):
        if not np.isfinite(v):
            raise ValueError(f"non-finite {name} loss: {v}")
    total = adv + weights.lambda1 * content + weights.lambda2 * attr
    return LossBreakdown(adv=float(adv), content=float(content),
                         attr=float(attr), total=float(total))
