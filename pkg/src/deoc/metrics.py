"""Reconstruction metrics (SSIM, PSNR) and the five attribute-classification
metrics of the RAP protocol.

SSIM/PSNR operate on the 8-bit representation (MAX=255); canonical-range
images must be converted first (`imageio.to_uint8`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ImageTooSmall, ShapeMismatch

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
DYNAMIC_RANGE = 255.0


@dataclass
class AttributeMetrics:
    ma: float
    accuracy: float
    precision: float
    recall: float
    f1: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.ma, self.accuracy, self.precision, self.recall, self.f1)


@dataclass
class MetricsReport:
    split: str
    n_samples: int
    ssim: float
    psnr: float
    ma: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    config_hash: str = ""

    CSV_COLUMNS = ("split", "n_samples", "ssim", "psnr", "mA", "accuracy",
                   "precision", "recall", "f1", "config_hash")

    def csv_row(self) -> list[str]:
        def fmt(v):
            if isinstance(v, float):
                return "inf" if math.isinf(v) else repr(v)
            return str(v)
        return [fmt(v) for v in (self.split, self.n_samples, self.ssim, self.psnr,
                                 self.ma, self.accuracy, self.precision,
                                 self.recall, self.f1, self.config_hash)]

    def to_dict(self) -> dict:
        return {
            "split": self.split, "n_samples": self.n_samples,
            "ssim": self.ssim, "psnr": "inf" if math.isinf(self.psnr) else self.psnr,
            "mA": self.ma, "accuracy": self.accuracy, "precision": self.precision,
            "recall": self.recall, "f1": self.f1, "config_hash": self.config_hash,
        }


def _check_pair(gt: np.ndarray, gen: np.ndarray):
    if gt.shape != gen.shape:
        raise ShapeMismatch(f"image dims differ: {gt.shape} vs {gen.shape}")


def psnr(gt: np.ndarray, gen: np.ndarray) -> float:
    """10*log10(255^2/MSE) on uint8 images; +inf when identical."""
    _check_pair(gt, gen)
    diff = gt.astype(np.float64) - gen.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(DYNAMIC_RANGE ** 2 / mse)


def _gaussian_window(n: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    half = (n - 1) / 2.0
    x = np.arange(n, dtype=np.float64) - half
    w = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return w / w.sum()


def rgb_to_luma(u8: np.ndarray) -> np.ndarray:
    """Y = 0.299R + 0.587G + 0.114B on 8-bit values (float64 result)."""
    if u8.ndim == 2:
        return u8.astype(np.float64)
    if u8.ndim != 3 or u8.shape[2] != 3:
        raise ShapeMismatch(f"expected (H,W,3) or (H,W), got {u8.shape}")
    f = u8.astype(np.float64)
    return 0.299 * f[..., 0] + 0.587 * f[..., 1] + 0.114 * f[..., 2]


def _valid_sep_filter(img: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Separable 'valid' correlation with a normalized 1D window."""
    n = len(w)
    rows = np.zeros((img.shape[0] - n + 1, img.shape[1]))
    for t in range(n):
        rows += w[t] * img[t:t + rows.shape[0], :]
    out = np.zeros((rows.shape[0], img.shape[1] - n + 1))
    for t in range(n):
        out += w[t] * rows[:, t:t + out.shape[1]]
    return out


def ssim(gt: np.ndarray, gen: np.ndarray) -> float:
    """Mean local SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01 K2=0.03,
    L=255, luma conversion first, mean over valid window positions."""
    _check_pair(gt, gen)
    x = rgb_to_luma(gt)
    y = rgb_to_luma(gen)
    if min(x.shape) < SSIM_WINDOW:
        raise ImageTooSmall(f"SSIM needs dims >= {SSIM_WINDOW}, got {x.shape}")
    w = _gaussian_window()
    c1 = (SSIM_K1 * DYNAMIC_RANGE) ** 2
    c2 = (SSIM_K2 * DYNAMIC_RANGE) ** 2
    mu_x = _valid_sep_filter(x, w)
    mu_y = _valid_sep_filter(y, w)
    xx = _valid_sep_filter(x * x, w) - mu_x * mu_x
    yy = _valid_sep_filter(y * y, w) - mu_y * mu_y
    xy = _valid_sep_filter(x * y, w) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2)
    return float(np.mean(num / den))


def attribute_metrics(pred_probs: np.ndarray, labels: np.ndarray,
                      threshold: float = 0.5) -> AttributeMetrics:
    """RAP protocol: label-based mA plus example-based accuracy, precision,
    recall and F1 over predicted-positive vs true-positive attribute sets.

    Degenerate-set conventions: an attribute with no positives or no
    negatives is skipped from mA; per sample, empty union counts accuracy 1;
    empty prediction set counts precision 1 iff the true set is also empty;
    empty true set counts recall 1. F1 is computed from the batch means.
    """
    pred_probs = np.asarray(pred_probs, dtype=np.float64)
    labels = np.asarray(labels)
    if pred_probs.ndim != 2 or pred_probs.shape != labels.shape:
        raise ShapeMismatch(f"pred {pred_probs.shape} vs labels {labels.shape}")
    y = labels.astype(bool)
    f = pred_probs >= threshold

    # mean accuracy over attributes
    pos = y.sum(axis=0)
    neg = (~y).sum(axis=0)
    tp = (f & y).sum(axis=0)
    tn = (~f & ~y).sum(axis=0)
    usable = (pos > 0) & (neg > 0)
    if usable.any():
        tpr = tp[usable] / pos[usable]
        tnr = tn[usable] / neg[usable]
        ma = float(np.mean((tpr + tnr) / 2.0))
    else:
        ma = 0.0

    # example-based metrics
    inter = (f & y).sum(axis=1).astype(np.float64)
    union = (f | y).sum(axis=1).astype(np.float64)
    npred = f.sum(axis=1).astype(np.float64)
    ntrue = y.sum(axis=1).astype(np.float64)
    acc = np.where(union > 0, inter / np.maximum(union, 1), 1.0)
    prec = np.where(npred > 0, inter / np.maximum(npred, 1),
                    np.where(ntrue == 0, 1.0, 0.0))
    rec = np.where(ntrue > 0, inter / np.maximum(ntrue, 1), 1.0)
    accuracy = float(acc.mean())
    precision = float(prec.mean())
    recall = float(rec.mean())
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return AttributeMetrics(ma=ma, accuracy=accuracy, precision=precision,
                            recall=recall, f1=float(f1))
