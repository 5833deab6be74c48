"""Topology-weighted binary cross-entropy.

The loss is the plain BCE mean with per-voxel weights that are ``w > 1``
exactly at the non-simple points of the *binarized prediction* and 1
everywhere else, so splits and mergers dominate the cost while the mean is
still taken over all N voxels (weights do not renormalize it).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import nonsimple_mask
from .volumes import LabelVolume, PredictionVolume, WeightVolume


@dataclass(frozen=True)
class LossConfig:
    """Loss hyperparameters.

    Defaults (threshold 0.5, weight 5.0, eps 1e-6) are package choices; only
    w > 1 is prescribed.  ``restrict_to_disagreement`` optionally intersects
    the weight mask with the prediction/label disagreement set.
    """

    threshold: float = 0.5
    weight: float = 5.0
    eps: float = 1e-6
    restrict_to_disagreement: bool = False

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0, 1), got {self.threshold}")
        if not self.weight > 1.0:
            raise ValueError(f"weight must be > 1, got {self.weight}")
        if not 0.0 < self.eps < 0.5:
            raise ValueError(f"eps must be in (0, 0.5), got {self.eps}")

    @classmethod
    def from_dict(cls, doc: dict) -> "LossConfig":
        return cls(**{k: doc[k] for k in ("threshold", "weight", "eps", "restrict_to_disagreement") if k in doc})


def binarize(pred, threshold: float = 0.5) -> LabelVolume:
    """Threshold a prediction; ties (pred == threshold) go to foreground."""
    data = pred.data if isinstance(pred, PredictionVolume) else np.asarray(pred, dtype=np.float32)
    return LabelVolume((data >= threshold).astype(np.uint8))


def weight_map(pred_bin, w: float, label=None) -> WeightVolume:
    """Weight ``w`` at the non-simple points of a binarized prediction, 1 elsewhere.

    With ``label`` given, the mask is additionally restricted to voxels where
    prediction and label disagree.
    """
    if not w > 1.0:
        raise ValueError(f"w must be > 1, got {w}")
    mask = nonsimple_mask(pred_bin).data
    if label is not None:
        ldata = label.data if isinstance(label, LabelVolume) else np.asarray(label)
        pdata = pred_bin.data if isinstance(pred_bin, LabelVolume) else np.asarray(pred_bin)
        mask = mask & (pdata != ldata)
    weights = np.ones(mask.shape, dtype=np.float32)
    weights[mask == 1] = np.float32(w)
    return WeightVolume(weights)


def _loss_arrays(pred, label, weights):
    p = pred.data if isinstance(pred, PredictionVolume) else np.asarray(pred, dtype=np.float32)
    y = label.data if isinstance(label, LabelVolume) else np.asarray(label)
    w = weights.data if isinstance(weights, WeightVolume) else np.asarray(weights, dtype=np.float32)
    if not (p.shape == y.shape == w.shape):
        raise ValueError(f"shape mismatch: pred {p.shape}, label {y.shape}, weights {w.shape}")
    return p, y, w


def weighted_bce(pred, label, weights, eps: float = 1e-6) -> float:
    """-(1/N) sum_i w_i [y_i log p_i + (1 - y_i) log(1 - p_i)], p clamped to [eps, 1-eps].

    Evaluated in float64 with a single fixed summation order, so the value is
    reproducible bit for bit regardless of worker count.
    """
    p, y, w = _loss_arrays(pred, label, weights)
    p = np.clip(p.astype(np.float64), eps, 1.0 - eps)
    y = y.astype(np.float64)
    w = w.astype(np.float64)
    terms = w * (y * np.log(p) + (1.0 - y) * np.log1p(-p))
    return float(-terms.sum() / terms.size)


def weighted_bce_grad(pred, label, weights, eps: float = 1e-6) -> np.ndarray:
    """Analytic dJ/dp per voxel; zero wherever the clamp is active."""
    p, y, w = _loss_arrays(pred, label, weights)
    p64 = p.astype(np.float64)
    clamp_active = (p64 < eps) | (p64 > 1.0 - eps)
    pc = np.clip(p64, eps, 1.0 - eps)
    y = y.astype(np.float64)
    grad = -(w.astype(np.float64) / p.size) * (y / pc - (1.0 - y) / (1.0 - pc))
    grad[clamp_active] = 0.0
    return grad
