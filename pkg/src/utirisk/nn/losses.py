"""Losses: value in float64, gradient of the MEAN loss w.r.t. predictions."""

from __future__ import annotations

import numpy as np

LOSSES = ("mse", "bce")
_CLIP = 1e-12


def mse(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    diff = pred.astype(np.float64) - target.astype(np.float64)
    loss = float(np.mean(diff**2))
    grad = (2.0 / diff.size) * diff
    return loss, grad.astype(pred.dtype)


def bce(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    p = np.clip(pred.astype(np.float64), _CLIP, 1.0 - _CLIP)
    t = target.astype(np.float64)
    loss = float(np.mean(-(t * np.log(p) + (1.0 - t) * np.log1p(-p))))
    grad = (p - t) / (p * (1.0 - p)) / p.size
    return loss, grad.astype(pred.dtype)


def get_loss(name: str):
    if name == "mse":
        return mse
    if name == "bce":
        return bce
    raise ValueError(f"unknown loss {name!r}")
