"""Logistic regression and k-nearest-neighbour heads."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from utirisk.nn.layers import act_forward


@dataclass
class LrModel:
    w: np.ndarray
    b: float
    classes: tuple[int, int] = (0, 1)
    single_class: bool = False  # fitted on one class only; predictions are flat


def fit_lr(X: np.ndarray, y: np.ndarray, lr: float = 0.1, epochs: int = 500,
           weight_decay: float = 1e-4) -> LrModel:
    """Full-batch gradient descent on cross-entropy with L2 decay."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("X must be a nonempty (samples, features) matrix")
    single = len(np.unique(y)) < 2
    if single:
        warnings.warn("logistic regression fitted on a single class", stacklevel=2)
    w = np.zeros(X.shape[1])
    b = 0.0
    n = len(X)
    for _ in range(epochs):
        p = act_forward("sigmoid", X @ w + b)
        err = p - y
        w -= lr * (X.T @ err / n + weight_decay * w)
        b -= lr * float(err.mean())
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise ValueError("logistic regression diverged to non-finite parameters")
    return LrModel(w=w, b=b, single_class=single)


def predict_lr(model: LrModel, x: np.ndarray):
    """(class, P(positive)); arrays for a batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != len(model.w):
        raise ValueError(f"expected {len(model.w)} features, got {X.shape[1]}")
    p = act_forward("sigmoid", X @ model.w + model.b)
    labels = np.where(p >= 0.5, model.classes[1], model.classes[0])
    if single:
        return int(labels[0]), float(p[0])
    return labels, p


@dataclass
class KnnModel:
    X: np.ndarray
    y: np.ndarray
    k: int = 3

    def __post_init__(self) -> None:
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=int)
        if not 1 <= self.k <= len(self.X):
            raise ValueError(f"k must be in [1, {len(self.X)}]")


def fit_knn(X: np.ndarray, y: np.ndarray, k: int = 3) -> KnnModel:
    if k % 2 == 0:
        warnings.warn("even k invites voting ties; odd k avoids them", stacklevel=2)
    return KnnModel(X=X, y=y, k=k)


def predict_knn(model: KnnModel, x: np.ndarray):
    """Euclidean majority vote.  Distance ties keep the earlier training
    index (stable sort); vote ties go to the lower class value."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != model.X.shape[1]:
        raise ValueError(f"expected {model.X.shape[1]} features, got {X.shape[1]}")
    labels = np.empty(len(X), dtype=int)
    for i, q in enumerate(X):
        d = np.sum((model.X - q) ** 2, axis=1)
        nearest = np.argsort(d, kind="stable")[:model.k]
        votes = model.y[nearest]
        values, counts = np.unique(votes, return_counts=True)
        labels[i] = values[np.argmax(counts)]
    if single:
        return int(labels[0])
    return labels
