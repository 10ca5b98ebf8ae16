"""Gaussian naive Bayes in log space.

Posteriors over thousands of per-feature densities underflow as raw
products, so only log-space evaluation is supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VAR_FLOOR = 1e-6


@dataclass(frozen=True)
class GnbModel:
    classes: np.ndarray  # sorted class values
    priors: np.ndarray  # class frequencies, sum to 1
    mu: np.ndarray  # (classes, features)
    sigma: np.ndarray  # (classes, features), floored
    floor: float = VAR_FLOOR

    def __post_init__(self) -> None:
        if not np.isclose(self.priors.sum(), 1.0):
            raise ValueError("priors must sum to 1")
        if np.any(self.sigma < self.floor):
            raise ValueError("sigma below floor")


def fit_gnb(X: np.ndarray, y: np.ndarray, floor: float = VAR_FLOOR) -> GnbModel:
    """Per-class maximum-likelihood fit: mean and population std, floored."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("X must be a nonempty (samples, features) matrix")
    if len(X) != len(y):
        raise ValueError("X and y differ in length")
    classes = np.unique(y)
    priors = np.empty(len(classes))
    mu = np.empty((len(classes), X.shape[1]))
    sigma = np.empty_like(mu)
    for c, cls in enumerate(classes):
        rows = X[y == cls]
        priors[c] = len(rows) / len(X)
        mu[c] = rows.mean(axis=0)
        sigma[c] = np.maximum(np.sqrt(rows.var(axis=0)), floor)
    return GnbModel(classes=classes, priors=priors, mu=mu, sigma=sigma, floor=floor)


def _log_posteriors(model: GnbModel, X: np.ndarray) -> np.ndarray:
    if X.shape[1] != model.mu.shape[1]:
        raise ValueError(f"expected {model.mu.shape[1]} features, got {X.shape[1]}")
    out = np.empty((len(X), len(model.classes)))
    for c in range(len(model.classes)):
        z = (X - model.mu[c]) / model.sigma[c]
        out[:, c] = (np.log(model.priors[c])
                     - np.sum(np.log(model.sigma[c]))
                     - 0.5 * model.mu.shape[1] * np.log(2.0 * np.pi)
                     - 0.5 * np.sum(z * z, axis=1))
    return out


def predict_gnb(model: GnbModel, x: np.ndarray):
    """(class, per-class posterior); for a batch, arrays of both.

    Ties resolve to the lower class index (argmax keeps the first maximum).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    log_post = _log_posteriors(model, np.atleast_2d(x))
    log_post -= log_post.max(axis=1, keepdims=True)
    post = np.exp(log_post)
    post /= post.sum(axis=1, keepdims=True)
    labels = model.classes[np.argmax(post, axis=1)]
    if single:
        return labels[0], post[0]
    return labels, post
