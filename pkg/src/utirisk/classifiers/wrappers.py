"""Object adapters around the functional classifiers.

Feature selection and the CV harness want a uniform fit/predict surface;
``feature_importance`` feeds recursive elimination where defined.
"""

from __future__ import annotations

import numpy as np

from utirisk.classifiers.gnb import GnbModel, fit_gnb, predict_gnb
from utirisk.classifiers.linear import (
    KnnModel,
    LrModel,
    fit_knn,
    fit_lr,
    predict_knn,
    predict_lr,
)


class GnbClassifier:
    model: GnbModel | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GnbClassifier":
        self.model = fit_gnb(X, y)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        labels, _ = predict_gnb(self.model, np.atleast_2d(X))
        return labels

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        _, post = predict_gnb(self.model, np.atleast_2d(X))
        return post

    def feature_importance(self) -> np.ndarray:
        """Class-mean separation per feature: |mu_0 - mu_1| / mean sigma."""
        m = self.model
        if m is None or len(m.classes) != 2:
            raise ValueError("importance needs a fitted two-class model")
        return np.abs(m.mu[0] - m.mu[1]) / m.sigma.mean(axis=0)


class LrClassifier:
    def __init__(self, lr: float = 0.1, epochs: int = 500, weight_decay: float = 1e-4):
        self.lr, self.epochs, self.weight_decay = lr, epochs, weight_decay
        self.model: LrModel | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LrClassifier":
        self.model = fit_lr(X, y, lr=self.lr, epochs=self.epochs,
                            weight_decay=self.weight_decay)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        labels, _ = predict_lr(self.model, np.atleast_2d(X))
        return labels

    def feature_importance(self) -> np.ndarray:
        if self.model is None:
            raise ValueError("importance needs a fitted model")
        return np.abs(self.model.w)


class KnnClassifier:
    def __init__(self, k: int = 3):
        self.k = k
        self.model: KnnModel | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnClassifier":
        self.model = KnnModel(X=X, y=y, k=min(self.k, len(np.atleast_2d(X))))
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.atleast_1d(predict_knn(self.model, np.atleast_2d(X)))
