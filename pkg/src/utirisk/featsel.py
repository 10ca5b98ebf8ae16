"""Wrapper feature selection: sequential backward selection and recursive
feature elimination, both scored by cross-validated macro F1.

Tie rules are explicit because they change results: SBS removes the lowest
candidate index among equal scores; RFECV eliminates the lowest index among
equally unimportant features and prefers the smaller subset among equally
scoring sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from utirisk.pipeline import compute_metrics, kfold_split

ClassifierFactory = Callable[[], object]


@dataclass(frozen=True)
class FeatureSubset:
    selected: tuple[int, ...]  # unique, sorted, within bounds
    trace: tuple[tuple[int, float], ...]  # (removed index, score after removal)

    def __post_init__(self) -> None:
        if list(self.selected) != sorted(set(self.selected)):
            raise ValueError("selected indices must be unique and sorted")


def cv_f1(factory: ClassifierFactory, X: np.ndarray, y: np.ndarray,
          cv_folds: int, seed: int = 0) -> float:
    """Mean per-fold macro F1 under stratified k-fold."""
    folds = kfold_split(y, cv_folds, seed)
    scores = []
    for i, fold in enumerate(folds):
        train = np.concatenate([f for j, f in enumerate(folds) if j != i])
        clf = factory()
        clf.fit(X[train], y[train])
        scores.append(compute_metrics(y[fold], clf.predict(X[fold])).f1)
    return float(np.mean(scores))


def sbs(factory: ClassifierFactory, X: np.ndarray, y: np.ndarray, d: int,
        cv_folds: int = 5, seed: int = 0) -> FeatureSubset:
    """Greedily drop the feature whose removal scores best until d remain."""
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    if not 1 <= d < n:
        raise ValueError(f"d must be in [1, {n - 1}], got {d}")
    selected = list(range(n))
    trace: list[tuple[int, float]] = []
    while len(selected) > d:
        best_score, best_feat = -np.inf, None
        for f in selected:  # ascending, so ties keep the lowest index
            candidate = [s for s in selected if s != f]
            score = cv_f1(factory, X[:, candidate], y, cv_folds, seed)
            if score > best_score:
                best_score, best_feat = score, f
        selected.remove(best_feat)
        trace.append((best_feat, best_score))
    return FeatureSubset(selected=tuple(selected), trace=tuple(trace))


def rfecv(factory: ClassifierFactory, X: np.ndarray, y: np.ndarray,
          cv_folds: int = 5, seed: int = 0) -> FeatureSubset:
    """Eliminate the least important feature per round; keep the best size."""
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    probe = factory()
    if not hasattr(probe, "feature_importance"):
        raise ValueError("rfecv needs a classifier exposing feature_importance")

    current = list(range(n))
    sized: list[tuple[float, tuple[int, ...]]] = []
    trace: list[tuple[int, float]] = []
    while current:
        score = cv_f1(factory, X[:, current], y, cv_folds, seed)
        sized.append((score, tuple(current)))
        if len(current) == 1:
            break
        clf = factory()
        clf.fit(X[:, current], y)
        imp = np.asarray(clf.feature_importance())
        drop = current[int(np.argmin(imp))]  # argmin keeps the lowest index on ties
        current.remove(drop)
        trace.append((drop, score))

    best_score = max(s for s, _ in sized)
    # among equal scores prefer the smaller subset; sized is ordered large->small
    best_subset = [sub for s, sub in sized if s == best_score][-1]
    return FeatureSubset(selected=tuple(sorted(best_subset)), trace=tuple(trace))
