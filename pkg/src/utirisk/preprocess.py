"""Normalization, windowed statistical features, and physiological imputation.

Normalization is fit on the unlabelled corpus only: per flattened feature i,
lambda_i = max(epsilon, sqrt(E[x_i^2]) / 2), the stationary point of
x_i^2 - 4*lambda_i^2 = 0 in expectation.  A per-sample reading of that
condition would collapse every feature to its sign, so lambda is a corpus
statistic.  Normalized values are x_i / (2*lambda_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from utirisk.data.types import HOURS_PER_DAY, DailyActivityMatrix

EPSILON = 1e-8

# Six-hour windows in feature-row order: morning, afternoon, evening, night.
WINDOWS = ((6, 12), (12, 18), (18, 24), (0, 6))
N_FEATURE_ROWS = 11


@dataclass(frozen=True)
class NormalizationParams:
    lam: np.ndarray  # one lambda per flattened feature
    epsilon: float = EPSILON
    corpus_size: int = 0

    def __post_init__(self) -> None:
        if np.any(self.lam < self.epsilon):
            raise ValueError("every lambda must be >= epsilon")


def fit_lagrangian(
    unlabelled: list[DailyActivityMatrix] | np.ndarray,
    epsilon: float = EPSILON,
) -> NormalizationParams:
    """Fit per-feature lambda on the unlabelled corpus (matrices or a 2-D batch)."""
    if isinstance(unlabelled, np.ndarray):
        batch = np.asarray(unlabelled, dtype=float)
        if batch.ndim != 2:
            raise ValueError("array input must be (samples, features)")
    else:
        if not unlabelled:
            raise ValueError("cannot fit normalization on an empty corpus")
        batch = np.stack([m.grid.reshape(-1) for m in unlabelled]).astype(float)
    lam = np.maximum(epsilon, np.sqrt(np.mean(batch**2, axis=0)) / 2.0)
    return NormalizationParams(lam=lam, epsilon=epsilon, corpus_size=batch.shape[0])


def apply_normalization(x: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """x_hat = x / (2*lambda); accepts a single vector or a (samples, features) batch."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != params.lam.shape[0]:
        raise ValueError(
            f"feature dimension {x.shape[-1]} does not match {params.lam.shape[0]} lambdas"
        )
    return x / (2.0 * params.lam)


def save_normalization(params: NormalizationParams, path: str | Path) -> None:
    header = f"epsilon={params.epsilon!r} corpus_size={params.corpus_size}"
    np.savetxt(path, params.lam, fmt="%.17g", header=header)


def load_normalization(path: str | Path) -> NormalizationParams:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing normalization header")
    fields = dict(kv.split("=") for kv in lines[0][1:].split())
    lam = np.array([float(v) for v in lines[1:] if v.strip()])
    return NormalizationParams(
        lam=lam, epsilon=float(fields["epsilon"]), corpus_size=int(fields["corpus_size"])
    )


def _lower_median(values: np.ndarray) -> np.ndarray:
    """Column-wise lower median: element at index (n-1)//2 of the sorted values."""
    ordered = np.sort(values, axis=0)
    return ordered[(values.shape[0] - 1) // 2]


def windowed_features(matrix: DailyActivityMatrix | np.ndarray) -> np.ndarray:
    """11 x N summary of a 24 x N day grid.

    Rows 0-3: column sums over hours [6,12), [12,18), [18,24), [0,6).
    Rows 4-7: per-node max, min, mean, median (lower median) of the hourly counts.
    Rows 8-10: differences of consecutive windows (rows 1-0, 2-1, 3-2).
    """
    grid = matrix.grid if isinstance(matrix, DailyActivityMatrix) else np.asarray(matrix)
    grid = grid.astype(float)
    if grid.ndim != 2 or grid.shape[0] != HOURS_PER_DAY:
        raise ValueError(f"expected a {HOURS_PER_DAY} x N grid, got {grid.shape}")
    out = np.empty((N_FEATURE_ROWS, grid.shape[1]))
    for k, (lo, hi) in enumerate(WINDOWS):
        out[k] = grid[lo:hi].sum(axis=0)
    out[4] = grid.max(axis=0)
    out[5] = grid.min(axis=0)
    out[6] = grid.mean(axis=0)
    out[7] = _lower_median(grid)
    out[8:11] = out[1:4] - out[0:3]
    return out


@dataclass(frozen=True)
class PhysStats:
    """Per-channel mean/std of observed readings over the training split."""

    means: np.ndarray
    stds: np.ndarray
    channels: tuple[str, ...]


def fit_phys_stats(
    matrices: list[DailyActivityMatrix],
    channels: tuple[str, ...] | None = None,
) -> PhysStats:
    """Observed-value moments per channel; a channel never observed gets
    mean 0 and std 1 (the mask tells models to ignore it anyway)."""
    if not matrices:
        raise ValueError("cannot fit phys stats on an empty split")
    channels = channels or matrices[0].phys_channels
    columns: list[list[float]] = [[] for _ in channels]
    for m in matrices:
        if m.phys is None:
            continue
        if m.phys_channels != tuple(channels):
            raise ValueError("inconsistent phys channels across matrices")
        obs = m.phys_observed & np.isfinite(m.phys)
        for i in np.flatnonzero(obs):
            columns[i].append(float(m.phys[i]))
    means = np.array([np.mean(c) if c else 0.0 for c in columns])
    stds = np.array([max(float(np.std(c)), 1e-6) if c else 1.0 for c in columns])
    return PhysStats(means=means, stds=stds, channels=tuple(channels))


def impute_phys(matrix: DailyActivityMatrix, stats: PhysStats) -> np.ndarray:
    """Observed values pass through; missing ones take the training mean.

    Returns the imputed channel values followed by the 0/1 observed mask, so
    downstream models can weight imputed entries differently.
    """
    for ch in matrix.phys_channels:
        if ch not in stats.channels:
            raise ValueError(f"no training stats for channel {ch!r}")
    idx = [stats.channels.index(ch) for ch in matrix.phys_channels]
    means = stats.means[idx]
    if matrix.phys is None:
        values = means.copy()
        mask = np.zeros(len(means))
    else:
        mask = (matrix.phys_observed & np.isfinite(matrix.phys)).astype(float)
        values = np.where(mask > 0, matrix.phys, means)
    return np.concatenate([values, mask])


def phys_features(matrix: DailyActivityMatrix, stats: PhysStats) -> np.ndarray:
    """Model-input variant of impute_phys: values standardized by the
    training moments (imputed entries land exactly on 0), mask appended."""
    imputed = impute_phys(matrix, stats)
    k = len(matrix.phys_channels)
    values, mask = imputed[:k], imputed[k:]
    idx = [stats.channels.index(ch) for ch in matrix.phys_channels]
    z = (values - stats.means[idx]) / stats.stds[idx]
    return np.concatenate([z, mask])
