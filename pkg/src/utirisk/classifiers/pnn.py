"""Probabilistic neural network over latent features.

Kernel response: phi(x, K) = exp(-||x - K||^2 / (2 sigma^2)).  The negative
exponent is deliberate: with a positive sign phi is unbounded and the class
probability below loses all meaning, so the standard Parzen kernel is the
only reading under which a likelihood in [0,1] comes out.

Per class with kernels K_1..K_n:  P = sum(phi) / (sum(phi) + n - max(phi)*n).
All phi equal to c gives P = c; the response of the best-matching kernel
controls how much the remaining mass is discounted.

The reported two-class risk is P_uti / (P_uti + P_nonuti); if both class
scores underflow to zero the sample is genuinely out of support and the
report is an uninformative 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NON_UTI, UTI = 0, 1
SIGMA_FLOOR = 1e-3


@dataclass
class PnnModel:
    kernels: np.ndarray  # (count, latent_dim)
    kernel_classes: np.ndarray  # (count,) of {0, 1}
    sigma: float = 1.0
    classes: tuple[int, ...] = (NON_UTI, UTI)

    def __post_init__(self) -> None:
        self.kernels = np.atleast_2d(np.asarray(self.kernels, dtype=float))
        self.kernel_classes = np.asarray(self.kernel_classes, dtype=int)
        if len(self.kernels) != len(self.kernel_classes):
            raise ValueError("kernel/class count mismatch")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def latent_dim(self) -> int:
        return self.kernels.shape[1]

    def copy(self) -> "PnnModel":
        return PnnModel(self.kernels.copy(), self.kernel_classes.copy(),
                        self.sigma, self.classes)


def fit_pnn(latents: np.ndarray, y: np.ndarray, sigma: float = 1.0) -> PnnModel:
    """One kernel per labelled sample, tagged with its class."""
    latents = np.atleast_2d(np.asarray(latents, dtype=float))
    y = np.asarray(y, dtype=int)
    if len(latents) != len(y):
        raise ValueError("latents and labels differ in length")
    if len(latents) == 0:
        raise ValueError("need at least one labelled sample")
    return PnnModel(kernels=latents.copy(), kernel_classes=y.copy(), sigma=sigma)


def pnn_phi(x: np.ndarray, kernels: np.ndarray, sigma: float) -> np.ndarray:
    """Kernel responses for one input: exp(-||x-K||^2 / (2 sigma^2)), in (0,1]."""
    x = np.asarray(x, dtype=float)
    kernels = np.atleast_2d(np.asarray(kernels, dtype=float))
    d2 = np.sum((kernels - x) ** 2, axis=1)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def pnn_probability(x: np.ndarray, class_kernels: np.ndarray, sigma: float) -> float:
    """Single-class likelihood from that class's kernels."""
    phi = pnn_phi(x, class_kernels, sigma)
    n = len(phi)
    if n == 0:
        raise ValueError("a class needs at least one kernel")
    s = float(phi.sum())
    return s / (s + n - float(phi.max()) * n)


def _batch_phi(z: np.ndarray, kernels: np.ndarray, sigma: float) -> np.ndarray:
    diff = z[:, None, :] - kernels[None, :, :]
    d2 = np.sum(diff * diff, axis=2)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def class_probabilities(model: PnnModel, z: np.ndarray) -> np.ndarray:
    """(batch, classes) matrix of per-class P values."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[1] != model.latent_dim:
        raise ValueError(f"expected latent dim {model.latent_dim}, got {z.shape[1]}")
    phi = _batch_phi(z, model.kernels, model.sigma)
    out = np.empty((len(z), len(model.classes)))
    for c, cls in enumerate(model.classes):
        cols = model.kernel_classes == cls
        n = int(cols.sum())
        if n == 0:
            raise ValueError(f"class {cls} has no kernels")
        sub = phi[:, cols]
        s = sub.sum(axis=1)
        out[:, c] = s / (s + n - sub.max(axis=1) * n)
    return out


def risk_probability(model: PnnModel, z: np.ndarray) -> np.ndarray:
    """Two-class report P_uti / (P_uti + P_nonuti); both-zero guards to 0.5."""
    p = class_probabilities(model, z)
    total = p.sum(axis=1)
    uti = model.classes.index(UTI)
    return np.where(total > 0, p[:, uti] / np.where(total > 0, total, 1.0), 0.5)


def predict_pnn(model: PnnModel, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(predicted classes, row-normalized class scores)."""
    p = class_probabilities(model, z)
    total = p.sum(axis=1, keepdims=True)
    scores = np.where(total > 0, p / np.where(total > 0, total, 1.0),
                      1.0 / p.shape[1])
    idx = np.argmax(p, axis=1)
    return np.asarray(model.classes)[idx], scores


def pnn_add_kernel(model: PnnModel, latent: np.ndarray, cls: int) -> PnnModel:
    """New model with one extra kernel; existing kernels and sigma untouched."""
    latent = np.asarray(latent, dtype=float).reshape(-1)
    if latent.shape[0] != model.latent_dim:
        raise ValueError(f"kernel length {latent.shape[0]} != latent dim {model.latent_dim}")
    if cls not in model.classes:
        raise ValueError(f"unknown class {cls}")
    return PnnModel(
        kernels=np.vstack([model.kernels, latent[None, :]]),
        kernel_classes=np.append(model.kernel_classes, cls),
        sigma=model.sigma,
        classes=model.classes,
    )
