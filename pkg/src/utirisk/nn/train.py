"""Mini-batch training loop: deterministic per seed, divergence is an error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utirisk.nn.losses import LOSSES, get_loss
from utirisk.nn.network import Network
from utirisk.nn.optim import make_optimizer


class TrainingError(RuntimeError):
    """Raised when a loss or activation goes non-finite during training."""


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "adam"
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    loss: str = "mse"
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0
    max_iterations: int | None = 5000  # optimizer-step cap across all epochs

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1 when set")


def train(net: Network, inputs: np.ndarray, targets: np.ndarray,
          config: TrainConfig | None = None) -> list[float]:
    """Train in place; returns the per-epoch mean loss curve."""
    cfg = config or TrainConfig()
    x = np.asarray(inputs)
    t = np.asarray(targets)
    if len(x) == 0:
        raise ValueError("training data must be nonempty")
    if len(x) != len(t):
        raise ValueError("inputs and targets differ in length")

    loss_fn = get_loss(cfg.loss)
    opt = make_optimizer(cfg.optimizer, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
    rng = np.random.default_rng(cfg.seed)
    curve: list[float] = []
    steps = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(x))
        total, seen = 0.0, 0
        for lo in range(0, len(x), cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            out = net.forward(x[idx])
            if not np.all(np.isfinite(out)):
                raise TrainingError(
                    f"non-finite activations at epoch {epoch}, step {steps}")
            loss, dout = loss_fn(out, t[idx])
            if not np.isfinite(loss):
                raise TrainingError(f"loss diverged at epoch {epoch}, step {steps}: {loss}")
            total += loss * len(idx)
            seen += len(idx)
            net.zero_grad()
            net.backward(dout)
            opt.step(net.params(), net.grads())
            steps += 1
            if cfg.max_iterations is not None and steps >= cfg.max_iterations:
                break
        curve.append(total / seen)
        if cfg.max_iterations is not None and steps >= cfg.max_iterations:
            break
    return curve
