"""SGD and Adam over named parameter dicts."""

from __future__ import annotations

import numpy as np


class SGD:
    def __init__(self, lr: float = 0.01):
        if lr <= 0:
            raise ValueError("lr must be positive")
        self.lr = lr

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        for k, p in params.items():
            p -= (self.lr * grads[k]).astype(p.dtype)


class Adam:
    def __init__(self, lr: float = 0.01, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        if lr <= 0:
            raise ValueError("lr must be positive")
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for k, p in params.items():
            g = grads[k].astype(np.float64)
            if k not in self.m:
                self.m[k] = np.zeros_like(g)
                self.v[k] = np.zeros_like(g)
            self.m[k] = b1 * self.m[k] + (1 - b1) * g
            self.v[k] = b2 * self.v[k] + (1 - b2) * g * g
            mhat = self.m[k] / (1 - b1**self.t)
            vhat = self.v[k] / (1 - b2**self.t)
            p -= (self.lr * mhat / (np.sqrt(vhat) + self.eps)).astype(p.dtype)


def make_optimizer(name: str, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                   eps: float = 1e-8):
    if name == "sgd":
        return SGD(lr)
    if name == "adam":
        return Adam(lr, beta1, beta2, eps)
    raise ValueError(f"unknown optimizer {name!r}")
