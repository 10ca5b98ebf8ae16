"""Layers for the minimal reverse-mode engine.

Tensors are plain numpy arrays with a leading batch axis.  Each layer owns
its parameters and caches what backward() needs; gradients accumulate into
``grads`` until ``zero_grad``.  Weights start Glorot-uniform, biases zero.
"""

from __future__ import annotations

import numpy as np

ACTIVATIONS = ("relu", "sigmoid", "tanh", "identity")


def act_forward(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "sigmoid":
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    if name == "tanh":
        return np.tanh(z)
    if name == "identity":
        return z
    raise ValueError(f"unknown activation {name!r}")


def _act_backward(name: str, z: np.ndarray, a: np.ndarray, da: np.ndarray) -> np.ndarray:
    if name == "relu":
        return da * (z > 0)
    if name == "sigmoid":
        return da * a * (1.0 - a)
    if name == "tanh":
        return da * (1.0 - a * a)
    return da


class Layer:
    """Base: parameter-free pass-through."""

    params: dict[str, np.ndarray]
    grads: dict[str, np.ndarray]

    def __init__(self) -> None:
        self.params = {}
        self.grads = {}

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_grad(self) -> None:
        for k in self.params:
            self.grads[k] = np.zeros_like(self.params[k])


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...],
                   fan_in: int, fan_out: int, dtype) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Dense(Layer):
    def __init__(self, in_dim: int, out_dim: int, activation: str = "identity",
                 rng: np.random.Generator | None = None, dtype=np.float32):
        super().__init__()
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        rng = rng or np.random.default_rng(0)
        self.in_dim, self.out_dim, self.activation = in_dim, out_dim, activation
        self.params = {
            "W": glorot_uniform(rng, (in_dim, out_dim), in_dim, out_dim, dtype),
            "b": np.zeros(out_dim, dtype=dtype),
        }
        self.zero_grad()

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ValueError(f"dense expects (batch, {self.in_dim}), got {x.shape}")
        self._x = x
        self._z = x @ self.params["W"] + self.params["b"]
        self._a = act_forward(self.activation, self._z)
        return self._a

    def backward(self, dout: np.ndarray) -> np.ndarray:
        dz = _act_backward(self.activation, self._z, self._a, dout)
        self.grads["W"] += (self._x.T @ dz).astype(self.params["W"].dtype)
        self.grads["b"] += dz.sum(axis=0).astype(self.params["b"].dtype)
        return dz @ self.params["W"].T


class Conv2D(Layer):
    """3x3 convolution, stride 1, zero same-padding; channels-last layout.

    Input (batch, H, W, C_in) -> output (batch, H, W, C_out): same-padding
    keeps the 24 x N grid extents so stacked conv latents stay H*W*C.
    """

    KERNEL = 3

    def __init__(self, in_channels: int, out_channels: int, activation: str = "identity",
                 rng: np.random.Generator | None = None, dtype=np.float32):
        super().__init__()
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        rng = rng or np.random.default_rng(0)
        self.in_channels, self.out_channels, self.activation = in_channels, out_channels, activation
        k = self.KERNEL
        fan_in, fan_out = k * k * in_channels, k * k * out_channels
        self.params = {
            "W": glorot_uniform(rng, (k, k, in_channels, out_channels), fan_in, fan_out, dtype),
            "b": np.zeros(out_channels, dtype=dtype),
        }
        self.zero_grad()

    def _cols(self, xp: np.ndarray, h: int, w: int) -> np.ndarray:
        # (batch, H, W, k*k*C_in) of 3x3 neighbourhoods from the padded input
        k = self.KERNEL
        slices = [xp[:, dy:dy + h, dx:dx + w, :] for dy in range(k) for dx in range(k)]
        return np.concatenate(slices, axis=3)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4 or x.shape[3] != self.in_channels:
            raise ValueError(f"conv2d expects (batch, H, W, {self.in_channels}), got {x.shape}")
        b, h, w, c = x.shape
        xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
        self._cols_cache = self._cols(xp, h, w)
        self._shape = (b, h, w, c)
        wmat = self.params["W"].reshape(-1, self.out_channels)
        self._z = self._cols_cache @ wmat + self.params["b"]
        self._a = act_forward(self.activation, self._z)
        return self._a

    def backward(self, dout: np.ndarray) -> np.ndarray:
        b, h, w, c = self._shape
        k = self.KERNEL
        dz = _act_backward(self.activation, self._z, self._a, dout)
        cols2d = self._cols_cache.reshape(-1, k * k * self.in_channels)
        dz2d = dz.reshape(-1, self.out_channels)
        self.grads["W"] += (cols2d.T @ dz2d).reshape(self.params["W"].shape).astype(
            self.params["W"].dtype)
        self.grads["b"] += dz2d.sum(axis=0).astype(self.params["b"].dtype)

        dcols = dz @ self.params["W"].reshape(-1, self.out_channels).T
        dxp = np.zeros((b, h + 2, w + 2, self.in_channels), dtype=dout.dtype)
        for idx, (dy, dx) in enumerate((dy, dx) for dy in range(k) for dx in range(k)):
            lo = idx * self.in_channels
            dxp[:, dy:dy + h, dx:dx + w, :] += dcols[:, :, :, lo:lo + self.in_channels]
        return dxp[:, 1:1 + h, 1:1 + w, :]


class Flatten(Layer):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return dout.reshape(self._shape)


class Reshape(Layer):
    def __init__(self, shape: tuple[int, ...]):
        super().__init__()
        self.shape = tuple(shape)

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._shape = x.shape
        return x.reshape((x.shape[0],) + self.shape)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return dout.reshape(self._shape)
