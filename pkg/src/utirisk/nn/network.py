"""Network assembly from layer specs, with named parameter access."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utirisk.nn.layers import Conv2D, Dense, Flatten, Layer, Reshape


@dataclass(frozen=True)
class DenseSpec:
    in_dim: int
    out_dim: int
    activation: str = "identity"


@dataclass(frozen=True)
class Conv2DSpec:
    in_channels: int
    out_channels: int
    activation: str = "identity"


@dataclass(frozen=True)
class FlattenSpec:
    pass


@dataclass(frozen=True)
class ReshapeSpec:
    shape: tuple[int, ...]


LayerSpec = DenseSpec | Conv2DSpec | FlattenSpec | ReshapeSpec


def validate_spec(spec: list[LayerSpec]) -> None:
    if not spec:
        raise ValueError("a network needs at least one layer")
    width: int | None = None  # dense width tracked through the chain
    channels: int | None = None
    for s in spec:
        if isinstance(s, DenseSpec):
            if s.in_dim <= 0 or s.out_dim <= 0:
                raise ValueError(f"nonpositive dense dims in {s}")
            if width is not None and width != s.in_dim:
                raise ValueError(f"dense in_dim {s.in_dim} does not follow width {width}")
            width, channels = s.out_dim, None
        elif isinstance(s, Conv2DSpec):
            if s.in_channels <= 0 or s.out_channels <= 0:
                raise ValueError(f"nonpositive conv channels in {s}")
            if channels is not None and channels != s.in_channels:
                raise ValueError(f"conv in_channels {s.in_channels} does not follow {channels}")
            width, channels = None, s.out_channels
        elif isinstance(s, ReshapeSpec):
            channels = s.shape[-1] if len(s.shape) == 3 else None
            width = None
        elif isinstance(s, FlattenSpec):
            channels = None
            width = None


class Network:
    """Sequential network; deterministic init from (spec, seed, dtype)."""

    def __init__(self, spec: list[LayerSpec], seed: int = 0, dtype=np.float32):
        validate_spec(spec)
        self.spec = list(spec)
        self.dtype = dtype
        rng = np.random.default_rng(seed)
        self.layers: list[Layer] = []
        for s in spec:
            if isinstance(s, DenseSpec):
                self.layers.append(Dense(s.in_dim, s.out_dim, s.activation, rng, dtype))
            elif isinstance(s, Conv2DSpec):
                self.layers.append(Conv2D(s.in_channels, s.out_channels, s.activation, rng, dtype))
            elif isinstance(s, FlattenSpec):
                self.layers.append(Flatten())
            elif isinstance(s, ReshapeSpec):
                self.layers.append(Reshape(s.shape))
            else:
                raise ValueError(f"unknown layer spec {s!r}")

    def forward(self, x: np.ndarray) -> np.ndarray:
        out = np.asarray(x, dtype=self.dtype)
        for layer in self.layers:
            out = layer.forward(out)
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        grad = dout
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def params(self) -> dict[str, np.ndarray]:
        """Named parameter views: 'layer{i}.{name}' in forward order."""
        return {f"layer{i}.{k}": v
                for i, layer in enumerate(self.layers) for k, v in layer.params.items()}

    def grads(self) -> dict[str, np.ndarray]:
        return {f"layer{i}.{k}": v
                for i, layer in enumerate(self.layers) for k, v in layer.grads.items()}

    def set_params(self, params: dict[str, np.ndarray]) -> None:
        own = self.params()
        if set(own) != set(params):
            raise ValueError(f"parameter names differ: {sorted(set(own) ^ set(params))}")
        for i, layer in enumerate(self.layers):
            for k in layer.params:
                new = np.asarray(params[f"layer{i}.{k}"])
                if new.shape != layer.params[k].shape:
                    raise ValueError(f"shape mismatch for layer{i}.{k}")
                layer.params[k] = new.astype(layer.params[k].dtype)

    def copy(self) -> "Network":
        dup = Network(self.spec, seed=0, dtype=self.dtype)
        dup.set_params({k: v.copy() for k, v in self.params().items()})
        return dup
