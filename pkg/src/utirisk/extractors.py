"""Unsupervised feature extractors trained on the unlabelled corpus.

Four kinds: a single-hidden-layer autoencoder (latent 171), a deep
autoencoder (128 -> 64 -> 20, decoder 64 -> 128 -> input), a convolutional
autoencoder over the 24 x N grid (16 then 38 filters, latent 24*N*38;
decoder 8 then 1), and a CD-1 restricted Boltzmann machine.  Autoencoders
reconstruct their (normalized) input under mse; hidden layers are relu with
identity bottlenecks and outputs.  Dense kinds scale first/last widths with
the input length, so appending physiological channels just widens the ends;
latent sizes stay fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from utirisk.nn.layers import act_forward
from utirisk.nn.network import (
    Conv2DSpec,
    DenseSpec,
    FlattenSpec,
    Network,
    ReshapeSpec,
)
from utirisk.nn.train import TrainConfig, TrainingError, train

EXTRACTOR_KINDS = ("ae", "de", "cae", "rbm")

AE_LATENT = 171
DE_LATENT = 20
CAE_FILTERS = (16, 38)
CAE_DECODER_FILTERS = (8, 1)
DEFAULT_GRID = (24, 8)


def latent_dim(kind: str, input_dim: int = 192, grid: tuple[int, int] = DEFAULT_GRID,
               hidden_dim: int = 64) -> int:
    if kind == "ae":
        return AE_LATENT
    if kind == "de":
        return DE_LATENT
    if kind == "cae":
        return grid[0] * grid[1] * CAE_FILTERS[-1]
    if kind == "rbm":
        return hidden_dim
    raise ValueError(f"unknown extractor kind {kind!r}")


def _autoencoder_specs(kind: str, input_dim: int, grid: tuple[int, int]):
    if kind == "ae":
        enc = [DenseSpec(input_dim, AE_LATENT, "identity")]
        dec = [DenseSpec(AE_LATENT, input_dim, "identity")]
    elif kind == "de":
        enc = [DenseSpec(input_dim, 128, "relu"),
               DenseSpec(128, 64, "relu"),
               DenseSpec(64, DE_LATENT, "identity")]
        dec = [DenseSpec(DE_LATENT, 64, "relu"),
               DenseSpec(64, 128, "relu"),
               DenseSpec(128, input_dim, "identity")]
    elif kind == "cae":
        h, w = grid
        if input_dim != h * w:
            raise ValueError(f"cae input must be the bare {h}x{w} grid "
                             f"({h * w} features), got {input_dim}")
        enc = [ReshapeSpec((h, w, 1)),
               Conv2DSpec(1, CAE_FILTERS[0], "relu"),
               Conv2DSpec(CAE_FILTERS[0], CAE_FILTERS[1], "relu"),
               FlattenSpec()]
        dec = [ReshapeSpec((h, w, CAE_FILTERS[1])),
               Conv2DSpec(CAE_FILTERS[1], CAE_DECODER_FILTERS[0], "relu"),
               Conv2DSpec(CAE_DECODER_FILTERS[0], CAE_DECODER_FILTERS[1], "identity"),
               FlattenSpec()]
    else:
        raise ValueError(f"unknown autoencoder kind {kind!r}")
    return enc, dec


@dataclass
class EncoderModel:
    kind: str
    encoder: Network
    decoder: Network | None
    latent_dim: int
    input_dim: int
    grid: tuple[int, int] = DEFAULT_GRID
    loss_curve: list[float] = field(default_factory=list)

    def encode(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.input_dim:
            raise ValueError(f"expected {self.input_dim} features, got {x.shape[1]}")
        return self.encoder.forward(x)

    def copy(self) -> "EncoderModel":
        return EncoderModel(
            kind=self.kind,
            encoder=self.encoder.copy(),
            decoder=self.decoder.copy() if self.decoder is not None else None,
            latent_dim=self.latent_dim,
            input_dim=self.input_dim,
            grid=self.grid,
            loss_curve=list(self.loss_curve),
        )


def build_autoencoder(kind: str, input_dim: int = 192, grid: tuple[int, int] = DEFAULT_GRID,
                      seed: int = 0, dtype=np.float32) -> EncoderModel:
    """Initialized (untrained) autoencoder; encode is shape-correct at epoch 0."""
    enc_spec, dec_spec = _autoencoder_specs(kind, input_dim, grid)
    rng = np.random.default_rng(seed)
    enc = Network(enc_spec, seed=int(rng.integers(2**31)), dtype=dtype)
    dec = Network(dec_spec, seed=int(rng.integers(2**31)), dtype=dtype)
    return EncoderModel(kind=kind, encoder=enc, decoder=dec,
                        latent_dim=latent_dim(kind, input_dim, grid),
                        input_dim=input_dim, grid=grid)


def train_autoencoder(batch: np.ndarray, kind: str, config: TrainConfig | None = None,
                      grid: tuple[int, int] = DEFAULT_GRID, seed: int = 0) -> EncoderModel:
    """Train kind in {ae, de, cae} to reconstruct the given normalized batch."""
    batch = np.asarray(batch, dtype=np.float32)
    if batch.ndim != 2 or batch.shape[0] == 0:
        raise ValueError("batch must be a nonempty (samples, features) array")
    cfg = config or TrainConfig()
    model = build_autoencoder(kind, batch.shape[1], grid, seed=seed)
    full = Network(model.encoder.spec + model.decoder.spec, seed=0, dtype=np.float32)
    full.set_params({**{k: v for k, v in _prefixed(model.encoder, 0).items()},
                     **_prefixed(model.decoder, len(model.encoder.spec))})
    curve = train(full, batch, batch, cfg)
    n_enc = len(model.encoder.spec)
    all_params = full.params()
    model.encoder.set_params(_unprefix(all_params, 0, n_enc))
    model.decoder.set_params(_unprefix(all_params, n_enc, len(full.spec), base=n_enc))
    model.loss_curve = curve
    return model


def _prefixed(net: Network, offset: int) -> dict[str, np.ndarray]:
    out = {}
    for k, v in net.params().items():
        idx = int(k.split(".")[0][len("layer"):])
        out[f"layer{idx + offset}.{k.split('.')[1]}"] = v
    return out


def _unprefix(params: dict[str, np.ndarray], lo: int, hi: int, base: int = 0) -> dict[str, np.ndarray]:
    out = {}
    for k, v in params.items():
        idx = int(k.split(".")[0][len("layer"):])
        if lo <= idx < hi:
            out[f"layer{idx - base}.{k.split('.')[1]}"] = v
    return out


def reconstruct(model: EncoderModel, x: np.ndarray) -> np.ndarray:
    if model.decoder is None:
        raise ValueError(f"{model.kind} has no decoder")
    return model.decoder.forward(model.encode(x))


def reconstruction_mse(model: EncoderModel, x: np.ndarray) -> float:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return float(np.mean((reconstruct(model, x) - x) ** 2))


@dataclass
class RbmModel:
    W: np.ndarray  # (visible, hidden)
    vbias: np.ndarray
    hbias: np.ndarray
    hidden_dim: int
    scale: np.ndarray  # per-feature corpus max used to land visibles in [0,1]
    free_energy_curve: list[float] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return "rbm"

    @property
    def latent_dim(self) -> int:
        return self.hidden_dim

    @property
    def input_dim(self) -> int:
        return self.W.shape[0]

    def _visible(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.W.shape[0]:
            raise ValueError(f"expected {self.W.shape[0]} features, got {x.shape[1]}")
        return x / self.scale

    def encode(self, x: np.ndarray) -> np.ndarray:
        """Hidden-unit activation probabilities for (rescaled) visibles."""
        return act_forward("sigmoid", self._visible(x) @ self.W + self.hbias)

    def free_energy(self, x: np.ndarray) -> np.ndarray:
        v = self._visible(x)
        pre = v @ self.W + self.hbias
        return -(v @ self.vbias) - np.sum(np.logaddexp(0.0, pre), axis=1)


def train_rbm(batch: np.ndarray, hidden_dim: int = 64,
              config: TrainConfig | None = None) -> RbmModel:
    """Contrastive-divergence-1 on visibles rescaled to [0,1] by per-feature max.

    The tracked mean free energy rises for a few dozen epochs while the
    biases absorb the marginals, then falls as weights pick up structure;
    the default epoch count is chosen past that hump.
    """
    cfg = config or TrainConfig(lr=0.1, epochs=150)
    batch = np.asarray(batch, dtype=float)
    if batch.ndim != 2 or batch.shape[0] == 0:
        raise ValueError("batch must be a nonempty (samples, features) array")
    scale = np.maximum(batch.max(axis=0), 1e-8)
    v_all = batch / scale

    rng = np.random.default_rng(cfg.seed)
    n_vis = batch.shape[1]
    # vbias starts at the logit of each feature's mean so the first fantasy
    # samples already match the marginals and CD-1 spends its updates on
    # structure instead.
    marginal = np.clip(v_all.mean(axis=0), 1e-3, 1.0 - 1e-3)
    model = RbmModel(
        W=rng.normal(0.0, 0.01, (n_vis, hidden_dim)),
        vbias=np.log(marginal / (1.0 - marginal)),
        hbias=np.zeros(hidden_dim),
        hidden_dim=hidden_dim,
        scale=scale,
    )
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(v_all))
        for lo in range(0, len(v_all), cfg.batch_size):
            v0 = v_all[order[lo:lo + cfg.batch_size]]
            h0 = act_forward("sigmoid", v0 @ model.W + model.hbias)
            h_sample = (rng.random(h0.shape) < h0).astype(float)
            v1 = act_forward("sigmoid", h_sample @ model.W.T + model.vbias)
            h1 = act_forward("sigmoid", v1 @ model.W + model.hbias)
            n = len(v0)
            model.W += cfg.lr * (v0.T @ h0 - v1.T @ h1) / n
            model.vbias += cfg.lr * (v0 - v1).mean(axis=0)
            model.hbias += cfg.lr * (h0 - h1).mean(axis=0)
        fe = float(np.mean(model.free_energy(batch)))
        if not np.isfinite(fe):
            raise TrainingError(f"rbm free energy diverged at epoch {epoch}")
        model.free_energy_curve.append(fe)
    return model


def encode(model: EncoderModel | RbmModel, x: np.ndarray) -> np.ndarray:
    """Latent features for a normalized input batch; pure in (params, input)."""
    return model.encode(x)
