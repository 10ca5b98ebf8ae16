"""Unsupervised extractors: latent geometry, training behavior, determinism."""

import numpy as np
import pytest

from utirisk.extractors import (
    build_autoencoder,
    encode,
    latent_dim,
    reconstruct,
    reconstruction_mse,
    train_autoencoder,
    train_rbm,
)
from utirisk.nn.train import TrainConfig


def structured_batch(n=80, seed=0):
    """Half the columns share a latent factor, half are low-level noise."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.2, 1.5, size=(n, 1))
    return np.hstack([base * rng.uniform(0.5, 2.0, size=12),
                      rng.uniform(0.0, 0.3, size=(n, 12))])


class TestLatentDim:
    def test_fixed_sizes(self):
        assert latent_dim("ae") == 171
        assert latent_dim("de") == 20
        assert latent_dim("cae") == 24 * 8 * 38 == 7296

    def test_cae_follows_grid(self):
        assert latent_dim("cae", input_dim=24, grid=(6, 4)) == 6 * 4 * 38

    def test_rbm_follows_hidden_dim(self):
        assert latent_dim("rbm", hidden_dim=10) == 10

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            latent_dim("pca")


class TestBuild:
    @pytest.mark.parametrize("kind,input_dim,grid", [
        ("ae", 192, (24, 8)), ("de", 192, (24, 8)), ("de", 195, (24, 8)),
        ("cae", 192, (24, 8)),
    ])
    def test_encode_shape_at_epoch_zero(self, kind, input_dim, grid):
        model = build_autoencoder(kind, input_dim, grid, seed=0)
        z = model.encode(np.zeros((3, input_dim)))
        assert z.shape == (3, latent_dim(kind, input_dim, grid))

    def test_cae_rejects_non_grid_width(self):
        with pytest.raises(ValueError):
            build_autoencoder("cae", 195, (24, 8))

    def test_encode_rejects_wrong_width(self):
        model = build_autoencoder("de", 24)
        with pytest.raises(ValueError):
            model.encode(np.zeros((2, 25)))

    def test_copy_is_independent(self):
        model = build_autoencoder("de", 24, seed=0)
        dup = model.copy()
        params = dup.encoder.params()
        name = sorted(params)[0]
        params[name] += 1.0
        dup.encoder.set_params(params)
        x = np.random.default_rng(0).normal(size=(4, 24))
        assert not np.allclose(model.encode(x), dup.encode(x))


class TestTrainAutoencoder:
    def test_de_loss_falls_and_beats_untrained(self):
        batch = structured_batch().astype(np.float32)
        model = train_autoencoder(batch, "de",
                                  TrainConfig(epochs=40, max_iterations=None), seed=0)
        assert model.loss_curve[-1] < 0.1 * model.loss_curve[0]
        fresh = build_autoencoder("de", batch.shape[1], seed=0)
        assert reconstruction_mse(model, batch) < 0.1 * reconstruction_mse(fresh, batch)

    def test_ae_single_layer_trains(self):
        batch = structured_batch().astype(np.float32)
        model = train_autoencoder(batch, "ae", TrainConfig(epochs=10), seed=0)
        assert model.latent_dim == 171
        assert model.loss_curve[-1] < model.loss_curve[0]

    def test_cae_trains_on_grid(self):
        rng = np.random.default_rng(1)
        batch = rng.uniform(0, 2, size=(30, 24)).astype(np.float32)
        model = train_autoencoder(batch, "cae",
                                  TrainConfig(epochs=8, max_iterations=None),
                                  grid=(6, 4), seed=0)
        assert model.latent_dim == 6 * 4 * 38
        assert model.loss_curve[-1] < model.loss_curve[0]
        assert reconstruct(model, batch).shape == batch.shape

    def test_same_seed_same_model(self):
        batch = structured_batch().astype(np.float32)
        cfg = TrainConfig(epochs=5)
        a = train_autoencoder(batch, "de", cfg, seed=3)
        b = train_autoencoder(batch, "de", cfg, seed=3)
        for k, v in a.encoder.params().items():
            assert np.array_equal(v, b.encoder.params()[k])

    def test_rejects_bad_batch(self):
        with pytest.raises(ValueError):
            train_autoencoder(np.zeros(10, dtype=np.float32), "de")
        with pytest.raises(ValueError):
            train_autoencoder(np.zeros((0, 10), dtype=np.float32), "de")

    def test_reconstruct_requires_decoder(self):
        model = build_autoencoder("de", 24)
        model.decoder = None
        with pytest.raises(ValueError):
            reconstruct(model, np.zeros((1, 24)))


class TestRbm:
    def test_free_energy_hump_then_fall(self):
        batch = structured_batch()
        model = train_rbm(batch, hidden_dim=16, config=TrainConfig(lr=0.1, epochs=120))
        curve = model.free_energy_curve
        assert len(curve) == 120
        assert all(np.isfinite(curve))
        assert max(curve) > curve[0]
        assert curve[-1] < max(curve)

    def test_encode_is_hidden_probabilities(self):
        batch = structured_batch()
        model = train_rbm(batch, hidden_dim=16, config=TrainConfig(lr=0.1, epochs=20))
        h = model.encode(batch)
        assert h.shape == (len(batch), 16)
        assert h.min() >= 0.0 and h.max() <= 1.0

    def test_scale_lands_visibles_in_unit_range(self):
        batch = structured_batch() * 50.0
        model = train_rbm(batch, hidden_dim=8, config=TrainConfig(lr=0.1, epochs=5))
        assert np.all(batch.max(axis=0) / model.scale <= 1.0 + 1e-12)

    def test_same_seed_same_weights(self):
        batch = structured_batch()
        cfg = TrainConfig(lr=0.1, epochs=10, seed=7)
        a = train_rbm(batch, hidden_dim=8, config=cfg)
        b = train_rbm(batch, hidden_dim=8, config=cfg)
        assert np.array_equal(a.W, b.W)
        assert np.array_equal(a.hbias, b.hbias)

    def test_encode_rejects_wrong_width(self):
        model = train_rbm(structured_batch(), hidden_dim=8,
                          config=TrainConfig(lr=0.1, epochs=2))
        with pytest.raises(ValueError):
            model.encode(np.zeros((1, 5)))


class TestEncodeDispatch:
    def test_pure_and_shared(self):
        batch = structured_batch().astype(np.float32)
        ae = train_autoencoder(batch, "de", TrainConfig(epochs=5), seed=0)
        rbm = train_rbm(batch, hidden_dim=8, config=TrainConfig(lr=0.1, epochs=5))
        x = batch[:4]
        for model in (ae, rbm):
            first = encode(model, x)
            again = encode(model, x)
            assert np.array_equal(first, again)
            assert first.shape == (4, model.latent_dim)
