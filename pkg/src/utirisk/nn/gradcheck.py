"""Central finite-difference verification of backpropagated gradients.

Checks run in float64: single-precision rounding alone exceeds the 1e-4
relative tolerance that separates a correct gradient from a wrong one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utirisk.nn.losses import get_loss
from utirisk.nn.network import (
    Conv2DSpec,
    DenseSpec,
    FlattenSpec,
    Network,
    ReshapeSpec,
)


@dataclass(frozen=True)
class GradCheckResult:
    probes: int
    max_rel_error: float
    worst_param: str

    def ok(self, tol: float = 1e-4) -> bool:
        return self.max_rel_error < tol


def check_gradients(net: Network, x: np.ndarray, t: np.ndarray, loss: str = "mse",
                    h: float = 1e-5, probes_per_param: int = 10,
                    seed: int = 0) -> GradCheckResult:
    """Compare analytic gradients with central differences on sampled entries.

    Relative error is |a - n| / max(1e-8, |a| + |n|), the symmetric form that
    stays meaningful when one side is near zero.
    """
    if net.dtype != np.float64:
        raise ValueError("gradcheck requires a float64 network")
    loss_fn = get_loss(loss)
    rng = np.random.default_rng(seed)

    out = net.forward(x)
    _, dout = loss_fn(out, t)
    net.zero_grad()
    net.backward(dout)
    analytic = {k: v.copy() for k, v in net.grads().items()}

    params = net.params()
    worst, worst_param, probes = 0.0, "", 0
    for name, p in params.items():
        flat = p.reshape(-1)
        n_idx = min(probes_per_param, flat.size)
        for i in rng.choice(flat.size, size=n_idx, replace=False):
            orig = flat[i]
            flat[i] = orig + h
            lp, _ = loss_fn(net.forward(x), t)
            flat[i] = orig - h
            lm, _ = loss_fn(net.forward(x), t)
            flat[i] = orig
            numeric = (lp - lm) / (2.0 * h)
            a = float(analytic[name].reshape(-1)[i])
            rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            probes += 1
            if rel > worst:
                worst, worst_param = rel, name
    return GradCheckResult(probes=probes, max_rel_error=worst, worst_param=worst_param)


def standard_suite(seed: int = 0, probes_per_param: int = 15) -> list[tuple[str, GradCheckResult]]:
    """Gradient checks covering every layer type, activation, and loss."""
    rng = np.random.default_rng(seed)
    cases = [
        ("dense relu/tanh/sigmoid/identity + mse",
         [DenseSpec(7, 16, "relu"), DenseSpec(16, 12, "tanh"),
          DenseSpec(12, 9, "sigmoid"), DenseSpec(9, 5, "identity")],
         (4, 7), (4, 5), "mse"),
        ("conv relu/tanh + dense sigmoid + bce",
         [ReshapeSpec((6, 4, 1)), Conv2DSpec(1, 3, "relu"), Conv2DSpec(3, 2, "tanh"),
          FlattenSpec(), DenseSpec(48, 10, "sigmoid")],
         (3, 24), (3, 10), "bce"),
        ("linear bottleneck + mse",
         [DenseSpec(24, 16, "identity"), DenseSpec(16, 24, "identity")],
         (5, 24), (5, 24), "mse"),
        ("conv identity + mse",
         [ReshapeSpec((4, 4, 2)), Conv2DSpec(2, 2, "identity"), FlattenSpec()],
         (3, 32), (3, 32), "mse"),
    ]
    out = []
    for name, spec, xshape, tshape, loss in cases:
        net = Network(spec, seed=seed, dtype=np.float64)
        x = rng.normal(size=xshape)
        t = rng.uniform(0.05, 0.95, size=tshape) if loss == "bce" else rng.normal(size=tshape)
        out.append((name, check_gradients(net, x, t, loss=loss,
                                          probes_per_param=probes_per_param, seed=seed)))
    return out
