"""Alternating semi-supervised training of encoder + PNN.

Classification stage: labelled batches flow encoder -> PNN; binary
cross-entropy on the two-class PNN report backpropagates into the kernels,
the shared sigma, and the encoder.  Clustering stage: unlabelled batches
train encoder + decoder on reconstruction mse with the PNN frozen.  The
stages alternate per round.  No pseudo-labels anywhere: unlabelled data
only ever sees the reconstruction objective.

The PNN head's gradients are closed-form.  With per-class sum S, count n,
max m over phi and den = S + n - n*m:

    dP/dphi_i = (n*(1 - m) + S*n*[i = argmax]) / den^2
    dphi_i/dz = -phi_i * (z - K_i) / sigma^2
    dphi_i/dK_i = +phi_i * (z - K_i) / sigma^2
    dphi_i/dsigma = phi_i * ||z - K_i||^2 / sigma^3
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utirisk.classifiers.pnn import NON_UTI, SIGMA_FLOOR, UTI, PnnModel
from utirisk.extractors import EncoderModel
from utirisk.nn.losses import bce, mse
from utirisk.nn.optim import Adam
from utirisk.nn.train import TrainingError


@dataclass(frozen=True)
class JointSchedule:
    rounds: int = 3
    classification_epochs: int = 20
    clustering_epochs: int = 1
    lr: float = 1e-3
    batch_size: int = 32
    clustering_batches: int | None = None  # per-epoch cap on unlabelled batches
    sigma_floor: float = SIGMA_FLOOR
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")
        if self.lr <= 0:
            raise ValueError("lr must be positive")


@dataclass
class JointResult:
    encoder: EncoderModel
    pnn: PnnModel
    classification_curve: list[float]
    reconstruction_curve: list[float]


def _pnn_forward(z: np.ndarray, pnn: PnnModel):
    """Forward pass caching everything the backward pass needs."""
    diff = z[:, None, :] - pnn.kernels[None, :, :]  # (B, M, D)
    d2 = np.sum(diff * diff, axis=2)
    phi = np.exp(-d2 / (2.0 * pnn.sigma**2))
    stats = {}
    for cls in pnn.classes:
        cols = np.flatnonzero(pnn.kernel_classes == cls)
        sub = phi[:, cols]
        s = sub.sum(axis=1)
        amax = cols[np.argmax(sub, axis=1)]  # global kernel index of the max
        m = phi[np.arange(len(z)), amax]
        n = len(cols)
        den = s + n - n * m
        stats[cls] = {"cols": cols, "s": s, "m": m, "amax": amax, "n": n,
                      "den": den, "P": s / den}
    return diff, d2, phi, stats


def _pnn_backward(dP: dict, diff: np.ndarray, d2: np.ndarray, phi: np.ndarray,
                  stats: dict, pnn: PnnModel):
    """Gradients of the loss w.r.t. z, kernels, sigma given dL/dP per class."""
    batch = phi.shape[0]
    g_phi = np.zeros_like(phi)
    rows = np.arange(batch)
    for cls, st in stats.items():
        den2 = st["den"] ** 2
        base = dP[cls] * st["n"] * (1.0 - st["m"]) / den2  # (B,)
        g_phi[:, st["cols"]] += base[:, None]
        g_phi[rows, st["amax"]] += dP[cls] * st["s"] * st["n"] / den2

    sig = pnn.sigma
    g_d2 = g_phi * phi * (-1.0 / (2.0 * sig * sig))
    g_z = 2.0 * np.einsum("bm,bmd->bd", g_d2, diff)
    g_k = -2.0 * np.einsum("bm,bmd->md", g_d2, diff)
    g_sigma = float(np.sum(g_phi * phi * d2) / sig**3)
    return g_z, g_k, g_sigma


def pnn_report_with_grads(z: np.ndarray, pnn: PnnModel):
    """Two-class report p plus the cached forward state (training path)."""
    if set(pnn.classes) != {NON_UTI, UTI}:
        raise ValueError("joint training expects the NonUTI/UTI class pair")
    diff, d2, phi, stats = _pnn_forward(z, pnn)
    p0 = stats[NON_UTI]["P"]
    p1 = stats[UTI]["P"]
    total = p0 + p1
    safe = np.where(total > 0, total, 1.0)
    p = np.where(total > 0, p1 / safe, 0.5)
    return p, (diff, d2, phi, stats, p0, p1, total)


def _classification_step(x: np.ndarray, y: np.ndarray, extra: np.ndarray | None,
                         enc: EncoderModel, pnn: PnnModel, params, grads, opt,
                         floor: float) -> float:
    z = enc.encoder.forward(x).astype(float)
    latent_dim = z.shape[1]
    if extra is not None:
        # static block rides alongside the latent; kernels span both parts
        z = np.hstack([z, extra])
    p, (diff, d2, phi, stats, p0, p1, total) = pnn_report_with_grads(z, pnn)
    if not np.all(np.isfinite(p)):
        raise TrainingError("non-finite PNN report during classification stage")
    loss, dp = bce(p, y)

    # below ~1e-30 the report sits on its 0/0 guard plateau and 1/total^2
    # would overflow; treat the region as flat
    live = total > 1e-30
    safe2 = np.where(live, total, 1.0) ** 2
    dP = {
        UTI: np.where(live, dp * p0 / safe2, 0.0),
        NON_UTI: np.where(live, -dp * p1 / safe2, 0.0),
    }
    g_z, g_k, g_sigma = _pnn_backward(dP, diff, d2, phi, stats, pnn)
    if not (np.all(np.isfinite(g_z)) and np.all(np.isfinite(g_k))
            and np.isfinite(g_sigma)):
        raise TrainingError("non-finite gradient during classification stage")

    enc.encoder.zero_grad()
    enc.encoder.backward(g_z[:, :latent_dim].astype(enc.encoder.dtype))
    for k, v in enc.encoder.grads().items():
        grads[f"enc.{k}"] = v
    grads["pnn.kernels"] = g_k
    grads["pnn.sigma"] = np.array([g_sigma])

    opt.step(params, grads)
    params["pnn.sigma"][0] = max(params["pnn.sigma"][0], floor)
    pnn.sigma = float(params["pnn.sigma"][0])
    return loss


def train_joint(encoder: EncoderModel, pnn: PnnModel, labelled_x: np.ndarray,
                labelled_y: np.ndarray, unlabelled_x: np.ndarray,
                schedule: JointSchedule | None = None,
                labelled_extra: np.ndarray | None = None) -> JointResult:
    """Run the alternating schedule; inputs are left untouched (copies train).

    labelled_extra, when given, is a per-sample static block appended to the
    latent before the PNN.  Kernels then cover latent + extra dimensions; the
    encoder only receives gradient for the latent slice.
    """
    sched = schedule or JointSchedule()
    labelled_x = np.asarray(labelled_x, dtype=np.float32)
    labelled_y = np.asarray(labelled_y, dtype=float)
    unlabelled_x = np.asarray(unlabelled_x, dtype=np.float32)
    if labelled_extra is not None:
        labelled_extra = np.asarray(labelled_extra, dtype=float)
        if len(labelled_extra) != len(labelled_x):
            raise ValueError("labelled_extra row count must match labelled_x")
    if len(np.unique(labelled_y)) < 2:
        raise ValueError("joint training needs both classes in the labelled set")
    if encoder.decoder is None:
        raise ValueError("joint training needs an encoder with a decoder")
    for cls in pnn.classes:
        if not np.any(pnn.kernel_classes == cls):
            raise ValueError(f"class {cls} has no kernels")

    enc = encoder.copy()
    head = pnn.copy()
    rng = np.random.default_rng(sched.seed)

    cls_params = {f"enc.{k}": v for k, v in enc.encoder.params().items()}
    cls_params["pnn.kernels"] = head.kernels
    cls_params["pnn.sigma"] = np.array([head.sigma])
    cls_opt = Adam(lr=sched.lr)

    rec_params = {f"enc.{k}": v for k, v in enc.encoder.params().items()}
    rec_params.update({f"dec.{k}": v for k, v in enc.decoder.params().items()})
    rec_opt = Adam(lr=sched.lr)

    cls_curve: list[float] = []
    rec_curve: list[float] = []
    for _ in range(sched.rounds):
        for _ in range(sched.classification_epochs):
            order = rng.permutation(len(labelled_x))
            total, seen = 0.0, 0
            for lo in range(0, len(order), sched.batch_size):
                idx = order[lo:lo + sched.batch_size]
                grads = {}
                extra = labelled_extra[idx] if labelled_extra is not None else None
                loss = _classification_step(labelled_x[idx], labelled_y[idx], extra,
                                            enc, head, cls_params, grads, cls_opt,
                                            sched.sigma_floor)
                total += loss * len(idx)
                seen += len(idx)
            cls_curve.append(total / seen)

        for _ in range(sched.clustering_epochs):
            order = rng.permutation(len(unlabelled_x))
            total, seen, batches = 0.0, 0, 0
            for lo in range(0, len(order), sched.batch_size):
                if sched.clustering_batches is not None and batches >= sched.clustering_batches:
                    break
                idx = order[lo:lo + sched.batch_size]
                x = unlabelled_x[idx]
                z = enc.encoder.forward(x)
                out = enc.decoder.forward(z)
                if not np.all(np.isfinite(out)):
                    raise TrainingError("non-finite reconstruction during clustering stage")
                loss, dout = mse(out, x)
                enc.encoder.zero_grad()
                enc.decoder.zero_grad()
                enc.encoder.backward(enc.decoder.backward(dout))
                grads = {f"enc.{k}": v for k, v in enc.encoder.grads().items()}
                grads.update({f"dec.{k}": v for k, v in enc.decoder.grads().items()})
                rec_opt.step(rec_params, grads)
                total += loss * len(idx)
                seen += len(idx)
                batches += 1
            if seen:
                rec_curve.append(total / seen)

    return JointResult(encoder=enc, pnn=head, classification_curve=cls_curve,
                       reconstruction_curve=rec_curve)
