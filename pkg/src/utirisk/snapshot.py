"""Versioned, checksummed persistence for a trained scoring pipeline.

A snapshot is a single JSON document: a version tag, the experiment config
echo, the normalization and physiological statistics, the extractor and
classifier parameters (as a checksummed array payload), and a whole-document
sha256.  Loading a byte-corrupted file or an unknown container version fails
loudly; a clean round-trip rebuilds a pipeline whose predictions are
bit-identical to the saved one.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from utirisk.classifiers.gnb import GnbModel
from utirisk.classifiers.joint import JointSchedule
from utirisk.classifiers.linear import KnnModel, LrModel
from utirisk.classifiers.pnn import PnnModel
from utirisk.extractors import EncoderModel, RbmModel
from utirisk.nn.network import (
    Conv2DSpec,
    DenseSpec,
    FlattenSpec,
    LayerSpec,
    Network,
    ReshapeSpec,
)
from utirisk.nn.serialize import arrays_to_payload, payload_to_arrays
from utirisk.nn.train import TrainConfig
from utirisk.pipeline import ExperimentConfig, PipelineModel
from utirisk.preprocess import NormalizationParams, PhysStats

FORMAT_NAME = "utirisk-snapshot"
VERSION = 1


def spec_to_json(spec: list[LayerSpec]) -> list[dict]:
    out = []
    for s in spec:
        if isinstance(s, DenseSpec):
            out.append({"type": "dense", "in_dim": s.in_dim, "out_dim": s.out_dim,
                        "activation": s.activation})
        elif isinstance(s, Conv2DSpec):
            out.append({"type": "conv2d", "in_channels": s.in_channels,
                        "out_channels": s.out_channels, "activation": s.activation})
        elif isinstance(s, FlattenSpec):
            out.append({"type": "flatten"})
        elif isinstance(s, ReshapeSpec):
            out.append({"type": "reshape", "shape": list(s.shape)})
        else:
            raise ValueError(f"unknown layer spec {s!r}")
    return out


def spec_from_json(items: list[dict]) -> list[LayerSpec]:
    out: list[LayerSpec] = []
    for d in items:
        t = d["type"]
        if t == "dense":
            out.append(DenseSpec(d["in_dim"], d["out_dim"], d["activation"]))
        elif t == "conv2d":
            out.append(Conv2DSpec(d["in_channels"], d["out_channels"], d["activation"]))
        elif t == "flatten":
            out.append(FlattenSpec())
        elif t == "reshape":
            out.append(ReshapeSpec(tuple(d["shape"])))
        else:
            raise ValueError(f"unknown layer type {t!r}")
    return out


def config_to_json(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["extractor_train"] = dataclasses.asdict(cfg.extractor_train) if cfg.extractor_train else None
    d["joint"] = dataclasses.asdict(cfg.joint) if cfg.joint else None
    return d


def config_from_json(d: dict) -> ExperimentConfig:
    d = dict(d)
    if d.get("extractor_train"):
        d["extractor_train"] = TrainConfig(**d["extractor_train"])
    if d.get("joint"):
        d["joint"] = JointSchedule(**d["joint"])
    return ExperimentConfig(**d)


def _network_arrays(prefix: str, net: Network, arrays: dict) -> dict:
    for k, v in net.params().items():
        arrays[f"{prefix}.{k}"] = v
    return {"spec": spec_to_json(net.spec), "dtype": np.dtype(net.dtype).name}


def _network_restore(prefix: str, meta: dict, arrays: dict) -> Network:
    net = Network(spec_from_json(meta["spec"]), seed=0, dtype=np.dtype(meta["dtype"]))
    net.set_params({k[len(prefix) + 1:]: v for k, v in arrays.items()
                    if k.startswith(prefix + ".")})
    return net


def _pack_extractor(ex, arrays: dict) -> dict | None:
    if ex is None:
        return None
    if isinstance(ex, RbmModel):
        arrays["rbm.W"] = ex.W
        arrays["rbm.vbias"] = ex.vbias
        arrays["rbm.hbias"] = ex.hbias
        arrays["rbm.scale"] = np.asarray(ex.scale)
        return {"kind": "rbm", "hidden_dim": ex.hidden_dim}
    meta = {"kind": ex.kind, "latent_dim": ex.latent_dim, "input_dim": ex.input_dim,
            "grid": list(ex.grid), "encoder": _network_arrays("enc", ex.encoder, arrays)}
    if ex.decoder is not None:
        meta["decoder"] = _network_arrays("dec", ex.decoder, arrays)
    return meta


def _unpack_extractor(meta: dict | None, arrays: dict):
    if meta is None:
        return None
    if meta["kind"] == "rbm":
        return RbmModel(W=arrays["rbm.W"], vbias=arrays["rbm.vbias"],
                        hbias=arrays["rbm.hbias"], hidden_dim=meta["hidden_dim"],
                        scale=arrays["rbm.scale"])
    decoder = _network_restore("dec", meta["decoder"], arrays) if "decoder" in meta else None
    return EncoderModel(kind=meta["kind"],
                        encoder=_network_restore("enc", meta["encoder"], arrays),
                        decoder=decoder, latent_dim=meta["latent_dim"],
                        input_dim=meta["input_dim"], grid=tuple(meta["grid"]))


def _pack_classifier(clf, arrays: dict) -> dict:
    if isinstance(clf, GnbModel):
        arrays["clf.classes"] = clf.classes
        arrays["clf.priors"] = clf.priors
        arrays["clf.mu"] = clf.mu
        arrays["clf.sigma"] = clf.sigma
        return {"kind": "gnb", "floor": clf.floor}
    if isinstance(clf, LrModel):
        arrays["clf.w"] = clf.w
        return {"kind": "lr", "b": clf.b, "classes": list(clf.classes),
                "single_class": clf.single_class}
    if isinstance(clf, KnnModel):
        arrays["clf.X"] = clf.X
        arrays["clf.y"] = clf.y
        return {"kind": "knn", "k": clf.k}
    if isinstance(clf, PnnModel):
        arrays["clf.kernels"] = clf.kernels
        arrays["clf.kernel_classes"] = clf.kernel_classes
        return {"kind": "pnn", "sigma": clf.sigma, "classes": list(clf.classes)}
    raise ValueError(f"unknown classifier {type(clf).__name__}")


def _unpack_classifier(meta: dict, arrays: dict):
    kind = meta["kind"]
    if kind == "gnb":
        return GnbModel(classes=arrays["clf.classes"], priors=arrays["clf.priors"],
                        mu=arrays["clf.mu"], sigma=arrays["clf.sigma"],
                        floor=meta["floor"])
    if kind == "lr":
        return LrModel(w=arrays["clf.w"], b=meta["b"], classes=tuple(meta["classes"]),
                       single_class=meta["single_class"])
    if kind == "knn":
        return KnnModel(X=arrays["clf.X"], y=arrays["clf.y"], k=meta["k"])
    if kind == "pnn":
        return PnnModel(kernels=arrays["clf.kernels"],
                        kernel_classes=arrays["clf.kernel_classes"],
                        sigma=meta["sigma"], classes=tuple(meta["classes"]))
    raise ValueError(f"unknown classifier kind {kind!r}")


@dataclass
class Snapshot:
    model: PipelineModel
    version_tag: str
    checksum: str


def _document_digest(doc: dict) -> str:
    """sha256 over the canonical dump of everything except the checksum field."""
    body = {k: v for k, v in doc.items() if k != "checksum"}
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def snapshot_to_document(model: PipelineModel, version_tag: str) -> dict:
    arrays: dict[str, np.ndarray] = {"norm.lam": model.norm.lam}
    phys_meta = None
    if model.phys_stats is not None:
        arrays["phys.means"] = model.phys_stats.means
        arrays["phys.stds"] = model.phys_stats.stds
        phys_meta = {"channels": list(model.phys_stats.channels)}
    extractor_meta = _pack_extractor(model.extractor, arrays)
    classifier_meta = _pack_classifier(model.classifier, arrays)
    doc = {
        "format": FORMAT_NAME,
        "version": VERSION,
        "version_tag": version_tag,
        "config": config_to_json(model.config),
        "normalization": {"epsilon": model.norm.epsilon,
                          "corpus_size": model.norm.corpus_size},
        "phys": phys_meta,
        "extractor": extractor_meta,
        "classifier": classifier_meta,
        "selected": list(model.selected) if model.selected is not None else None,
        "arrays": arrays_to_payload(arrays),
    }
    doc["checksum"] = _document_digest(doc)
    return doc


def snapshot_from_document(doc: dict) -> Snapshot:
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported snapshot version {doc.get('version')!r}; "
                         f"this build reads version {VERSION}")
    if doc.get("checksum") != _document_digest(doc):
        raise ValueError("snapshot checksum mismatch; refusing to load")
    arrays = payload_to_arrays(doc["arrays"])
    config = config_from_json(doc["config"])
    norm = NormalizationParams(lam=arrays["norm.lam"],
                               epsilon=doc["normalization"]["epsilon"],
                               corpus_size=doc["normalization"]["corpus_size"])
    stats = None
    if doc["phys"] is not None:
        stats = PhysStats(means=arrays["phys.means"], stds=arrays["phys.stds"],
                          channels=tuple(doc["phys"]["channels"]))
    model = PipelineModel(
        config=config,
        norm=norm,
        phys_stats=stats,
        extractor=_unpack_extractor(doc["extractor"], arrays),
        classifier=_unpack_classifier(doc["classifier"], arrays),
        selected=tuple(doc["selected"]) if doc["selected"] is not None else None,
    )
    return Snapshot(model=model, version_tag=doc["version_tag"],
                    checksum=doc["checksum"])


def save_snapshot(model: PipelineModel, path: str | Path,
                  version_tag: str = "v1") -> str:
    """Write the snapshot; returns its checksum."""
    doc = snapshot_to_document(model, version_tag)
    Path(path).write_text(json.dumps(doc))
    return doc["checksum"]


def load_snapshot(path: str | Path) -> Snapshot:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"snapshot is not valid JSON: {exc}") from exc
    return snapshot_from_document(doc)
