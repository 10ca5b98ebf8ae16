"""Experiment orchestration: normalize -> extract -> classify, with
stratified k-fold evaluation over the labelled days and macro metrics.

Leakage rules: normalization, physiological moments, and extractor training
use only the unlabelled partition (disjoint from every labelled day by the
Corpus invariant); within a fold the classifier sees only training-fold
labels.  Unlabelled data is reused in full across folds.

Physiological fusion differs by route: dense extractors (ae/de/rbm) widen
their input with the standardized phys block; the convolutional extractor
keeps its bare grid and the phys block joins at the classifier input; the
PNN always receives phys at its own input, never inside the encoder.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from utirisk.classifiers.gnb import GnbModel, fit_gnb, predict_gnb
from utirisk.classifiers.joint import JointSchedule, train_joint
from utirisk.classifiers.linear import (
    KnnModel,
    LrModel,
    fit_lr,
    predict_knn,
    predict_lr,
)
from utirisk.classifiers.pnn import PnnModel, fit_pnn, predict_pnn, risk_probability
from utirisk.data.types import Corpus, DailyActivityMatrix, Label
from utirisk.extractors import (
    EncoderModel,
    RbmModel,
    train_autoencoder,
    train_rbm,
)
from utirisk.nn.train import TrainConfig
from utirisk.preprocess import (
    NormalizationParams,
    PhysStats,
    apply_normalization,
    fit_lagrangian,
    fit_phys_stats,
    phys_features,
    windowed_features,
)

EXTRACTORS = ("none", "ae", "de", "cae", "rbm")
CLASSIFIERS = ("gnb", "lr", "knn", "pnn")
SELECTORS = ("none", "sbs", "rfecv")


def kfold_split(y: np.ndarray, k: int, seed: int = 0) -> list[np.ndarray]:
    """Stratified folds: disjoint, exhaustive, sizes within 1 of each other.

    Each class's shuffled indices are dealt round-robin with a fold pointer
    that continues across classes, so both class counts and fold sizes stay
    as even as arithmetic allows.
    """
    y = np.asarray(y)
    n = len(y)
    if k < 2:
        raise ValueError("k must be >= 2 (k=1 would leave no validation fold)")
    if k > n:
        raise ValueError(f"k={k} exceeds sample count {n}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    pointer = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        for i in idx:
            folds[pointer % k].append(int(i))
            pointer += 1
    return [np.array(sorted(f), dtype=int) for f in folds]


@dataclass(frozen=True)
class Metrics:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float
    precision: float  # macro over both classes
    recall: float  # macro over both classes
    f1: float  # harmonic mean of the macro precision/recall

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> Metrics:
    """Confusion counts with UTI (1) positive; macro-averaged P/R over both
    classes; any zero denominator contributes 0 rather than NaN."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise ValueError("label vectors differ in length")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    total = tp + tn + fp + fn

    def _safe(num: int, den: int) -> float:
        return num / den if den > 0 else 0.0

    prec = 0.5 * (_safe(tp, tp + fp) + _safe(tn, tn + fn))
    rec = 0.5 * (_safe(tp, tp + fn) + _safe(tn, tn + fp))
    f1 = 2.0 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0
    return Metrics(tp=tp, tn=tn, fp=fp, fn=fn,
                   accuracy=_safe(tp + tn, total), precision=prec, recall=rec, f1=f1)


@dataclass(frozen=True)
class ExperimentConfig:
    extractor: str = "none"
    classifier: str = "gnb"
    selector: str = "none"
    sbs_d: int | None = None
    use_phys: bool = False
    folds: int = 5
    seed: int = 0
    knn_k: int = 3
    rbm_hidden: int = 64
    extractor_train: TrainConfig | None = None
    joint: JointSchedule | None = None

    def __post_init__(self) -> None:
        if self.extractor not in EXTRACTORS:
            raise ValueError(f"unknown extractor {self.extractor!r}")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.selector not in SELECTORS:
            raise ValueError(f"unknown selector {self.selector!r}")
        if self.classifier == "pnn" and self.extractor == "none":
            raise ValueError("pnn rides on latent features; pick an extractor")
        if self.selector != "none" and self.extractor != "none":
            raise ValueError("selectors operate on the windowed features; "
                             "extractor must be 'none'")
        if self.selector == "sbs" and self.sbs_d is None:
            raise ValueError("sbs needs sbs_d")

    def name(self) -> str:
        parts = [self.extractor, self.classifier]
        if self.selector != "none":
            parts.append(self.selector)
        if self.use_phys:
            parts.append("phys")
        return "+".join(parts)


def _default_extractor_train(kind: str, seed: int) -> TrainConfig:
    if kind == "rbm":
        return TrainConfig(lr=0.1, epochs=150, seed=seed, max_iterations=None)
    return TrainConfig(optimizer="adam", lr=0.01, loss="mse", epochs=50,
                       batch_size=32, seed=seed, max_iterations=5000)


def _default_joint(seed: int) -> JointSchedule:
    return JointSchedule(rounds=3, classification_epochs=25, clustering_epochs=1,
                         lr=1e-3, batch_size=32, clustering_batches=40, seed=seed)


@dataclass
class FittedStages:
    """Everything fitted on unlabelled data only; shared across folds."""

    config: ExperimentConfig
    norm: NormalizationParams
    phys_stats: PhysStats | None
    extractor: EncoderModel | RbmModel | None
    unlabelled_inputs: np.ndarray  # extractor-input matrix (normalized [+phys])


def _flat_grids(matrices: list[DailyActivityMatrix]) -> np.ndarray:
    return np.stack([m.grid.reshape(-1) for m in matrices]).astype(float)


def _phys_block(matrices: list[DailyActivityMatrix], stats: PhysStats) -> np.ndarray:
    return np.stack([phys_features(m, stats) for m in matrices])


def fit_stages(corpus: Corpus, config: ExperimentConfig) -> FittedStages:
    """Fit normalization, phys moments, and the extractor on unlabelled data."""
    if config.extractor != "none" and not corpus.unlabelled:
        raise ValueError("extractor training needs unlabelled data")
    if not corpus.unlabelled:
        raise ValueError("normalization is fitted on unlabelled data; none given")
    norm = fit_lagrangian(corpus.unlabelled)
    stats = fit_phys_stats(corpus.unlabelled) if config.use_phys else None

    x_unlab = apply_normalization(_flat_grids(corpus.unlabelled), norm)
    # dense extractors fold phys into their input for conventional heads;
    # cae and every pnn route keep the extractor input as the bare grid
    fuse_into_extractor = (config.use_phys and config.classifier != "pnn"
                           and config.extractor in ("ae", "de", "rbm"))
    if fuse_into_extractor:
        x_unlab = np.hstack([x_unlab, _phys_block(corpus.unlabelled, stats)])

    extractor: EncoderModel | RbmModel | None = None
    if config.extractor in ("ae", "de", "cae"):
        grid = corpus.unlabelled[0].grid.shape
        train_cfg = config.extractor_train or _default_extractor_train(
            config.extractor, config.seed)
        extractor = train_autoencoder(x_unlab, config.extractor, train_cfg,
                                      grid=grid, seed=config.seed)
    elif config.extractor == "rbm":
        train_cfg = config.extractor_train or _default_extractor_train("rbm", config.seed)
        extractor = train_rbm(x_unlab, config.rbm_hidden, train_cfg)
    return FittedStages(config=config, norm=norm, phys_stats=stats,
                        extractor=extractor, unlabelled_inputs=x_unlab)


@dataclass
class PipelineModel:
    """A trained scoring pipeline: matrix in, UTI probability out."""

    config: ExperimentConfig
    norm: NormalizationParams
    phys_stats: PhysStats | None
    extractor: EncoderModel | RbmModel | None
    classifier: GnbModel | LrModel | KnnModel | PnnModel
    selected: tuple[int, ...] | None = None  # windowed-feature subset

    def _extractor_input(self, matrices: list[DailyActivityMatrix]) -> np.ndarray:
        x = apply_normalization(_flat_grids(matrices), self.norm)
        fuse = (self.config.use_phys and self.config.classifier != "pnn"
                and self.config.extractor in ("ae", "de", "rbm"))
        if fuse:
            x = np.hstack([x, _phys_block(matrices, self.phys_stats)])
        return x

    def features(self, matrices: list[DailyActivityMatrix]) -> np.ndarray:
        """Classifier-input features for a list of day matrices."""
        cfg = self.config
        if cfg.extractor == "none":
            grids = apply_normalization(_flat_grids(matrices), self.norm)
            h, w = matrices[0].grid.shape
            feats = np.stack([windowed_features(g.reshape(h, w)).reshape(-1)
                              for g in grids])
        else:
            feats = self.extractor.encode(self._extractor_input(matrices))
            feats = np.asarray(feats, dtype=float)

        append_phys = cfg.use_phys and (
            cfg.classifier == "pnn"
            or cfg.extractor in ("none", "cae")
        )
        if append_phys:
            feats = np.hstack([feats, _phys_block(matrices, self.phys_stats)])
        if self.selected is not None:
            feats = feats[:, list(self.selected)]
        return feats

    def predict(self, matrices: list[DailyActivityMatrix]) -> np.ndarray:
        X = self.features(matrices)
        cfg = self.config
        if cfg.classifier == "gnb":
            labels, _ = predict_gnb(self.classifier, X)
            return labels
        if cfg.classifier == "lr":
            labels, _ = predict_lr(self.classifier, X)
            return labels
        if cfg.classifier == "knn":
            return np.atleast_1d(predict_knn(self.classifier, X))
        labels, _ = predict_pnn(self.classifier, X)
        return labels

    def score(self, matrix: DailyActivityMatrix) -> float:
        """UTI probability for one day."""
        X = self.features([matrix])
        cfg = self.config
        if cfg.classifier == "gnb":
            _, post = predict_gnb(self.classifier, X)
            uti = int(np.flatnonzero(self.classifier.classes == 1)[0])
            return float(post[0, uti])
        if cfg.classifier == "lr":
            _, p = predict_lr(self.classifier, X)
            return float(p[0])
        if cfg.classifier == "knn":
            m: KnnModel = self.classifier
            d = np.sum((m.X - X[0]) ** 2, axis=1)
            nearest = np.argsort(d, kind="stable")[:m.k]
            return float(np.mean(m.y[nearest] == 1))
        return float(risk_probability(self.classifier, X)[0])

    def latent(self, matrix: DailyActivityMatrix) -> np.ndarray:
        """The classifier-input vector for one day (a PNN kernel candidate)."""
        return self.features([matrix])[0]


def fit_fold(stages: FittedStages, train_matrices: list[DailyActivityMatrix],
             y_train: np.ndarray) -> PipelineModel:
    """Fit the supervised head (and for pnn the joint stage) on one fold."""
    cfg = stages.config
    model = PipelineModel(config=cfg, norm=stages.norm, phys_stats=stages.phys_stats,
                          extractor=stages.extractor, classifier=None)
    y_train = np.asarray(y_train, dtype=int)

    if cfg.classifier == "pnn":
        x_lab = model._extractor_input(train_matrices)
        extra = (_phys_block(train_matrices, stages.phys_stats)
                 if cfg.use_phys else None)
        z0 = stages.extractor.encode(x_lab)
        if extra is not None:
            z0 = np.hstack([z0, extra])
        pnn0 = fit_pnn(z0, y_train)
        if cfg.extractor == "rbm":
            # no decoder and no backprop path: kernels stay at the rbm latents
            model.classifier = pnn0
            return model
        schedule = cfg.joint or _default_joint(cfg.seed)
        result = train_joint(stages.extractor, pnn0, x_lab, y_train,
                             stages.unlabelled_inputs, schedule,
                             labelled_extra=extra)
        model.extractor = result.encoder
        model.classifier = result.pnn
        return model

    X = model.features(train_matrices)
    if cfg.selector != "none":
        from utirisk import featsel
        from utirisk.classifiers.wrappers import GnbClassifier, KnnClassifier, LrClassifier

        factory = {"gnb": GnbClassifier,
                   "lr": LrClassifier,
                   "knn": lambda: KnnClassifier(cfg.knn_k)}[cfg.classifier]
        inner_folds = min(cfg.folds, int(np.min(np.bincount(y_train))))
        inner_folds = max(2, inner_folds)
        if cfg.selector == "sbs":
            subset = featsel.sbs(factory, X, y_train, cfg.sbs_d,
                                 cv_folds=inner_folds, seed=cfg.seed)
        else:
            subset = featsel.rfecv(factory, X, y_train,
                                   cv_folds=inner_folds, seed=cfg.seed)
        model.selected = subset.selected
        X = X[:, list(subset.selected)]

    if cfg.classifier == "gnb":
        model.classifier = fit_gnb(X, y_train)
    elif cfg.classifier == "lr":
        model.classifier = fit_lr(X, y_train)
    elif cfg.classifier == "knn":
        model.classifier = KnnModel(X=X, y=y_train, k=min(cfg.knn_k, len(X)))
    return model


def train_semisupervised(corpus: Corpus, config: ExperimentConfig) -> PipelineModel:
    """Full-data pipeline fit: unsupervised stages plus the supervised head
    on every labelled day (the deployment path; evaluation uses folds)."""
    stages = fit_stages(corpus, config)
    matrices = [d.matrix for d in corpus.labelled]
    y = np.array([d.label.value for d in corpus.labelled], dtype=int)
    if len(np.unique(y)) < 2:
        raise ValueError("training needs both labelled classes")
    return fit_fold(stages, matrices, y)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    fold_metrics: list[Metrics]
    mean: dict[str, float]
    std: dict[str, float]
    runtime_seconds: float
    error: str | None = None

    @property
    def name(self) -> str:
        return self.config.name()


def _aggregate(folds: list[Metrics]) -> tuple[dict, dict]:
    keys = ("accuracy", "precision", "recall", "f1")
    mean = {k: float(np.mean([getattr(m, k) for m in folds])) for k in keys}
    std = {k: float(np.std([getattr(m, k) for m in folds])) for k in keys}
    return mean, std


def evaluate_config(corpus: Corpus, config: ExperimentConfig) -> ExperimentReport:
    """k-fold CV of one config over the labelled days."""
    start = time.time()
    matrices = [d.matrix for d in corpus.labelled]
    y = np.array([d.label.value for d in corpus.labelled], dtype=int)
    folds = kfold_split(y, config.folds, config.seed)
    stages = fit_stages(corpus, config)

    fold_metrics: list[Metrics] = []
    for i, fold in enumerate(folds):
        train_idx = np.concatenate([f for j, f in enumerate(folds) if j != i])
        model = fit_fold(stages, [matrices[j] for j in train_idx], y[train_idx])
        pred = model.predict([matrices[j] for j in fold])
        fold_metrics.append(compute_metrics(y[fold], pred))
    mean, std = _aggregate(fold_metrics)
    return ExperimentReport(config=config, fold_metrics=fold_metrics, mean=mean,
                            std=std, runtime_seconds=time.time() - start)


def run_experiment(corpus: Corpus, configs: list[ExperimentConfig]) -> list[ExperimentReport]:
    """Evaluate each config; one config's failure never takes down the rest."""
    reports = []
    for cfg in configs:
        try:
            reports.append(evaluate_config(corpus, cfg))
        except Exception as exc:  # noqa: BLE001 - isolation is the contract
            reports.append(ExperimentReport(config=cfg, fold_metrics=[], mean={},
                                            std={}, runtime_seconds=0.0,
                                            error=f"{type(exc).__name__}: {exc}"))
    return reports


def corpus_digest(corpus: Corpus) -> str:
    """Content hash over every home-day grid and label, order-independent."""
    h = hashlib.sha256()
    entries = []
    for m in corpus.unlabelled:
        entries.append((m.home_id, m.date.isoformat(), "", m.grid.tobytes()))
    for d in corpus.labelled:
        entries.append((d.matrix.home_id, d.matrix.date.isoformat(),
                        str(d.label.value), d.matrix.grid.tobytes()))
    for home, date, label, blob in sorted(entries):
        h.update(home.encode())
        h.update(date.encode())
        h.update(label.encode())
        h.update(blob)
    return h.hexdigest()


def report_table(reports: list[ExperimentReport]) -> str:
    """Delimiter-separated summary, one row per config in input order."""
    lines = ["config\tprecision\trecall\tf1\taccuracy\truntime_s\terror"]
    for r in reports:
        if r.error:
            lines.append(f"{r.name}\t-\t-\t-\t-\t{r.runtime_seconds:.1f}\t{r.error}")
        else:
            lines.append(
                f"{r.name}\t{r.mean['precision']:.3f}\t{r.mean['recall']:.3f}"
                f"\t{r.mean['f1']:.3f}\t{r.mean['accuracy']:.3f}"
                f"\t{r.runtime_seconds:.1f}\t")
    return "\n".join(lines) + "\n"


def run_manifest(corpus: Corpus, reports: list[ExperimentReport]) -> dict:
    def _cfg(c: ExperimentConfig) -> dict:
        d = dataclasses.asdict(c)
        d["extractor_train"] = dataclasses.asdict(c.extractor_train) if c.extractor_train else None
        d["joint"] = dataclasses.asdict(c.joint) if c.joint else None
        return d

    return {
        "corpus_sha256": corpus_digest(corpus),
        "runs": [{
            "config": _cfg(r.config),
            "mean": r.mean,
            "std": r.std,
            "folds": [m.as_dict() for m in r.fold_metrics],
            "runtime_seconds": r.runtime_seconds,
            "error": r.error,
        } for r in reports],
    }
