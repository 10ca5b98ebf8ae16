"""Release gate: each test here is one required property of the system.

Tolerances are pinned as module constants; loosening one is a release
decision, not a test edit.  The comparative run uses the default synthetic
corpus and real training, so this file dominates the suite's runtime.
"""

import time

import numpy as np
import pytest

from utirisk.classifiers.gnb import fit_gnb, predict_gnb
from utirisk.classifiers.pnn import (
    UTI,
    class_probabilities,
    fit_pnn,
    pnn_add_kernel,
    pnn_phi,
    pnn_probability,
)
from utirisk.data.synthetic import GeneratorConfig, generate_synthetic
from utirisk.data.types import Label
from utirisk.extractors import build_autoencoder, latent_dim
from utirisk.nn.gradcheck import standard_suite
from utirisk.pipeline import ExperimentConfig, compute_metrics, evaluate_config
from utirisk.preprocess import apply_normalization, fit_lagrangian
from utirisk.service import ServiceState
from utirisk.snapshot import load_snapshot, save_snapshot
from tests.test_pipeline import FAST_AE, FAST_JOINT, _fit, tiny_corpus

GRAD_REL_TOL = 1e-4
GRAD_MIN_PROBES = 200
GRAD_BUDGET_SECONDS = 60.0

GNB_INSTANCES = 500
GNB_MAX_SAMPLES = 8
GNB_MAX_FEATURES = 4
GNB_ABS_TOL = 1e-9

PNN_RANDOM_INPUTS = 10_000
PNN_EQUAL_RESPONSE_TOL = 1e-12

METRICS_VECTORS = 1000

NORMALIZATION_CORPORA = 100
NORMALIZATION_SCALES = (0.1, 1.0, 10.0)
# scaling is invariant up to IEEE rounding of the fitted per-feature scale
# (a few ulps); bitwise equality is not attainable for non-power-of-two scales
NORMALIZATION_ABS_TOL = 1e-14

COMPARATIVE_SEEDS = (0, 1, 2, 3, 4)
COMPARATIVE_MIN_WINS = 4
COMPARATIVE_BUDGET_SECONDS = 900.0

SNAPSHOT_PROBES = 100


def test_gradient_correctness():
    start = time.time()
    total_probes = 0
    for name, result in standard_suite(seed=0):
        assert result.ok(GRAD_REL_TOL), \
            f"{name}: max rel err {result.max_rel_error:.2e} at {result.worst_param}"
        total_probes += result.probes
    elapsed = time.time() - start
    assert total_probes >= GRAD_MIN_PROBES
    assert elapsed < GRAD_BUDGET_SECONDS


def test_gnb_oracle_equivalence():
    # two samples per class keep every variance nonzero, so the plain density
    # product the oracle computes stays representable in float64; the
    # implementation's log-space path must match it on this common ground
    rng = np.random.default_rng(0)
    floor = 1e-6
    for _ in range(GNB_INSTANCES):
        n = int(rng.integers(4, GNB_MAX_SAMPLES + 1))
        d = int(rng.integers(1, GNB_MAX_FEATURES + 1))
        X = rng.normal(size=(n, d)) * rng.uniform(0.5, 3.0)
        pos = int(rng.integers(2, n - 1))
        y = rng.permutation(np.array([1] * pos + [0] * (n - pos)))
        model = fit_gnb(X, y, floor=floor)
        q = rng.normal(size=d)
        _, post = predict_gnb(model, q)

        classes = np.unique(y)
        scores = []
        for cls in classes:
            rows = X[y == cls]
            mu = rows.mean(axis=0)
            sigma = np.maximum(np.sqrt(rows.var(axis=0)), floor)
            dens = np.exp(-0.5 * ((q - mu) / sigma) ** 2) / (np.sqrt(2 * np.pi) * sigma)
            scores.append(len(rows) / n * np.prod(dens))
        direct = np.array(scores) / np.sum(scores)
        assert np.all(np.abs(post - direct) < GNB_ABS_TOL)


def test_pnn_algebraic_identities():
    rng = np.random.default_rng(1)

    # a kernel responds to itself with exactly 1
    for _ in range(100):
        x = rng.normal(size=int(rng.integers(1, 9)))
        sigma = float(rng.uniform(0.05, 3.0))
        assert pnn_phi(x, x[None, :], sigma)[0] == 1.0

    # equal responses c from every kernel collapse the class score to c
    for _ in range(100):
        k = int(rng.integers(2, 7))
        d = float(rng.uniform(0.2, 3.0))
        sigma = float(rng.uniform(0.3, 2.0))
        kernels = d * np.eye(k)
        c = np.exp(-d * d / (2 * sigma * sigma))
        p = pnn_probability(np.zeros(k), kernels, sigma)
        assert abs(p - c) < PNN_EQUAL_RESPONSE_TOL

    # class scores stay in [0, 1] across a large random probe
    model = fit_pnn(rng.normal(size=(12, 5)), rng.integers(0, 2, size=12).clip(0, 1))
    model.kernel_classes[:2] = [0, 1]  # both classes guaranteed present
    z = rng.normal(scale=4.0, size=(PNN_RANDOM_INPUTS, 5))
    p = class_probabilities(model, z)
    assert np.all((p >= 0.0) & (p <= 1.0))

    # growth is additive only: existing parameters stay bit-identical
    before_kernels = model.kernels.copy()
    before_classes = model.kernel_classes.copy()
    grown = pnn_add_kernel(model, rng.normal(size=5), UTI)
    assert np.array_equal(grown.kernels[:-1], before_kernels)
    assert np.array_equal(grown.kernel_classes[:-1], before_classes)
    assert grown.sigma == model.sigma
    assert np.array_equal(model.kernels, before_kernels)


def test_metrics_oracle():
    rng = np.random.default_rng(2)
    for _ in range(METRICS_VECTORS):
        n = int(rng.integers(1, 50))
        y = rng.integers(0, 2, size=n)
        p = rng.integers(0, 2, size=n)
        m = compute_metrics(y, p)
        tp = sum(1 for a, b in zip(y, p) if a == 1 and b == 1)
        tn = sum(1 for a, b in zip(y, p) if a == 0 and b == 0)
        fp = sum(1 for a, b in zip(y, p) if a == 0 and b == 1)
        fn = sum(1 for a, b in zip(y, p) if a == 1 and b == 0)
        assert (m.tp, m.tn, m.fp, m.fn) == (tp, tn, fp, fn)
        prec = 0.5 * ((tp / (tp + fp) if tp + fp else 0.0)
                      + (tn / (tn + fn) if tn + fn else 0.0))
        rec = 0.5 * ((tp / (tp + fn) if tp + fn else 0.0)
                     + (tn / (tn + fp) if tn + fp else 0.0))
        assert m.accuracy == pytest.approx((tp + tn) / n)
        assert m.precision == pytest.approx(prec)
        assert m.recall == pytest.approx(rec)
        assert m.f1 == pytest.approx(
            2 * prec * rec / (prec + rec) if prec + rec else 0.0)

    y = np.array([1] * 24 + [0] * 36)
    always_pos = compute_metrics(y, np.ones(60))
    assert always_pos.accuracy == pytest.approx(0.40)
    assert always_pos.precision == pytest.approx(0.20)
    assert always_pos.recall == pytest.approx(0.50)
    always_neg = compute_metrics(y, np.zeros(60))
    assert always_neg.accuracy == pytest.approx(0.60)
    assert always_neg.precision == pytest.approx(0.30)
    assert always_neg.recall == pytest.approx(0.50)
    assert always_neg.f1 == pytest.approx(0.375)


def test_latent_dimension_contract():
    assert latent_dim("ae") == 171
    assert latent_dim("de") == 20
    assert latent_dim("cae") == 7296
    probe = np.zeros((1, 192))
    for kind in ("ae", "de", "cae"):
        model = build_autoencoder(kind, 192, (24, 8), seed=0)
        assert model.encode(probe).shape == (1, latent_dim(kind))


def test_normalization_invariance():
    rng = np.random.default_rng(3)
    for _ in range(NORMALIZATION_CORPORA):
        n = int(rng.integers(5, 60))
        d = int(rng.integers(3, 30))
        X = rng.poisson(3.0, size=(n, d)).astype(float)
        base = apply_normalization(X, fit_lagrangian(X))
        for c in NORMALIZATION_SCALES:
            scaled = apply_normalization(c * X, fit_lagrangian(c * X))
            assert np.max(np.abs(scaled - base)) <= NORMALIZATION_ABS_TOL


def test_comparative_de_pnn_beats_raw_gnb():
    start = time.time()
    wins = 0
    outcomes = []
    for seed in COMPARATIVE_SEEDS:
        corpus = generate_synthetic(GeneratorConfig(), seed=seed)
        de_pnn = evaluate_config(corpus, ExperimentConfig(
            "de", "pnn", folds=5, seed=seed))
        raw_gnb = evaluate_config(corpus, ExperimentConfig(
            "none", "gnb", folds=5, seed=seed))
        outcomes.append((seed, de_pnn.mean["f1"], raw_gnb.mean["f1"]))
        if de_pnn.mean["f1"] > raw_gnb.mean["f1"]:
            wins += 1
    elapsed = time.time() - start
    detail = ", ".join(f"seed {s}: de+pnn {a:.3f} vs gnb {b:.3f}"
                       for s, a, b in outcomes)
    assert wins >= COMPARATIVE_MIN_WINS, detail
    assert elapsed < COMPARATIVE_BUDGET_SECONDS


def test_snapshot_round_trip(tmp_path):
    corpus = tiny_corpus()
    model = _fit(corpus, ExperimentConfig("de", "pnn", use_phys=True,
                                          extractor_train=FAST_AE,
                                          joint=FAST_JOINT))
    probes = tiny_corpus(seed=99, unlabelled=SNAPSHOT_PROBES, per_class=1).unlabelled
    assert len(probes) == SNAPSHOT_PROBES

    path = tmp_path / "model.json"
    save_snapshot(model, path)
    loaded = load_snapshot(path).model
    for m in probes:
        assert loaded.score(m) == model.score(m)
    assert np.array_equal(loaded.predict(probes), model.predict(probes))

    import json
    doc = json.loads(path.read_text())
    doc["config"]["seed"] = doc["config"]["seed"] + 1
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="checksum"):
        load_snapshot(path)


def test_continual_learning_strict_increase():
    corpus = tiny_corpus()
    model = _fit(corpus, ExperimentConfig("de", "pnn", use_phys=True,
                                          extractor_train=FAST_AE,
                                          joint=FAST_JOINT))
    state = ServiceState(model, threshold=0.0)
    state.add_corpus(corpus)
    day = next(d.matrix for d in corpus.labelled if d.label is Label.UTI)

    latent = model.latent(day)
    clf = state.model.classifier
    before = pnn_probability(latent, clf.kernels[clf.kernel_classes == UTI],
                             clf.sigma)
    assert before < 1.0  # strictness must be observable

    _, alert = state.score_day(day.home_id, day.date.isoformat())
    state.validate_alert(alert.alert_id, "positive")

    clf = state.model.classifier
    after = pnn_probability(latent, clf.kernels[clf.kernel_classes == UTI],
                            clf.sigma)
    assert after > before
