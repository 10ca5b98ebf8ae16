"""End-to-end pipeline: folds, metrics, config rules, feature routing,
training, evaluation, and run manifests."""

import datetime as dt
import json

import numpy as np
import pytest

from utirisk.classifiers.joint import JointSchedule
from utirisk.classifiers.pnn import PnnModel
from utirisk.data.types import Corpus, DailyActivityMatrix, Label, LabeledDay, Provenance
from utirisk.nn.train import TrainConfig
from utirisk.pipeline import (
    ExperimentConfig,
    Metrics,
    compute_metrics,
    corpus_digest,
    evaluate_config,
    fit_fold,
    fit_stages,
    kfold_split,
    report_table,
    run_experiment,
    run_manifest,
    train_semisupervised,
)

NODES3 = ("hallway_pir", "bathroom_door", "bed_pressure")


def _day(home, day_index, rng, uti, nodes, phys=True):
    lam = np.full((24, len(nodes)), 2.0)
    if uti:
        lam[:, 1] *= 3.0  # bathroom column
        lam[:6, :] += 1.5  # night rows
    grid = rng.poisson(lam)
    phys_vec = None
    if phys:
        temp = rng.normal(37.8 if uti else 36.7, 0.15)
        pulse = rng.normal(82 if uti else 70, 3.0)
        phys_vec = np.array([temp, pulse])
    return DailyActivityMatrix(home, dt.date(2020, 1, 1) + dt.timedelta(days=day_index),
                               grid, nodes=nodes, phys=phys_vec)


def tiny_corpus(seed=0, nodes=NODES3, unlabelled=50, per_class=8, phys=True):
    rng = np.random.default_rng(seed)
    unlab = [_day(f"U{i:03d}", i, rng, uti=(i % 10 == 0), nodes=nodes, phys=phys)
             for i in range(unlabelled)]
    labelled = []
    for i in range(per_class):
        labelled.append(LabeledDay(_day(f"L{i:03d}", i, rng, False, nodes, phys),
                                   Label.NON_UTI, Provenance.CLINICAL))
        labelled.append(LabeledDay(_day(f"M{i:03d}", i, rng, True, nodes, phys),
                                   Label.UTI, Provenance.CLINICAL))
    return Corpus(unlabelled=unlab, labelled=labelled)


FAST_AE = TrainConfig(epochs=3, max_iterations=200)
FAST_RBM = TrainConfig(lr=0.1, epochs=10, max_iterations=None)
FAST_JOINT = JointSchedule(rounds=1, classification_epochs=3, clustering_epochs=1,
                           clustering_batches=5)


class TestKfoldSplit:
    def test_disjoint_exhaustive_balanced(self):
        y = np.array([0] * 36 + [1] * 24)
        folds = kfold_split(y, 5, seed=0)
        sizes = [len(f) for f in folds]
        assert max(sizes) - min(sizes) <= 1 and sum(sizes) == 60
        joined = np.concatenate(folds)
        assert len(np.unique(joined)) == 60

    def test_stratified_within_one(self):
        y = np.array([0] * 36 + [1] * 24)
        for fold in kfold_split(y, 5, seed=1):
            pos = int(np.sum(y[fold] == 1))
            assert abs(pos - 24 / 5) < 1.0

    def test_seed_controls_assignment(self):
        y = np.arange(20) % 2
        a = kfold_split(y, 4, seed=0)
        b = kfold_split(y, 4, seed=0)
        c = kfold_split(y, 4, seed=5)
        assert all(np.array_equal(x, z) for x, z in zip(a, b))
        assert any(not np.array_equal(x, z) for x, z in zip(a, c))

    def test_k_bounds(self):
        with pytest.raises(ValueError):
            kfold_split(np.zeros(10), 1)
        with pytest.raises(ValueError):
            kfold_split(np.zeros(10), 11)


class TestComputeMetrics:
    def test_against_direct_counts(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            y = rng.integers(0, 2, size=30)
            p = rng.integers(0, 2, size=30)
            m = compute_metrics(y, p)
            tp = np.sum((y == 1) & (p == 1))
            tn = np.sum((y == 0) & (p == 0))
            fp = np.sum((y == 0) & (p == 1))
            fn = np.sum((y == 1) & (p == 0))
            assert (m.tp, m.tn, m.fp, m.fn) == (tp, tn, fp, fn)
            assert m.accuracy == pytest.approx((tp + tn) / 30)
            prec = 0.5 * ((tp / (tp + fp) if tp + fp else 0.0)
                          + (tn / (tn + fn) if tn + fn else 0.0))
            rec = 0.5 * ((tp / (tp + fn) if tp + fn else 0.0)
                         + (tn / (tn + fp) if tn + fp else 0.0))
            assert m.precision == pytest.approx(prec)
            assert m.recall == pytest.approx(rec)
            expected_f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
            assert m.f1 == pytest.approx(expected_f1)

    def test_constant_negative_structure(self):
        y = np.array([1] * 24 + [0] * 36)
        m = compute_metrics(y, np.zeros(60))
        assert m.accuracy == pytest.approx(0.6)
        assert m.precision == pytest.approx(0.3)
        assert m.recall == pytest.approx(0.5)
        assert m.f1 == pytest.approx(0.375)

    def test_constant_positive_structure(self):
        y = np.array([1] * 24 + [0] * 36)
        m = compute_metrics(y, np.ones(60))
        assert m.accuracy == pytest.approx(0.4)
        assert m.precision == pytest.approx(0.2)
        assert m.recall == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            compute_metrics(np.zeros(3), np.zeros(4))


class TestExperimentConfig:
    def test_name_composition(self):
        assert ExperimentConfig("de", "pnn").name() == "de+pnn"
        assert ExperimentConfig("none", "gnb", "sbs", sbs_d=4).name() == "none+gnb+sbs"
        assert ExperimentConfig("rbm", "knn", use_phys=True).name() == "rbm+knn+phys"

    def test_unknown_parts_rejected(self):
        with pytest.raises(ValueError):
            ExperimentConfig(extractor="pca")
        with pytest.raises(ValueError):
            ExperimentConfig(classifier="svm")
        with pytest.raises(ValueError):
            ExperimentConfig(selector="lasso")

    def test_combination_rules(self):
        with pytest.raises(ValueError):
            ExperimentConfig("none", "pnn")
        with pytest.raises(ValueError):
            ExperimentConfig("de", "gnb", selector="rfecv")
        with pytest.raises(ValueError):
            ExperimentConfig("none", "gnb", selector="sbs")  # sbs_d missing


class TestFitStages:
    def test_normalization_from_unlabelled_only(self):
        corpus = tiny_corpus()
        stages = fit_stages(corpus, ExperimentConfig("none", "gnb"))
        assert stages.extractor is None
        rms = np.sqrt(np.mean(stages.unlabelled_inputs ** 2))
        assert rms == pytest.approx(1.0)

    def test_needs_unlabelled_data(self):
        corpus = tiny_corpus()
        empty = Corpus(unlabelled=[], labelled=corpus.labelled)
        with pytest.raises(ValueError):
            fit_stages(empty, ExperimentConfig("none", "gnb"))

    def test_phys_fuses_into_dense_extractor_for_conventional_heads(self):
        corpus = tiny_corpus()
        grid_dim = 24 * len(NODES3)
        stages = fit_stages(corpus, ExperimentConfig(
            "de", "gnb", use_phys=True, extractor_train=FAST_AE))
        assert stages.unlabelled_inputs.shape[1] == grid_dim + 4

    def test_phys_stays_outside_for_pnn_and_cae(self):
        corpus = tiny_corpus()
        grid_dim = 24 * len(NODES3)
        for cfg in (ExperimentConfig("de", "pnn", use_phys=True,
                                     extractor_train=FAST_AE),
                    ExperimentConfig("cae", "gnb", use_phys=True,
                                     extractor_train=FAST_AE)):
            stages = fit_stages(corpus, cfg)
            assert stages.unlabelled_inputs.shape[1] == grid_dim


def _fit(corpus, config):
    stages = fit_stages(corpus, config)
    matrices = [d.matrix for d in corpus.labelled]
    y = np.array([d.label.value for d in corpus.labelled])
    return fit_fold(stages, matrices, y)


class TestFeatureRouting:
    def test_windowed_route_width(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("none", "gnb"))
        feats = model.features([corpus.labelled[0].matrix])
        assert feats.shape == (1, 11 * len(NODES3))

    def test_windowed_route_appends_phys(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("none", "gnb", use_phys=True))
        feats = model.features([corpus.labelled[0].matrix])
        assert feats.shape == (1, 11 * len(NODES3) + 4)

    def test_dense_latent_route(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("de", "gnb", use_phys=True,
                                              extractor_train=FAST_AE))
        feats = model.features([corpus.labelled[0].matrix])
        assert feats.shape == (1, 20)  # phys entered the extractor, not here

    def test_cae_route_appends_phys_after_latent(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("cae", "gnb", use_phys=True,
                                              extractor_train=FAST_AE))
        feats = model.features([corpus.labelled[0].matrix])
        assert feats.shape == (1, 24 * len(NODES3) * 38 + 4)

    def test_rbm_route_uses_hidden_dim(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("rbm", "knn", use_phys=True,
                                              rbm_hidden=12,
                                              extractor_train=FAST_RBM))
        feats = model.features([corpus.labelled[0].matrix])
        assert feats.shape == (1, 12)

    def test_pnn_kernels_cover_latent_plus_phys(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("de", "pnn", use_phys=True,
                                              extractor_train=FAST_AE,
                                              joint=FAST_JOINT))
        assert isinstance(model.classifier, PnnModel)
        assert model.classifier.kernels.shape == (len(corpus.labelled), 20 + 4)
        assert model.latent(corpus.labelled[0].matrix).shape == (24,)

    def test_rbm_pnn_keeps_static_kernels(self):
        corpus = tiny_corpus()
        config = ExperimentConfig("rbm", "pnn", rbm_hidden=10,
                                  extractor_train=FAST_RBM)
        stages = fit_stages(corpus, config)
        matrices = [d.matrix for d in corpus.labelled]
        y = np.array([d.label.value for d in corpus.labelled])
        model = fit_fold(stages, matrices, y)
        expected = stages.extractor.encode(model._extractor_input(matrices))
        assert np.array_equal(model.classifier.kernels, expected)


class TestScoringSurface:
    @pytest.mark.parametrize("config", [
        ExperimentConfig("none", "gnb"),
        ExperimentConfig("none", "lr"),
        ExperimentConfig("none", "knn"),
        ExperimentConfig("de", "pnn", extractor_train=FAST_AE, joint=FAST_JOINT),
    ], ids=lambda c: c.name())
    def test_predict_and_score_ranges(self, config):
        corpus = tiny_corpus()
        model = _fit(corpus, config)
        matrices = [d.matrix for d in corpus.labelled]
        pred = model.predict(matrices)
        assert pred.shape == (len(matrices),)
        assert set(np.unique(pred)) <= {0, 1}
        for m in matrices[:4]:
            assert 0.0 <= model.score(m) <= 1.0

    def test_strong_uti_day_outscores_quiet_day(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("none", "gnb"))
        uti = next(d.matrix for d in corpus.labelled if d.label is Label.UTI)
        quiet = next(d.matrix for d in corpus.labelled if d.label is Label.NON_UTI)
        assert model.score(uti) > model.score(quiet)


class TestSelectorsInFold:
    def test_sbs_records_subset(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("none", "gnb", selector="sbs",
                                              sbs_d=30))
        assert model.selected is not None and len(model.selected) == 30
        feats = model.features([corpus.labelled[0].matrix])
        assert feats.shape == (1, 30)

    def test_rfecv_records_subset(self):
        corpus = tiny_corpus()
        model = _fit(corpus, ExperimentConfig("none", "gnb", selector="rfecv"))
        assert model.selected is not None
        assert 1 <= len(model.selected) <= 11 * len(NODES3)
        feats = model.features([corpus.labelled[0].matrix])
        assert feats.shape == (1, len(model.selected))


class TestTrainSemisupervised:
    def test_full_data_fit_scores(self):
        corpus = tiny_corpus()
        model = train_semisupervised(corpus, ExperimentConfig("none", "gnb"))
        assert 0.0 <= model.score(corpus.labelled[0].matrix) <= 1.0

    def test_rejects_single_class_labels(self):
        corpus = tiny_corpus()
        only_neg = Corpus(unlabelled=corpus.unlabelled,
                          labelled=[d for d in corpus.labelled
                                    if d.label is Label.NON_UTI])
        with pytest.raises(ValueError):
            train_semisupervised(only_neg, ExperimentConfig("none", "gnb"))


class TestEvaluateAndManifest:
    def test_evaluation_report_shape(self):
        corpus = tiny_corpus()
        report = evaluate_config(corpus, ExperimentConfig("none", "gnb", folds=4))
        assert len(report.fold_metrics) == 4
        assert set(report.mean) == {"accuracy", "precision", "recall", "f1"}
        assert report.mean["f1"] > 0.7  # planted signal is strong
        assert report.runtime_seconds >= 0.0
        assert report.error is None

    def test_run_experiment_isolates_failures(self):
        corpus = tiny_corpus()
        good = ExperimentConfig("none", "gnb", folds=4)
        bad = ExperimentConfig("none", "gnb", folds=50)  # folds > labelled days
        reports = run_experiment(corpus, [good, bad])
        assert reports[0].error is None
        assert reports[1].error is not None and "ValueError" in reports[1].error

    def test_corpus_digest_order_independent_and_content_sensitive(self):
        corpus = tiny_corpus()
        digest = corpus_digest(corpus)
        shuffled = Corpus(unlabelled=list(reversed(corpus.unlabelled)),
                          labelled=list(reversed(corpus.labelled)))
        assert corpus_digest(shuffled) == digest
        bumped = tiny_corpus()
        bumped.unlabelled[0].grid[0, 0] += 1
        assert corpus_digest(bumped) != digest
        flipped = tiny_corpus()
        flipped.labelled[0].label = Label.UTI
        assert corpus_digest(flipped) != digest

    def test_report_table_and_manifest_serializable(self):
        corpus = tiny_corpus()
        reports = run_experiment(corpus, [
            ExperimentConfig("none", "gnb", folds=4),
            ExperimentConfig("none", "gnb", folds=50),
        ])
        table = report_table(reports)
        lines = table.strip().split("\n")
        assert len(lines) == 3 and lines[0].startswith("config\t")
        assert "\t-\t" in lines[2]  # error row carries dashes, not numbers
        manifest = run_manifest(corpus, reports)
        assert manifest["corpus_sha256"] == corpus_digest(corpus)
        assert len(manifest["runs"]) == 2
        json.dumps(manifest)  # must be plain data end to end
