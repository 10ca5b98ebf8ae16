from utirisk.classifiers.gnb import GnbModel, fit_gnb, predict_gnb
from utirisk.classifiers.joint import (
    JointResult,
    JointSchedule,
    pnn_report_with_grads,
    train_joint,
)
from utirisk.classifiers.linear import (
    KnnModel,
    LrModel,
    fit_knn,
    fit_lr,
    predict_knn,
    predict_lr,
)
from utirisk.classifiers.pnn import (
    NON_UTI,
    UTI,
    PnnModel,
    class_probabilities,
    fit_pnn,
    pnn_add_kernel,
    pnn_phi,
    pnn_probability,
    predict_pnn,
    risk_probability,
)
from utirisk.classifiers.wrappers import GnbClassifier, KnnClassifier, LrClassifier

__all__ = [
    "GnbModel",
    "fit_gnb",
    "predict_gnb",
    "JointResult",
    "JointSchedule",
    "pnn_report_with_grads",
    "train_joint",
    "KnnModel",
    "LrModel",
    "fit_knn",
    "fit_lr",
    "predict_knn",
    "predict_lr",
    "NON_UTI",
    "UTI",
    "PnnModel",
    "class_probabilities",
    "fit_pnn",
    "pnn_add_kernel",
    "pnn_phi",
    "pnn_probability",
    "predict_pnn",
    "risk_probability",
    "GnbClassifier",
    "KnnClassifier",
    "LrClassifier",
]
