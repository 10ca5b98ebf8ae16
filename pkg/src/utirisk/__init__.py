"""Semi-supervised UTI risk analysis engine for in-home sensor data.

The package is organised in layers:

* ``utirisk.data`` -- sensor events, daily activity matrices, synthetic
  corpus generation and file formats.
* ``utirisk.preprocess`` -- feature scaling and the windowed statistical
  features used by the conventional classifiers.
* ``utirisk.nn`` -- a small reverse-mode differentiation engine (dense and
  2-D convolutional layers) used by every network in the package.
* ``utirisk.extractors`` -- unsupervised feature extractors (AE, DE, CAE,
  RBM) trained on unlabelled data.
* ``utirisk.classifiers`` -- supervised heads: Gaussian naive Bayes,
  logistic regression, KNN, and the kernel-density network with continual
  kernel addition.
* ``utirisk.featsel`` -- wrapper feature selection (SBS, RFECV).
* ``utirisk.pipeline`` -- end-to-end pipelines, cross-validated experiments
  and metrics.
* ``utirisk.snapshot`` -- versioned, checksummed model snapshots.
* ``utirisk.service`` -- FastAPI scoring/alerting service.
"""

__version__ = "0.1.0"
