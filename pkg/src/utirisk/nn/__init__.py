from utirisk.nn.layers import ACTIVATIONS, Conv2D, Dense, Flatten, Layer, Reshape
from utirisk.nn.losses import LOSSES, bce, get_loss, mse
from utirisk.nn.network import (
    Conv2DSpec,
    DenseSpec,
    FlattenSpec,
    LayerSpec,
    Network,
    ReshapeSpec,
    validate_spec,
)
from utirisk.nn.optim import Adam, SGD, make_optimizer
from utirisk.nn.train import TrainConfig, TrainingError, train
from utirisk.nn.gradcheck import GradCheckResult, check_gradients, standard_suite
from utirisk.nn.serialize import (
    arrays_to_payload,
    load_arrays,
    payload_to_arrays,
    save_arrays,
)

__all__ = [
    "ACTIVATIONS",
    "Conv2D",
    "Dense",
    "Flatten",
    "Layer",
    "Reshape",
    "LOSSES",
    "bce",
    "get_loss",
    "mse",
    "Conv2DSpec",
    "DenseSpec",
    "FlattenSpec",
    "LayerSpec",
    "Network",
    "ReshapeSpec",
    "validate_spec",
    "Adam",
    "SGD",
    "make_optimizer",
    "TrainConfig",
    "TrainingError",
    "train",
    "GradCheckResult",
    "check_gradients",
    "standard_suite",
    "arrays_to_payload",
    "load_arrays",
    "payload_to_arrays",
    "save_arrays",
]
