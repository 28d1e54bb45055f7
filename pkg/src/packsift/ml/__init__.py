"""Lightweight ML detection: hashed tokens + logistic regression."""

from .features import DEFAULT_DIMENSION, MIN_DIMENSION, featurize, report_tokens, token_bucket
from .model import (
    LABEL_BENIGN,
    LABEL_MALICIOUS,
    MODEL_FORMAT_VERSION,
    Model,
    ModelFormatError,
    TrainConfig,
    accuracy,
    label_of,
    load_model,
    loss_and_gradient,
    mean_log_loss,
    save_model,
    score,
    score_vector,
    sigmoid,
    train,
    train_vectors,
)

__all__ = [
    "DEFAULT_DIMENSION",
    "LABEL_BENIGN",
    "LABEL_MALICIOUS",
    "MIN_DIMENSION",
    "MODEL_FORMAT_VERSION",
    "Model",
    "ModelFormatError",
    "TrainConfig",
    "accuracy",
    "featurize",
    "label_of",
    "load_model",
    "loss_and_gradient",
    "mean_log_loss",
    "report_tokens",
    "save_model",
    "score",
    "score_vector",
    "sigmoid",
    "token_bucket",
    "train",
    "train_vectors",
]
