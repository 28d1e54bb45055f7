"""Logistic-regression detector over hashed behavior tokens.

Plain SGD, deterministically shuffled per epoch, so the same data, config,
and dimension always reproduce bit-identical weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..behavior.records import PhaseReport
from .features import DEFAULT_DIMENSION, MIN_DIMENSION, featurize

MODEL_FORMAT_VERSION = "1"

LABEL_BENIGN = 0
LABEL_MALICIOUS = 1


class ModelFormatError(ValueError):
    """Raised for corrupt, truncated, or version-mismatched model files."""


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 50
    rng_seed: int = 42
    l2: float = 1e-4

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class Model:
    weights: np.ndarray
    bias: float
    dimension: int
    hash_seed: int
    threshold: float = 0.5
    trained_on: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")
        if self.weights.shape != (self.dimension,):
            raise ValueError("weights length does not match dimension")


def sigmoid(z: float) -> float:
    # clamp keeps the output strictly inside (0, 1)
    z = max(-30.0, min(30.0, z))
    return 1.0 / (1.0 + math.exp(-z))


def score(model: Model, phases: Mapping[str, PhaseReport]) -> float:
    vec = featurize(phases, model.dimension, model.hash_seed)
    return score_vector(model, vec)


def score_vector(model: Model, vec: np.ndarray) -> float:
    if vec.shape != (model.dimension,):
        raise ValueError(f"feature dimension {vec.shape} does not match model ({model.dimension},)")
    return sigmoid(float(model.weights @ vec) + model.bias)


def label_of(model: Model, probability: float) -> str:
    return "malicious" if probability >= model.threshold else "benign"


def mean_log_loss(model: Model, vectors: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for vec, y in zip(vectors, labels):
        p = score_vector(model, vec)
        p = min(max(p, 1e-15), 1 - 1e-15)
        total += -(y * math.log(p) + (1 - y) * math.log(1 - p))
    return total / len(labels)


def loss_and_gradient(
    weights: np.ndarray, bias: float, vec: np.ndarray, y: int, l2: float
) -> tuple[float, np.ndarray, float]:
    """Per-example regularized log loss and its analytic gradient."""
    p = sigmoid(float(weights @ vec) + bias)
    p_safe = min(max(p, 1e-15), 1 - 1e-15)
    loss = -(y * math.log(p_safe) + (1 - y) * math.log(1 - p_safe))
    loss += 0.5 * l2 * float(weights @ weights)
    grad_w = (p - y) * vec + l2 * weights
    grad_b = p - y
    return loss, grad_w, grad_b


def train(
    dataset: Sequence[tuple[Mapping[str, PhaseReport], int]],
    config: TrainConfig = TrainConfig(),
    dimension: int = DEFAULT_DIMENSION,
    hash_seed: int = 0,
) -> Model:
    """Fit on (report phases, label) pairs; labels are 0 benign / 1 malicious."""
    if dimension < MIN_DIMENSION:
        raise ValueError(f"dimension must be >= {MIN_DIMENSION}")
    labels = [int(label) for _, label in dataset]
    if LABEL_BENIGN not in labels or LABEL_MALICIOUS not in labels:
        raise ValueError("training data must contain both benign and malicious examples")

    vectors = np.stack([featurize(phases, dimension, hash_seed) for phases, _ in dataset])
    y = np.asarray(labels, dtype=np.float64)
    return train_vectors(vectors, y, config, dimension, hash_seed)


def train_vectors(
    vectors: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
    dimension: int,
    hash_seed: int,
) -> Model:
    weights = np.zeros(dimension, dtype=np.float64)
    bias = 0.0
    rng = np.random.default_rng(config.rng_seed)
    order = np.arange(len(labels))
    for _ in range(config.epochs):
        rng.shuffle(order)
        for idx in order:
            vec = vectors[idx]
            p = sigmoid(float(weights @ vec) + bias)
            err = p - labels[idx]
            weights -= config.learning_rate * (err * vec + config.l2 * weights)
            bias -= config.learning_rate * err
    counts = {
        "benign": int(np.sum(labels == LABEL_BENIGN)),
        "malicious": int(np.sum(labels == LABEL_MALICIOUS)),
    }
    return Model(
        weights=weights,
        bias=bias,
        dimension=dimension,
        hash_seed=hash_seed,
        trained_on=counts,
    )


def accuracy(model: Model, vectors: np.ndarray, labels: np.ndarray) -> float:
    hits = sum(
        1
        for vec, y in zip(vectors, labels)
        if (score_vector(model, vec) >= model.threshold) == bool(y)
    )
    return hits / len(labels)


def save_model(model: Model, path: str | Path) -> None:
    """JSON with a versioned header; floats round-trip exactly via repr."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "dimension": model.dimension,
        "hash_seed": model.hash_seed,
        "threshold": model.threshold,
        "trained_on": model.trained_on,
        "bias": model.bias,
        "weights": model.weights.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> Model:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"unreadable model file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError(f"model file {path} is not an object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"model format version {version!r} not supported (expected {MODEL_FORMAT_VERSION!r})"
        )
    try:
        weights = np.asarray(doc["weights"], dtype=np.float64)
        model = Model(
            weights=weights,
            bias=float(doc["bias"]),
            dimension=int(doc["dimension"]),
            hash_seed=int(doc["hash_seed"]),
            threshold=float(doc["threshold"]),
            trained_on={k: int(v) for k, v in doc.get("trained_on", {}).items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model file {path}: {exc}") from exc
    return model
