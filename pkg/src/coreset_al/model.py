"""Multinomial logistic classifier trained with mini-batch gradient steps.

The model is linear over the raw features plus a bias column, optimised on
mean cross-entropy. Weights start at zero, so an untrained model predicts
the uniform distribution. Training stops early once train accuracy reaches
the configured target; the optimiser state is rebuilt from scratch on every
call, nothing warm-starts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from coreset_al.geometry import as_feature_matrix
from coreset_al.seeding import make_rng

PLAIN_GRADIENT = "plain-gradient"
ADAPTIVE_MOMENT = "adaptive-moment"
OPTIMIZERS = (PLAIN_GRADIENT, ADAPTIVE_MOMENT)

# Guards the log in cross-entropy against an exactly-zero predicted
# probability for the true class (a saturated, maximally wrong model).
_PROB_FLOOR = 1e-300


@dataclass
class TrainConfig:
    """Hyperparameters of one training run.

    Attributes:
        learning_rate: Step size, must be positive.
        epochs: Maximum full passes over the data.
        batch_size: Mini-batch size; the last batch of an epoch may be ragged.
        optimizer: ``"plain-gradient"`` or ``"adaptive-moment"``.
        target_train_accuracy: Training stops once train accuracy reaches
            this value, in ``(0, 1]``.
        seed: Controls mini-batch shuffling only.
    """

    learning_rate: float = 0.05
    epochs: int = 300
    batch_size: int = 32
    optimizer: str = ADAPTIVE_MOMENT
    target_train_accuracy: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be nonnegative, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be at least 1, got {self.batch_size}")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(
                f"unknown optimizer {self.optimizer!r}; expected one of {OPTIMIZERS}"
            )
        if not 0.0 < self.target_train_accuracy <= 1.0:
            raise ValueError(
                f"target_train_accuracy must lie in (0, 1], got {self.target_train_accuracy}"
            )


@dataclass
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


@dataclass
class Classifier:
    """Trained (or blank) linear classifier.

    ``weights`` has shape ``(class_count, dims + 1)`` with the bias in the
    last column. ``warnings`` collects non-fatal notes from training, e.g.
    classes that never appeared in the labels.
    """

    weights: np.ndarray
    class_count: int
    training_log: list[EpochStats] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class EvalResult:
    accuracy: float
    mean_cross_entropy: float


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilised by subtracting each row's max."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def loss_and_gradient(weights, features, labels, class_count: int):
    """Mean cross-entropy and its full-batch gradient at ``weights``.

    Args:
        weights: Array of shape (class_count, dims + 1), bias last.
        features: Array of shape (points, dims).
        labels: Integer class per point.
        class_count: Number of classes C (labels must lie in [0, C)).

    Returns:
        ``(loss, gradient)`` with the gradient shaped like ``weights``.
    """
    weights = np.asarray(weights, dtype=np.float64)
    x_aug = _augment(as_feature_matrix(features, "features"))
    y = _as_labels(labels, x_aug.shape[0], class_count)
    probs = softmax(x_aug @ weights.T)
    picked = probs[np.arange(y.shape[0]), y]
    loss = float(-np.mean(np.log(np.maximum(picked, _PROB_FLOOR))))
    onehot = np.zeros_like(probs)
    onehot[np.arange(y.shape[0]), y] = 1.0
    grad = (probs - onehot).T @ x_aug / y.shape[0]
    return loss, grad


def train(features, labels, config: TrainConfig | None = None, class_count: int | None = None) -> Classifier:
    """Fit a classifier from zero-initialised weights.

    Args:
        features: Training rows, shape (points, dims), at least one row.
        labels: Integer class per row.
        config: Hyperparameters; defaults to ``TrainConfig()``.
        class_count: Total number of classes. Inferred as ``max(labels) + 1``
            (at least 2) when omitted; pass it explicitly when some classes
            may be missing from this particular label set.

    Returns:
        The fitted :class:`Classifier`, with per-epoch loss/accuracy in
        ``training_log``. A class absent from ``labels`` is recorded as a
        warning on the model, not an error.
    """
    if config is None:
        config = TrainConfig()
    x = as_feature_matrix(features, "features")
    if x.shape[0] == 0:
        raise ValueError("training set is empty")
    if class_count is None:
        class_count = max(2, int(np.max(np.asarray(labels))) + 1)
    y = _as_labels(labels, x.shape[0], class_count)

    model = Classifier(
        weights=np.zeros((class_count, x.shape[1] + 1)),
        class_count=int(class_count),
    )
    present = np.bincount(y, minlength=class_count) > 0
    for cls in np.flatnonzero(~present):
        model.warnings.append(f"class {cls} has no training examples")

    x_aug = _augment(x)
    onehot = np.zeros((x.shape[0], class_count))
    onehot[np.arange(x.shape[0]), y] = 1.0
    rng = make_rng(config.seed)
    weights = model.weights

    # adaptive-moment state (unused under plain gradient descent)
    first = np.zeros_like(weights)
    second = np.zeros_like(weights)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0

    for epoch in range(config.epochs):
        perm = rng.permutation(x.shape[0])
        for start in range(0, x.shape[0], config.batch_size):
            idx = perm[start : start + config.batch_size]
            probs = softmax(x_aug[idx] @ weights.T)
            grad = (probs - onehot[idx]).T @ x_aug[idx] / idx.shape[0]
            if config.optimizer == PLAIN_GRADIENT:
                weights -= config.learning_rate * grad
            else:
                step += 1
                first = beta1 * first + (1.0 - beta1) * grad
                second = beta2 * second + (1.0 - beta2) * grad * grad
                first_hat = first / (1.0 - beta1**step)
                second_hat = second / (1.0 - beta2**step)
                weights -= config.learning_rate * first_hat / (np.sqrt(second_hat) + eps)
        probs = softmax(x_aug @ weights.T)
        picked = probs[np.arange(y.shape[0]), y]
        loss = float(-np.mean(np.log(np.maximum(picked, _PROB_FLOOR))))
        accuracy = float(np.mean(probs.argmax(axis=1) == y))
        model.training_log.append(EpochStats(epoch, loss, accuracy))
        if accuracy >= config.target_train_accuracy:
            break
    return model


def predict_proba(model: Classifier, features) -> np.ndarray:
    """Class-probability rows for ``features`` under ``model``."""
    x = as_feature_matrix(features, "features")
    dims = model.weights.shape[1] - 1
    if x.shape[1] != dims:
        raise ValueError(
            f"model expects {dims} features, got {x.shape[1]}"
        )
    return softmax(_augment(x) @ model.weights.T)


def evaluate(model: Classifier, features, labels) -> EvalResult:
    """Accuracy and mean cross-entropy of ``model`` on a labeled set."""
    x = as_feature_matrix(features, "features")
    if x.shape[0] == 0:
        raise ValueError("evaluation set is empty")
    y = _as_labels(labels, x.shape[0], model.class_count)
    probs = predict_proba(model, x)
    picked = probs[np.arange(y.shape[0]), y]
    return EvalResult(
        accuracy=float(np.mean(probs.argmax(axis=1) == y)),
        mean_cross_entropy=float(-np.mean(np.log(np.maximum(picked, _PROB_FLOOR)))),
    )


def save_weights(model: Classifier, path) -> None:
    """Write model weights as CSV rows ``class,w0,...,w{d-1},bias``."""
    dims = model.weights.shape[1] - 1
    header = ["class", *(f"w{i}" for i in range(dims)), "bias"]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for cls in range(model.class_count):
            writer.writerow([cls, *(str(float(v)) for v in model.weights[cls])])


def load_weights(path) -> Classifier:
    """Read a classifier saved by :func:`save_weights`."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or header[0] != "class" or header[-1] != "bias":
            raise ValueError(f"{path}: expected a 'class,w0,...,bias' header, got {header}")
        dims = len(header) - 2
        if [h for h in header[1:-1]] != [f"w{i}" for i in range(dims)]:
            raise ValueError(f"{path}: malformed weight header {header}")
        rows = []
        for row in reader:
            if len(row) != len(header):
                raise ValueError(f"{path}: row has {len(row)} fields, expected {len(header)}")
            if int(row[0]) != len(rows):
                raise ValueError(f"{path}: class rows must be 0..C-1 in order")
            rows.append([float(v) for v in row[1:]])
    if not rows:
        raise ValueError(f"{path}: no weight rows")
    return Classifier(weights=np.asarray(rows, dtype=np.float64), class_count=len(rows))


def _augment(x: np.ndarray) -> np.ndarray:
    return np.hstack([x, np.ones((x.shape[0], 1))])


def _as_labels(labels, expected_len: int, class_count: int) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1 or y.shape[0] != expected_len:
        raise ValueError(
            f"labels must be a vector of length {expected_len}, got shape {y.shape}"
        )
    if not np.issubdtype(y.dtype, np.integer):
        rounded = np.rint(np.asarray(y, dtype=np.float64))
        if not np.array_equal(rounded, np.asarray(y, dtype=np.float64)):
            raise ValueError("labels must be integers")
        y = rounded.astype(np.int64)
    y = y.astype(np.int64)
    if y.size and (y.min() < 0 or y.max() >= class_count):
        raise ValueError(
            f"labels must lie in [0, {class_count}), got range "
            f"[{int(y.min())}, {int(y.max())}]"
        )
    return y
