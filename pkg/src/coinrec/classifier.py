"""Sigmoid multilayer perceptron trained by mini-batch gradient descent on MSE."""
import copy
from dataclasses import dataclass, field

import numpy as np

from coinrec.errors import BadTopology, DimensionMismatch, EmptyDataset
from coinrec.features import N_FEATURES

N_CLASSES = 14
DEFAULT_HIDDEN = 25

# Fig. 2 ordering: (i)-(iv) Rs 1, (v)-(viii) Rs 2, (ix)-(xii) Rs 5, (xiii)-(xiv) Rs 10
DENOMINATIONS = (1, 2, 5, 10)
CLASS_DENOMINATION = (1, 1, 1, 1, 2, 2, 2, 2, 5, 5, 5, 5, 10, 10)
CLASS_NAMES = (
    "Rs1 head (type 1)", "Rs1 tail (type 1)", "Rs1 head (type 2)", "Rs1 tail (type 2)",
    "Rs2 head (type 1)", "Rs2 tail (type 1)", "Rs2 head (type 2)", "Rs2 tail (type 2)",
    "Rs5 head (type 1)", "Rs5 tail (type 1)", "Rs5 head (type 2)", "Rs5 tail (type 2)",
    "Rs10 head", "Rs10 tail",
)


def denomination_of(label):
    """Face value in rupees (1, 2, 5 or 10) of class index ``label``."""
    label = int(label)
    if not 0 <= label < N_CLASSES:
        raise ValueError(f"class label must be in [0, {N_CLASSES - 1}], got {label}")
    return CLASS_DENOMINATION[label]


def sigmoid(t):
    return 1.0 / (1.0 + np.exp(-t))


@dataclass
class MlpModel:
    layer_sizes: list
    weights: list  # (fan_out, fan_in) per layer
    biases: list
    normalized: bool = True

    def __post_init__(self):
        self.layer_sizes = [int(s) for s in self.layer_sizes]
        _check_topology(self.layer_sizes)
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise BadTopology("one weight matrix and bias vector per layer required")
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.layer_sizes[i + 1], self.layer_sizes[i])
            if W.shape != want or b.shape != (want[0],):
                raise BadTopology(f"layer {i}: weight {W.shape}/bias {b.shape}, expected {want}")

    def params(self):
        """Flat list of parameter arrays: W0, b0, W1, b1, ..."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out += [W, b]
        return out

    def copy(self):
        return copy.deepcopy(self)


def _check_topology(sizes):
    if len(sizes) < 3:
        raise BadTopology(f"need at least one hidden layer, got sizes {sizes}")
    if any(s < 1 for s in sizes):
        raise BadTopology(f"layer sizes must be positive, got {sizes}")


def init_model(layer_sizes=(N_FEATURES, DEFAULT_HIDDEN, N_CLASSES), seed=0, normalized=True,
               strict_io=True):
    """Uniform +-1/sqrt(fan_in) weights from a seeded generator, zero biases.

    ``strict_io`` enforces the 400-in/14-out coin topology; switch it off for
    toy networks (only the output width is then checked).
    """
    sizes = [int(s) for s in layer_sizes]
    _check_topology(sizes)
    if strict_io and (sizes[0] != N_FEATURES or sizes[-1] != N_CLASSES):
        raise BadTopology(f"coin networks map {N_FEATURES} inputs to {N_CLASSES} outputs, got {sizes}")
    if sizes[-1] != N_CLASSES:
        raise BadTopology(f"output layer must have {N_CLASSES} units, got {sizes[-1]}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(sizes, weights, biases, normalized)


def _check_input(model, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.layer_sizes[0] or x.ndim > 2:
        raise DimensionMismatch(f"model expects {model.layer_sizes[0]} inputs, got shape {x.shape}")
    return x


def _activations(model, x):
    acts = [x]
    for W, b in zip(model.weights, model.biases):
        acts.append(sigmoid(acts[-1] @ W.T + b))
    return acts


def forward(model, x):
    """Output activations for one vector (shape (14,)) or a batch (shape (n, 14))."""
    x = _check_input(model, x)
    return _activations(model, x)[-1]


def one_hot(labels, n=N_CLASSES):
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((labels.size, n))
    out[np.arange(labels.size), labels.reshape(-1)] = 1.0
    return out


def loss(model, X, T):
    """Mean over samples of the per-sample mean squared output error."""
    out = forward(model, X)
    return float(np.mean((np.asarray(T) - out) ** 2))


def backprop_gradients(model, x, target):
    """Gradients of ``loss`` w.r.t. every parameter, ordered like ``model.params()``.

    Accepts a single sample or a batch; for a batch the loss is the sample mean.
    """
    x = _check_input(model, x)
    t = np.asarray(target, dtype=np.float64)
    single = x.ndim == 1
    X = x[None] if single else x
    T = t[None] if t.ndim == 1 else t
    if T.shape != (X.shape[0], model.layer_sizes[-1]):
        raise DimensionMismatch(f"targets of shape {t.shape} do not match outputs")
    n, k = X.shape[0], model.layer_sizes[-1]
    acts = _activations(model, X)
    out = acts[-1]
    delta = (2.0 / (n * k)) * (out - T) * out * (1.0 - out)
    grads = [None] * (2 * len(model.weights))
    for layer in range(len(model.weights) - 1, -1, -1):
        a_prev = acts[layer]
        grads[2 * layer] = delta.T @ a_prev
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer:
            delta = (delta @ model.weights[layer]) * a_prev * (1.0 - a_prev)
    return grads


def classify(model, x):
    """(label, confidence): argmax output, lowest index on ties."""
    out = forward(model, x)
    if out.ndim != 1:
        raise DimensionMismatch("classify takes a single feature vector")
    label = int(np.argmax(out))
    return label, float(out[label])


def predict(model, X):
    return np.argmax(forward(model, np.atleast_2d(X)), axis=1)


@dataclass
class TrainConfig:
    max_epochs: int = 2000
    learning_rate: float = 0.5
    batch_size: int = 32
    patience: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 1 or self.batch_size < 1 or self.patience < 1:
            raise ValueError("max_epochs, batch_size and patience must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")


@dataclass
class TrainReport:
    epochs_run: int = 0
    best_epoch: int = 0
    train_mse: list = field(default_factory=list)
    val_mse: list = field(default_factory=list)
    train_percent_error: list = field(default_factory=list)
    val_percent_error: list = field(default_factory=list)
    test_mse: float = float("nan")
    test_percent_error: float = float("nan")
    seed: int = 0


def _mse_and_error(model, X, y):
    out = forward(model, X)
    mse = float(np.mean((one_hot(y, out.shape[1]) - out) ** 2))
    wrong = int(np.count_nonzero(np.argmax(out, axis=1) != y))
    return mse, 100.0 * wrong / len(y)


def train(model, train_set, val_set, config=None, test_set=None, log=None):
    """Mini-batch gradient descent with validation early stopping.

    ``train_set``/``val_set``/``test_set`` are ``(X, labels)`` pairs. Epochs
    are numbered from 1; training stops after ``patience`` epochs without a
    strict improvement in validation MSE, and the returned model is the
    snapshot from the best validation epoch.
    """
    config = config or TrainConfig()
    X, y = (np.asarray(a) for a in train_set)
    Xv, yv = (np.asarray(a) for a in val_set)
    if len(X) == 0 or len(Xv) == 0:
        raise EmptyDataset("training and validation sets must be nonempty")
    for labels in (y, yv):
        if labels.min() < 0 or labels.max() >= model.layer_sizes[-1]:
            raise ValueError("labels out of range")
    if config.batch_size > len(X):
        raise ValueError(f"batch_size {config.batch_size} exceeds training set size {len(X)}")
    X = _check_input(model, X)
    Xv = _check_input(model, Xv)
    T = one_hot(y, model.layer_sizes[-1])

    rng = np.random.default_rng(config.seed)
    model = model.copy()
    report = TrainReport(seed=config.seed)
    best = None
    best_val = np.inf
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(X))
        if config.learning_rate > 0:
            for start in range(0, len(X), config.batch_size):
                idx = order[start:start + config.batch_size]
                grads = backprop_gradients(model, X[idx], T[idx])
                for p, g in zip(model.params(), grads):
                    p -= config.learning_rate * g
        tr_mse, tr_err = _mse_and_error(model, X, y)
        va_mse, va_err = _mse_and_error(model, Xv, yv)
        report.train_mse.append(tr_mse)
        report.val_mse.append(va_mse)
        report.train_percent_error.append(tr_err)
        report.val_percent_error.append(va_err)
        report.epochs_run = epoch
        if log is not None:
            log(epoch, tr_mse, va_mse)
        if va_mse < best_val:
            best_val = va_mse
            best = model.copy()
            report.best_epoch = epoch
        elif epoch - report.best_epoch >= config.patience:
            break

    if test_set is not None:
        Xt, yt = (np.asarray(a) for a in test_set)
        if len(Xt):
            report.test_mse, report.test_percent_error = _mse_and_error(best, Xt, yt)
    return best, report
