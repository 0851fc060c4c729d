"""Fully-connected autoencoder with a width-2 bottleneck, trained with Adam.

The network is symmetric around the bottleneck. Hidden layers use ReLU; the
bottleneck and the output layer use sigmoid, so latent coordinates and
reconstructions live in (0, 1). Inputs are rescaled per feature into [0, 1]
before they reach the network and reconstructions are mapped back, which also
keeps decoded values inside the per-feature min/max seen at training time.

Everything is plain numpy: given the same seed and data, training produces a
bitwise-identical loss trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSet
from .dataset import Dataset


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch: int):
        super().__init__(f"training loss became non-finite at epoch {epoch}")
        self.epoch = epoch


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z):
    return (z > 0.0).astype(np.float64)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _sigmoid_grad(z):
    s = _sigmoid(z)
    return s * (1.0 - s)


_ACT = {"relu": (_relu, _relu_grad), "sigmoid": (_sigmoid, _sigmoid_grad)}


def default_layer_sizes(d: int) -> tuple[int, ...]:
    """Architecture used for wide inputs such as 784-pixel images."""
    return (128, 32, 2, 32, 128, d)


def _activations_for(layer_sizes: tuple[int, ...]) -> tuple[str, ...]:
    bottleneck = len(layer_sizes) // 2 - 1
    return tuple(
        "sigmoid" if i == bottleneck or i == len(layer_sizes) - 1 else "relu"
        for i in range(len(layer_sizes))
    )


@dataclass
class TrainConfig:
    epochs: int = 200
    batch_size: int = 64
    learning_rate: float = 1e-3
    seed: int = 0
    loss: str = "mse"
    layer_sizes: tuple[int, ...] | None = None  # first hidden .. output; None picks the default

    def validate(self, d: int, n: int) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if n < self.batch_size:
            raise ValueError("batch_size cannot exceed the number of rows")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.loss != "mse":
            raise ValueError(f"unsupported loss {self.loss!r}")
        sizes = self.layer_sizes or default_layer_sizes(d)
        if len(sizes) % 2 != 0 or len(sizes) < 2:
            raise ValueError("layer_sizes must have even length (encoder + decoder)")
        b = len(sizes) // 2 - 1
        if sizes[b] != 2:
            raise ValueError("bottleneck layer must have width 2")
        for j in range(1, b + 1):
            if b + j < len(sizes) - 1 and sizes[b - j] != sizes[b + j]:
                raise ValueError("encoder and decoder sizes must mirror each other")
        if sizes[-1] != d:
            raise ValueError("output layer width must equal the feature count")


@dataclass
class AEModel:
    layer_sizes: tuple[int, ...]  # first hidden layer .. output layer
    activations: tuple[str, ...]
    weights: list  # weights[l]: (fan_in, fan_out)
    biases: list  # biases[l]: (fan_out,)
    input_min: np.ndarray  # (d,)
    input_span: np.ndarray  # (d,) max - min per feature, 0 for constant features
    seed: int
    loss_history: list = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.input_min.shape[0]

    @property
    def bottleneck_index(self) -> int:
        return len(self.layer_sizes) // 2 - 1

    def scale(self, xs) -> np.ndarray:
        div = np.where(self.input_span > 0.0, self.input_span, 1.0)
        return (np.asarray(xs, dtype=np.float64) - self.input_min) / div

    def unscale(self, zs) -> np.ndarray:
        # multiplying by the raw span pins constant features to their one value
        return self.input_min + np.asarray(zs, dtype=np.float64) * self.input_span

    def _run(self, a, start: int, stop: int) -> np.ndarray:
        for l in range(start, stop):
            a = _ACT[self.activations[l]][0](a @ self.weights[l] + self.biases[l])
        return a

    def encode_batch(self, xs) -> np.ndarray:
        a = self.scale(np.atleast_2d(np.asarray(xs, dtype=np.float64)))
        return self._run(a, 0, self.bottleneck_index + 1)

    def encode(self, x) -> np.ndarray:
        return self.encode_batch(np.asarray(x)[None, :])[0]

    def decode_batch(self, ys) -> np.ndarray:
        a = np.atleast_2d(np.asarray(ys, dtype=np.float64))
        a = self._run(a, self.bottleneck_index + 1, len(self.layer_sizes))
        return self.unscale(a)

    def decode(self, y) -> np.ndarray:
        return self.decode_batch(np.asarray(y)[None, :])[0]

    # generic projection interface shared with PCAModel
    def project(self, x) -> np.ndarray:
        return self.encode(x)

    def project_batch(self, xs) -> np.ndarray:
        return self.encode_batch(xs)

    def to_json(self) -> dict:
        return {
            "kind": "autoencoder",
            "layer_sizes": list(self.layer_sizes),
            "activations": list(self.activations),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "input_scale": {
                "min": self.input_min.tolist(),
                "span": self.input_span.tolist(),
            },
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "AEModel":
        return cls(
            layer_sizes=tuple(payload["layer_sizes"]),
            activations=tuple(payload["activations"]),
            weights=[np.asarray(w, dtype=np.float64) for w in payload["weights"]],
            biases=[np.asarray(b, dtype=np.float64) for b in payload["biases"]],
            input_min=np.asarray(payload["input_scale"]["min"], dtype=np.float64),
            input_span=np.asarray(payload["input_scale"]["span"], dtype=np.float64),
            seed=int(payload["seed"]),
        )


def init_model(d: int, config: TrainConfig, input_min=None, input_span=None) -> AEModel:
    """Xavier-uniform weights, zero biases, all draws from one seeded generator."""
    sizes = tuple(config.layer_sizes or default_layer_sizes(d))
    rng = np.random.default_rng(config.seed)
    fan_ins = (d, *sizes[:-1])
    weights, biases = [], []
    for fan_in, fan_out in zip(fan_ins, sizes):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return AEModel(
        layer_sizes=sizes,
        activations=_activations_for(sizes),
        weights=weights,
        biases=biases,
        input_min=np.zeros(d) if input_min is None else np.asarray(input_min, dtype=np.float64),
        input_span=np.ones(d) if input_span is None else np.asarray(input_span, dtype=np.float64),
        seed=config.seed,
    )


def _forward_trace(model: AEModel, a0):
    """Forward pass keeping pre-activations for backprop. a0 is already scaled."""
    pre, acts = [], [a0]
    a = a0
    for l in range(len(model.layer_sizes)):
        z = a @ model.weights[l] + model.biases[l]
        a = _ACT[model.activations[l]][0](z)
        pre.append(z)
        acts.append(a)
    return pre, acts


def reconstruction_loss(model: AEModel, xs) -> float:
    """Mean squared reconstruction error in scaled units."""
    a = model.scale(np.atleast_2d(np.asarray(xs, dtype=np.float64)))
    out = model._run(a, 0, len(model.layer_sizes))
    return float(np.mean((out - a) ** 2))


def loss_gradients(model: AEModel, xs):
    """Backpropagated gradients of the mean squared reconstruction error.

    Returns (loss, grad_weights, grad_biases) with shapes matching the model
    parameters. Used by training and, independently perturbed, by the
    finite-difference gradient check.
    """
    a0 = model.scale(np.atleast_2d(np.asarray(xs, dtype=np.float64)))
    pre, acts = _forward_trace(model, a0)
    out = acts[-1]
    loss = float(np.mean((out - a0) ** 2))
    delta = 2.0 * (out - a0) / out.size
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for l in range(len(model.layer_sizes) - 1, -1, -1):
        delta = delta * _ACT[model.activations[l]][1](pre[l])
        grads_w[l] = acts[l].T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ model.weights[l].T
    return loss, grads_w, grads_b


def train_autoencoder(data: Dataset, config: TrainConfig | None = None) -> AEModel:
    """Train on all rows of the dataset. Deterministic given config.seed.

    The per-epoch mean batch loss is recorded on the returned model as
    loss_history. Raises TrainingDivergedError if the loss stops being finite.
    """
    config = config or TrainConfig()
    xs = data.values
    n, d = xs.shape
    config.validate(d, n)

    mins = xs.min(axis=0)
    spans = xs.max(axis=0) - mins
    model = init_model(d, config, input_min=mins, input_span=spans)

    adam_m = [np.zeros_like(w) for w in model.weights] + [np.zeros_like(b) for b in model.biases]
    adam_v = [np.zeros_like(w) for w in model.weights] + [np.zeros_like(b) for b in model.biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0

    shuffle_rng = np.random.default_rng(config.seed + 1)
    history: list[float] = []
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        batch_losses = []
        for start in range(0, n, config.batch_size):
            batch = xs[order[start : start + config.batch_size]]
            loss, gw, gb = loss_gradients(model, batch)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            batch_losses.append(loss)
            step += 1
            params = model.weights + model.biases
            grads = gw + gb
            for k, (p, g) in enumerate(zip(params, grads)):
                adam_m[k] = beta1 * adam_m[k] + (1 - beta1) * g
                adam_v[k] = beta2 * adam_v[k] + (1 - beta2) * (g * g)
                m_hat = adam_m[k] / (1 - beta1**step)
                v_hat = adam_v[k] / (1 - beta2**step)
                p -= config.learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        history.append(float(np.mean(batch_losses)))

    model.loss_history = history
    return model


@dataclass
class FeasibilityResult:
    feasible: bool
    x: np.ndarray  # decoded feature vector, original units
    violations: list


def check_feasibility(
    model: AEModel, y, constraints: ConstraintSet, lock_tolerances=None
) -> FeasibilityResult:
    """Decode a plane point and test it against the constraint set.

    There is no latent search: feasibility of a plane position is exactly the
    feasibility of its decoded feature vector. Equality locks are checked
    within a per-feature tolerance band since decoded values are continuous.
    """
    x = model.decode(y)
    violations = constraints.violations(x, lock_tolerances)
    return FeasibilityResult(feasible=not violations, x=x, violations=violations)
