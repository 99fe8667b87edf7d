"""Split feedforward network with hand-written reverse-mode gradients.

The model is a plain multilayer perceptron cut at a configurable layer
boundary into a device-side encoder and a server-side decoder.  All
parameters live in a single flat float64 vector so that training loops,
trajectory averages, and snapshot files can treat the weights as ordinary
vectors.  Layout: for each layer in order, the weight matrix in row-major
order followed by the bias vector.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exceptions import ConfigurationError

__all__ = [
    "NetworkSpec",
    "Prediction",
    "init_params",
    "unflatten_params",
    "flatten_params",
    "forward",
    "forward_batch",
    "split_forward",
    "clipped_cross_entropy",
    "gradient",
    "batch_loss_and_gradient",
    "save_params",
    "load_params",
]

ACTIVATIONS = ("relu", "tanh", "identity")

# Feature transform applied at the split boundary; backward pass treats it
# as the identity (pass-through), which is exact for additive noise.
FeaturePipeline = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture of the split classifier.

    layer_sizes are the widths (input, hidden..., output); split_index is
    the layer boundary separating encoder from decoder, between 0 (encoder
    is empty, the raw input is transmitted) and the number of weight layers
    (decoder reduces to the softmax head).
    """

    layer_sizes: tuple[int, ...]
    split_index: int
    activation: str | tuple[str, ...] = "relu"

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 2:
            raise ConfigurationError("need at least input and output widths")
        if any(s < 1 for s in sizes):
            raise ConfigurationError(f"layer widths must be >= 1, got {sizes}")
        if sizes[-1] < 2:
            raise ConfigurationError("output width must be >= 2 for classification")
        if not 0 <= self.split_index <= self.n_layers:
            raise ConfigurationError(
                f"split_index {self.split_index} outside [0, {self.n_layers}]"
            )
        acts = self.activation
        if isinstance(acts, str):
            acts = (acts,) * max(self.n_layers - 1, 0)
        else:
            acts = tuple(acts)
        if len(acts) != max(self.n_layers - 1, 0):
            raise ConfigurationError(
                f"need {self.n_layers - 1} hidden activations, got {len(acts)}"
            )
        for name in acts:
            if name not in ACTIVATIONS:
                raise ConfigurationError(f"unknown activation {name!r}")
        object.__setattr__(self, "activation", acts)

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_classes(self) -> int:
        return self.layer_sizes[-1]

    @property
    def feature_dim(self) -> int:
        """Width of the vector crossing the split boundary."""
        return self.layer_sizes[self.split_index]

    @property
    def n_params(self) -> int:
        sizes = self.layer_sizes
        return sum(sizes[i + 1] * sizes[i] + sizes[i + 1] for i in range(self.n_layers))

    def spec_hash(self) -> str:
        key = f"{self.layer_sizes}|{self.activation}|{self.split_index}"
        return hashlib.sha256(key.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Prediction:
    """Logits and the softmax distribution over classes."""

    logits: np.ndarray
    probabilities: np.ndarray


def _check_params(spec: NetworkSpec, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (spec.n_params,):
        raise ConfigurationError(
            f"parameter vector has shape {params.shape}, expected ({spec.n_params},)"
        )
    return params


def init_params(spec: NetworkSpec, rng: np.random.Generator) -> np.ndarray:
    """Glorot-scaled random weights, zero biases, as one flat vector."""
    chunks = []
    sizes = spec.layer_sizes
    for i in range(spec.n_layers):
        n_in, n_out = sizes[i], sizes[i + 1]
        scale = np.sqrt(2.0 / (n_in + n_out))
        chunks.append(scale * rng.standard_normal((n_out, n_in)).ravel())
        chunks.append(np.zeros(n_out))
    return np.concatenate(chunks)


def unflatten_params(
    spec: NetworkSpec, params: np.ndarray
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Views of the flat vector as per-layer (weights, bias) pairs."""
    params = _check_params(spec, params)
    sizes = spec.layer_sizes
    layers = []
    offset = 0
    for i in range(spec.n_layers):
        n_in, n_out = sizes[i], sizes[i + 1]
        w = params[offset : offset + n_out * n_in].reshape(n_out, n_in)
        offset += n_out * n_in
        b = params[offset : offset + n_out]
        offset += n_out
        layers.append((w, b))
    return layers


def flatten_params(layers: Sequence[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    chunks = []
    for w, b in layers:
        chunks.append(np.asarray(w, dtype=np.float64).ravel())
        chunks.append(np.asarray(b, dtype=np.float64).ravel())
    return np.concatenate(chunks)


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    return z


def _activate_grad(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0.0).astype(np.float64)
    if name == "tanh":
        a = np.tanh(z)
        return 1.0 - a * a
    return np.ones_like(z)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def _forward_trace(
    spec: NetworkSpec,
    params: np.ndarray,
    x_batch: np.ndarray,
    pipeline: FeaturePipeline | None,
) -> tuple[list[np.ndarray], list[np.ndarray], np.ndarray]:
    """Run the batch through encoder, split pipeline, and decoder.

    Returns per-layer pre-activations, per-layer inputs (the value each
    layer actually consumed, i.e. after the pipeline at the split), and
    the final logits (pipelined when the split sits at the output).
    """
    layers = unflatten_params(spec, params)
    a = x_batch
    if spec.split_index == 0 and pipeline is not None:
        a = pipeline(a)
    zs: list[np.ndarray] = []
    inputs: list[np.ndarray] = []
    for i, (w, b) in enumerate(layers):
        inputs.append(a)
        z = a @ w.T + b
        zs.append(z)
        a = _activate(spec.activation[i], z) if i < spec.n_layers - 1 else z
        if pipeline is not None and i + 1 == spec.split_index:
            a = pipeline(a)
    return zs, inputs, a


def forward_batch(
    spec: NetworkSpec,
    params: np.ndarray,
    x_batch: np.ndarray,
    pipeline: FeaturePipeline | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched forward pass; returns (logits, probabilities), each (B, C)."""
    x_batch = np.asarray(x_batch, dtype=np.float64)
    if x_batch.ndim != 2 or x_batch.shape[1] != spec.input_dim:
        raise ConfigurationError(
            f"input batch has shape {x_batch.shape}, expected (B, {spec.input_dim})"
        )
    _, _, logits = _forward_trace(spec, _check_params(spec, params), x_batch, pipeline)
    return logits, _softmax(logits)


def forward(spec: NetworkSpec, params: np.ndarray, x: np.ndarray) -> Prediction:
    """Clean (channel-free) forward pass for a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.input_dim,):
        raise ConfigurationError(
            f"input has shape {x.shape}, expected ({spec.input_dim},)"
        )
    logits, probs = forward_batch(spec, params, x[None, :])
    return Prediction(logits=logits[0], probabilities=probs[0])


def split_forward(
    spec: NetworkSpec, params: np.ndarray, x: np.ndarray
) -> tuple[np.ndarray, Callable[[np.ndarray], Prediction]]:
    """Encoder output plus a resume closure running the decoder.

    resume(feature) reproduces forward(spec, params, x) exactly when the
    feature is passed back unmodified; a distorted feature yields the
    decoder's prediction for the distorted transmission.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.input_dim,):
        raise ConfigurationError(
            f"input has shape {x.shape}, expected ({spec.input_dim},)"
        )
    params = _check_params(spec, params)
    layers = unflatten_params(spec, params)
    a = x
    for i in range(spec.split_index):
        w, b = layers[i]
        z = w @ a + b
        a = _activate(spec.activation[i], z) if i < spec.n_layers - 1 else z

    def resume(feature: np.ndarray) -> Prediction:
        h = np.asarray(feature, dtype=np.float64)
        for j in range(spec.split_index, spec.n_layers):
            w, b = layers[j]
            z = w @ h + b
            h = _activate(spec.activation[j], z) if j < spec.n_layers - 1 else z
        return Prediction(logits=h, probabilities=_softmax(h))

    return a, resume


def _raw_losses(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-sample -log softmax probability of the label, computed stably."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    lse = np.log(np.sum(np.exp(shifted), axis=-1))
    picked = shifted[np.arange(logits.shape[0]), labels]
    return lse - picked


def clipped_cross_entropy(pred: Prediction, label: int, clip: float) -> float:
    """min(-log p[label], clip); the loss is bounded in [0, clip]."""
    if clip <= 0:
        raise ValueError(f"clip must be positive, got {clip}")
    logits = np.atleast_2d(pred.logits)
    if not 0 <= label < logits.shape[1]:
        raise ValueError(f"label {label} out of range for {logits.shape[1]} classes")
    raw = _raw_losses(logits, np.array([label]))[0]
    return float(min(raw, clip))


def batch_clipped_losses(
    spec: NetworkSpec,
    params: np.ndarray,
    x_batch: np.ndarray,
    labels: np.ndarray,
    clip: float,
    pipeline: FeaturePipeline | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample clipped losses and logits for a batch (no gradient)."""
    if clip <= 0:
        raise ValueError(f"clip must be positive, got {clip}")
    labels = np.asarray(labels, dtype=np.intp)
    logits, _ = forward_batch(spec, params, x_batch, pipeline)
    if np.any(labels < 0) or np.any(labels >= spec.n_classes):
        raise ValueError("label out of range")
    return np.minimum(_raw_losses(logits, labels), clip), logits


def batch_loss_and_gradient(
    spec: NetworkSpec,
    params: np.ndarray,
    x_batch: np.ndarray,
    labels: np.ndarray,
    clip: float,
    pipeline: FeaturePipeline | None = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean clipped cross-entropy over a batch and its exact gradient.

    Samples in the clipped region contribute zero gradient (the loss is
    treated as constant there).  The split pipeline, if any, is applied in
    the forward pass and crossed with a unit pass-through derivative.

    Returns (mean_loss, flat_gradient, per_sample_losses).
    """
    if clip <= 0:
        raise ValueError(f"clip must be positive, got {clip}")
    params = _check_params(spec, params)
    x_batch = np.asarray(x_batch, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    if x_batch.ndim != 2 or x_batch.shape[1] != spec.input_dim:
        raise ConfigurationError(
            f"input batch has shape {x_batch.shape}, expected (B, {spec.input_dim})"
        )
    if np.any(labels < 0) or np.any(labels >= spec.n_classes):
        raise ValueError("label out of range")
    n_batch = x_batch.shape[0]
    layers = unflatten_params(spec, params)

    zs, inputs, logits = _forward_trace(spec, params, x_batch, pipeline)
    raw = _raw_losses(logits, labels)
    losses = np.minimum(raw, clip)
    active = (raw < clip).astype(np.float64)[:, None]

    probs = _softmax(logits)
    delta = probs.copy()
    delta[np.arange(n_batch), labels] -= 1.0
    delta *= active / n_batch

    grads_w = [np.empty(0)] * spec.n_layers
    grads_b = [np.empty(0)] * spec.n_layers
    for i in range(spec.n_layers - 1, -1, -1):
        grads_w[i] = delta.T @ inputs[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            w, _ = layers[i]
            # pass-through at the split: d(pipeline)/d(feature) := identity
            delta = (delta @ w) * _activate_grad(spec.activation[i - 1], zs[i - 1])

    flat = flatten_params(list(zip(grads_w, grads_b)))
    return float(np.mean(losses)), flat, losses


def gradient(
    spec: NetworkSpec,
    params: np.ndarray,
    sample: tuple[np.ndarray, int],
    clip: float,
    pipeline: FeaturePipeline | None = None,
) -> np.ndarray:
    """Exact gradient of the clipped loss for one sample, as a flat vector."""
    x, y = sample
    x = np.asarray(x, dtype=np.float64)
    _, grad, _ = batch_loss_and_gradient(
        spec, params, x[None, :], np.array([y]), clip, pipeline
    )
    return grad


_SNAPSHOT_MAGIC = "WDLPARAMS1"


def save_params(path, spec: NetworkSpec, params: np.ndarray) -> None:
    """Write a flat float64 snapshot with a header recording D and spec hash."""
    params = _check_params(spec, params)
    with open(path, "wb") as fh:
        header = f"{_SNAPSHOT_MAGIC} dim={spec.n_params} spec={spec.spec_hash()}\n"
        fh.write(header.encode("ascii"))
        fh.write(params.astype("<f8").tobytes())


def load_params(path, spec: NetworkSpec | None = None) -> np.ndarray:
    """Read a snapshot written by save_params, checking the spec hash if given."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        payload = fh.read()
    fields = header.split()
    if not fields or fields[0] != _SNAPSHOT_MAGIC:
        raise ConfigurationError(f"not a parameter snapshot: {path}")
    meta = dict(f.split("=", 1) for f in fields[1:])
    dim = int(meta["dim"])
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    if values.shape != (dim,):
        raise ConfigurationError(
            f"snapshot payload has {values.size} values, header says {dim}"
        )
    if spec is not None:
        if dim != spec.n_params or meta.get("spec") != spec.spec_hash():
            raise ConfigurationError("snapshot does not match the network spec")
    return values
