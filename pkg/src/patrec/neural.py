"""Feed-forward sigmoid network trained by epoch back-propagation.

Subjects are encoded as binary patterns on the output layer, most
significant bit on the first output neuron.  Each neuron's threshold is
treated as the weight of a constant -1 input, so it learns by the same
rule as every other weight.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .classify import Result, ResultSet

log = logging.getLogger(__name__)

DEFAULT_HIDDEN = 16


def output_size(max_id: int) -> int:
    """Bits needed to encode subject ids ``0 .. max_id``."""
    if max_id < 0:
        raise ValueError(f"subject ids must be >= 0, got {max_id}")
    return max(1, int(max_id).bit_length())


def encode_id(subject_id: int, bits: int) -> np.ndarray:
    if not 0 <= subject_id < (1 << bits):
        raise ValueError(f"subject id {subject_id} does not fit in {bits} output bits")
    return np.array([(subject_id >> (bits - 1 - i)) & 1 for i in range(bits)], dtype=np.float64)


def decode_bits(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def sigmoid(x, c: float = 1.0):
    with np.errstate(over="ignore"):  # exp overflow saturates to 0 correctly
        return 1.0 / (1.0 + np.exp(-c * np.asarray(x, dtype=np.float64)))


@dataclass
class NeuralNet:
    layers: list
    weights: list = field(default_factory=list)
    thresholds: list = field(default_factory=list)
    c: float = 1.0
    alpha: float = 0.5
    beta: float = 1.0
    epochs: int = 20
    min_error: float = 0.1

    @classmethod
    def create(cls, layers, seed=None, **kw) -> "NeuralNet":
        """Random weights and thresholds, uniform in [-0.5, 0.5]."""
        layers = [int(n) for n in layers]
        if len(layers) < 2 or min(layers) < 1:
            raise ValueError(f"need at least two non-empty layers, got {layers}")
        rng = np.random.default_rng(seed)
        weights = [rng.uniform(-0.5, 0.5, (n_out, n_in))
                   for n_in, n_out in zip(layers, layers[1:])]
        thresholds = [rng.uniform(-0.5, 0.5, n_out) for n_out in layers[1:]]
        return cls(layers, weights, thresholds, **kw)

    @property
    def input_size(self) -> int:
        return self.layers[0]

    @property
    def output_size(self) -> int:
        return self.layers[-1]

    def copy(self) -> "NeuralNet":
        return NeuralNet(list(self.layers), [w.copy() for w in self.weights],
                         [t.copy() for t in self.thresholds],
                         self.c, self.alpha, self.beta, self.epochs, self.min_error)

    def to_payload(self) -> dict:
        return {
            "layers": list(self.layers),
            "weights": [w.copy() for w in self.weights],
            "thresholds": [t.copy() for t in self.thresholds],
            "c": self.c, "alpha": self.alpha, "beta": self.beta,
            "epochs": self.epochs, "min_error": self.min_error,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "NeuralNet":
        layers = [int(n) for n in p["layers"]]
        weights = [np.asarray(w, dtype=np.float64).reshape(o, i)
                   for w, i, o in zip(p["weights"], layers, layers[1:])]
        thresholds = [np.asarray(t, dtype=np.float64).reshape(-1) for t in p["thresholds"]]
        return cls(layers, weights, thresholds, p["c"], p["alpha"], p["beta"],
                   int(p["epochs"]), p["min_error"])


def _activations(net: NeuralNet, v) -> list:
    a = np.asarray(v, dtype=np.float64).reshape(-1)
    if a.size != net.input_size:
        raise ValueError(f"input has {a.size} features, network expects {net.input_size}")
    acts = [a]
    for w, t in zip(net.weights, net.thresholds):
        a = sigmoid(w @ a - t, net.c)
        acts.append(a)
    return acts


def nn_forward(net: NeuralNet, v) -> np.ndarray:
    return _activations(net, v)[-1]


def _deltas(net: NeuralNet, acts: list, target: np.ndarray) -> list:
    out = acts[-1]
    delta = (target - out) * net.c * out * (1.0 - out)
    deltas = [delta]
    for k in range(len(net.weights) - 1, 0, -1):
        a = acts[k]
        delta = net.c * a * (1.0 - a) * (net.weights[k].T @ delta)
        deltas.append(delta)
    deltas.reverse()
    return deltas


def sample_error(net: NeuralNet, v, target) -> float:
    """Half the squared error of the network output against ``target``."""
    err = np.asarray(target, dtype=np.float64) - nn_forward(net, v)
    return 0.5 * float(np.dot(err, err))


def nn_gradients(net: NeuralNet, v, target) -> tuple[list, list]:
    """Gradients of :func:`sample_error` with respect to weights and thresholds."""
    target = np.asarray(target, dtype=np.float64)
    acts = _activations(net, v)
    deltas = _deltas(net, acts, target)
    gw = [-np.outer(d, a) for d, a in zip(deltas, acts[:-1])]
    gt = [d.copy() for d in deltas]
    return gw, gt


def _targets(net: NeuralNet, ids) -> np.ndarray:
    return np.array([encode_id(int(s), net.output_size) for s in ids])


def mean_error(net: NeuralNet, samples) -> float:
    if not samples:
        return 0.0
    targets = _targets(net, [s for _, s in samples])
    return float(np.mean([sample_error(net, v, t) for (v, _), t in zip(samples, targets)]))


def nn_train(net: NeuralNet, samples, epochs: int | None = None,
             min_error: float | None = None) -> NeuralNet:
    """Epoch back-propagation; returns a new trained network.

    Within an epoch the changes from every sample are computed against the
    same weights and committed together at the end.  The mean error over
    the training samples decides whether another epoch runs.
    """
    epochs = net.epochs if epochs is None else epochs
    min_error = net.min_error if min_error is None else min_error
    samples = [(np.asarray(v, dtype=np.float64), int(s)) for v, s in samples]
    for v, s in samples:
        if v.size != net.input_size:
            raise ValueError(f"training vector has {v.size} features, network expects {net.input_size}")
    targets = _targets(net, [s for _, s in samples])
    net = net.copy()
    if not samples:
        return net

    for epoch in range(epochs):
        dw = [np.zeros_like(w) for w in net.weights]
        dt = [np.zeros_like(t) for t in net.thresholds]
        for (v, _), target in zip(samples, targets):
            acts = _activations(net, v)
            for k, d in enumerate(_deltas(net, acts, target)):
                dw[k] += np.outer(d, acts[k])
                dt[k] -= d
        for k in range(len(net.weights)):
            net.weights[k] = net.beta * net.weights[k] + net.alpha * dw[k]
            net.thresholds[k] = net.beta * net.thresholds[k] + net.alpha * dt[k]
        err = mean_error(net, samples)
        log.debug("epoch %d: mean error %.6g", epoch + 1, err)
        if err < min_error:
            break
    return net


def nn_classify(net: NeuralNet, v) -> ResultSet:
    """Read the output layer as a binary subject id.

    The runner-up differs from the winner in the bit whose output sat
    closest to 0.5.
    """
    out = nn_forward(net, v)
    bits = (out >= 0.5).astype(int)
    first = decode_bits(bits)
    results = [Result(float(np.linalg.norm(out - bits)), first)]
    flip = int(np.argmin(np.abs(out - 0.5)))
    alt = bits.copy()
    alt[flip] ^= 1
    results.append(Result(float(np.linalg.norm(out - alt)), decode_bits(alt)))
    return ResultSet(results)
