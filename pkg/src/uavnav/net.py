"""Minimal dense network engine: forward, exact backprop, serialization.

Only what the actor/critic need: stacks of affine layers with elementwise
activations, reverse-mode gradients for parameters *and* inputs (the critic
must be differentiated with respect to the action), soft target blending,
and a bit-exact binary checkpoint format.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import CorruptCheckpointError, ShapeError

RELU, TANH, SIGMOID, IDENTITY = "relu", "tanh", "sigmoid", "identity"
_ACT_CODES = {RELU: 0, TANH: 1, SIGMOID: 2, IDENTITY: 3}
_CODE_ACTS = {v: k for k, v in _ACT_CODES.items()}

_MAGIC = b"DNETCKPT"
_VERSION = 1


def _activate(name, z):
    if name == RELU:
        return np.maximum(z, 0.0)
    if name == TANH:
        return np.tanh(z)
    if name == SIGMOID:
        return 1.0 / (1.0 + np.exp(-z))
    return z


def _activate_grad(name, z, a):
    # derivative w.r.t. z, using whichever of (z, a) is cheapest
    if name == RELU:
        return (z > 0.0).astype(float)
    if name == TANH:
        return 1.0 - a * a
    if name == SIGMOID:
        return a * (1.0 - a)
    return np.ones_like(z)


class DenseNetwork:
    """Stack of (weight, bias, activation) layers operating on float64."""

    def __init__(self, weights, biases, activations):
        if not (len(weights) == len(biases) == len(activations)):
            raise ShapeError("layer lists must have equal length")
        for i, (w, b, act) in enumerate(zip(weights, biases, activations)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ShapeError(f"layer {i}: W {w.shape} / b {b.shape} mismatch")
            if act not in _ACT_CODES:
                raise ValueError(f"unknown activation {act!r}")
            if i > 0 and w.shape[1] != weights[i - 1].shape[0]:
                raise ShapeError(f"layer {i} input dim {w.shape[1]} != "
                                 f"previous output {weights[i-1].shape[0]}")
        self.weights = [np.ascontiguousarray(w, dtype=float) for w in weights]
        self.biases = [np.ascontiguousarray(b, dtype=float) for b in biases]
        self.activations = list(activations)

    @classmethod
    def create(cls, dims, activations, rng):
        """Random init, uniform in +-1/sqrt(fan_in) per layer."""
        if len(dims) < 2 or len(activations) != len(dims) - 1:
            raise ShapeError("need len(dims) >= 2 and one activation per layer")
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases, list(activations))

    @property
    def input_dim(self):
        return self.weights[0].shape[1]

    @property
    def output_dim(self):
        return self.weights[-1].shape[0]

    def architecture(self):
        return [(w.shape[1], w.shape[0], a)
                for w, a in zip(self.weights, self.activations)]

    def parameters(self):
        """Flat list [W0, b0, W1, b1, ...]; arrays are live references."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def clone(self):
        return DenseNetwork([w.copy() for w in self.weights],
                            [b.copy() for b in self.biases],
                            list(self.activations))

    def _check_input(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.input_dim:
            raise ShapeError(f"input dim {x.shape[-1]} != {self.input_dim}")
        return x

    def forward(self, x):
        """Evaluate the network; x is (in,) or (batch, in)."""
        a = self._check_input(x)
        for w, b, act in zip(self.weights, self.biases, self.activations):
            a = _activate(act, a @ w.T + b)
        return a

    def backward(self, x, upstream):
        """Gradients of sum(upstream * output) w.r.t. parameters and input.

        Returns (grads, input_grad) where grads matches parameters() order.
        For batched x, parameter gradients are summed over the batch.
        """
        a = self._check_input(x)
        squeeze = a.ndim == 1
        if squeeze:
            a = a[None, :]
        acts = [a]
        zs = []
        for w, b, act in zip(self.weights, self.biases, self.activations):
            z = acts[-1] @ w.T + b
            zs.append(z)
            acts.append(_activate(act, z))

        delta = np.asarray(upstream, dtype=float)
        if squeeze:
            delta = delta[None, :]
        if delta.shape != acts[-1].shape:
            raise ShapeError(f"upstream shape {delta.shape} != output {acts[-1].shape}")

        grads = [None] * (2 * len(self.weights))
        for i in range(len(self.weights) - 1, -1, -1):
            delta = delta * _activate_grad(self.activations[i], zs[i], acts[i + 1])
            grads[2 * i] = delta.T @ acts[i]
            grads[2 * i + 1] = delta.sum(axis=0)
            delta = delta @ self.weights[i]
        input_grad = delta[0] if squeeze else delta
        return grads, input_grad

    # -- checkpoint format: magic, version, layer table, raw little-endian f64

    def to_bytes(self):
        header = [_MAGIC, struct.pack("<II", _VERSION, len(self.weights))]
        for w, a in zip(self.weights, self.activations):
            header.append(struct.pack("<IIB", w.shape[1], w.shape[0], _ACT_CODES[a]))
        blob = b"".join(header)
        for w, b in zip(self.weights, self.biases):
            blob += np.ascontiguousarray(w, dtype="<f8").tobytes()
            blob += np.ascontiguousarray(b, dtype="<f8").tobytes()
        return blob

    @classmethod
    def from_bytes(cls, blob):
        if len(blob) < len(_MAGIC) + 8 or blob[:len(_MAGIC)] != _MAGIC:
            raise CorruptCheckpointError("bad magic string")
        off = len(_MAGIC)
        version, n_layers = struct.unpack_from("<II", blob, off)
        off += 8
        if version != _VERSION:
            raise CorruptCheckpointError(f"unsupported version {version}")
        table = []
        for _ in range(n_layers):
            if off + 9 > len(blob):
                raise CorruptCheckpointError("truncated layer table")
            fan_in, fan_out, code = struct.unpack_from("<IIB", blob, off)
            off += 9
            if code not in _CODE_ACTS:
                raise CorruptCheckpointError(f"unknown activation code {code}")
            table.append((fan_in, fan_out, _CODE_ACTS[code]))
        expected = sum(8 * (fi * fo + fo) for fi, fo, _ in table)
        if len(blob) - off != expected:
            raise CorruptCheckpointError(
                f"parameter block has {len(blob) - off} bytes, expected {expected}")
        weights, biases, acts = [], [], []
        for fan_in, fan_out, act in table:
            w = np.frombuffer(blob, dtype="<f8", count=fan_in * fan_out, offset=off)
            off += 8 * fan_in * fan_out
            b = np.frombuffer(blob, dtype="<f8", count=fan_out, offset=off)
            off += 8 * fan_out
            weights.append(w.reshape(fan_out, fan_in).copy())
            biases.append(b.copy())
            acts.append(act)
        return cls(weights, biases, acts)


def soft_update(target: DenseNetwork, online: DenseNetwork, nu):
    """Blend target <- nu * online + (1 - nu) * target, in place."""
    if target.architecture() != online.architecture():
        raise ShapeError("target/online architectures differ")
    for tp, op in zip(target.parameters(), online.parameters()):
        tp *= 1.0 - nu
        tp += nu * op
    return target
