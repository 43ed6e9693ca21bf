"""Adam-style optimizer acting in place on a list of parameter arrays."""

from __future__ import annotations

import struct

import numpy as np

from .errors import CorruptCheckpointError, ShapeError, TrainingDivergenceError

_MAGIC = b"ADAMCKPT"
_VERSION = 1


class Adam:
    """Adaptive-moment gradient descent with bias correction."""

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = None
        self.v = None

    def step(self, params, grads):
        """One descent step; params are updated in place."""
        if len(params) != len(grads):
            raise ShapeError("params/grads length mismatch")
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.step_count += 1
        bc1 = 1.0 - self.beta1 ** self.step_count
        bc2 = 1.0 - self.beta2 ** self.step_count
        for p, g, m, v in zip(params, grads, self.m, self.v):
            if g.shape != p.shape:
                raise ShapeError(f"gradient shape {g.shape} != param {p.shape}")
            if not np.all(np.isfinite(g)):
                raise TrainingDivergenceError("non-finite gradient")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)

    def to_bytes(self):
        n = 0 if self.m is None else len(self.m)
        blob = _MAGIC + struct.pack("<IIq", _VERSION, n, self.step_count)
        blob += struct.pack("<dddd", self.lr, self.beta1, self.beta2, self.eps)
        for i in range(n):
            for arr in (self.m[i], self.v[i]):
                shape = arr.shape
                blob += struct.pack("<I", len(shape))
                blob += struct.pack(f"<{len(shape)}I", *shape)
                blob += np.ascontiguousarray(arr, dtype="<f8").tobytes()
        return blob

    @classmethod
    def from_bytes(cls, blob):
        if len(blob) < len(_MAGIC) + 16 or blob[:len(_MAGIC)] != _MAGIC:
            raise CorruptCheckpointError("bad optimizer magic")
        off = len(_MAGIC)
        version, n, step_count = struct.unpack_from("<IIq", blob, off)
        off += 16
        if version != _VERSION:
            raise CorruptCheckpointError(f"unsupported optimizer version {version}")
        lr, beta1, beta2, eps = struct.unpack_from("<dddd", blob, off)
        off += 32
        opt = cls(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        opt.step_count = step_count
        if n > 0:
            m, v = [], []
            for _ in range(n):
                for dest in (m, v):
                    if off + 4 > len(blob):
                        raise CorruptCheckpointError("truncated optimizer state")
                    (ndim,) = struct.unpack_from("<I", blob, off)
                    off += 4
                    shape = struct.unpack_from(f"<{ndim}I", blob, off)
                    off += 4 * ndim
                    count = int(np.prod(shape)) if ndim else 1
                    if off + 8 * count > len(blob):
                        raise CorruptCheckpointError("truncated optimizer state")
                    arr = np.frombuffer(blob, dtype="<f8", count=count, offset=off)
                    off += 8 * count
                    dest.append(arr.reshape(shape).copy())
            opt.m, opt.v = m, v
        if off != len(blob):
            raise CorruptCheckpointError("trailing bytes in optimizer state")
        return opt
