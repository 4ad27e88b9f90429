"""Binary model file.

Layout (little-endian)::

    8 bytes   magic b"COINMLP1"
    uint32    format version (1)
    uint8     features normalized to [0, 1] (0/1)
    uint32    number of layer sizes L
    uint32*L  layer sizes
    per layer: float64 weights (fan_out x fan_in, row-major), float64 biases
    uint16*K  denomination of each output class (K = last layer size)
"""
import struct

import numpy as np

from coinrec.classifier import CLASS_DENOMINATION, MlpModel
from coinrec.errors import BadTopology, ModelFormatError

MAGIC = b"COINMLP1"
VERSION = 1


def dumps(model):
    parts = [MAGIC, struct.pack("<IBI", VERSION, int(bool(model.normalized)), len(model.layer_sizes))]
    parts.append(struct.pack(f"<{len(model.layer_sizes)}I", *model.layer_sizes))
    for W, b in zip(model.weights, model.biases):
        parts.append(np.ascontiguousarray(W, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    k = model.layer_sizes[-1]
    table = CLASS_DENOMINATION if k == len(CLASS_DENOMINATION) else (0,) * k
    parts.append(struct.pack(f"<{k}H", *table))
    return b"".join(parts)


def loads(data):
    if data[:8] != MAGIC:
        raise ModelFormatError("bad magic; not a coin model file")
    try:
        version, normalized, n_layers = struct.unpack_from("<IBI", data, 8)
        if version != VERSION:
            raise ModelFormatError(f"unsupported model version {version}")
        if not 2 <= n_layers <= 64:
            raise ModelFormatError(f"implausible layer count {n_layers}")
        off = 8 + struct.calcsize("<IBI")
        sizes = list(struct.unpack_from(f"<{n_layers}I", data, off))
        off += 4 * n_layers
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            nw = fan_in * fan_out
            W = np.frombuffer(data, dtype="<f8", count=nw, offset=off).reshape(fan_out, fan_in)
            off += 8 * nw
            b = np.frombuffer(data, dtype="<f8", count=fan_out, offset=off)
            off += 8 * fan_out
            weights.append(W.astype(np.float64))
            biases.append(b.astype(np.float64))
        struct.unpack_from(f"<{sizes[-1]}H", data, off)
        off += 2 * sizes[-1]
    except (struct.error, ValueError) as exc:
        raise ModelFormatError(f"truncated or malformed model file: {exc}") from None
    if off != len(data):
        raise ModelFormatError(f"{len(data) - off} trailing bytes after model data")
    try:
        model = MlpModel(sizes, weights, biases, bool(normalized))
    except BadTopology as exc:
        raise ModelFormatError(str(exc)) from None
    if not all(np.all(np.isfinite(p)) for p in model.params()):
        raise ModelFormatError("non-finite parameters")
    return model


def save(model, path):
    with open(path, "wb") as f:
        f.write(dumps(model))


def load(path):
    with open(path, "rb") as f:
        return loads(f.read())
