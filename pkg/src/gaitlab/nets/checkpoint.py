"""Versioned binary checkpoint container.

Layout: 8-byte magic, uint32 header length, JSON header (array manifest plus
free-form metadata), then raw little-endian array payloads in manifest order.
Floats are stored as little-endian float64; integer arrays as little-endian
int64.  Loading validates the manifest against the payload sizes; shape
congruence against a NetSpec is the caller's job via load_net / save_net.
"""

import json
import struct

import numpy as np

from .mlp import NetSpec, NetParams

MAGIC = b"GLABCK01"

_DTYPES = {"<f8": np.dtype("<f8"), "<i8": np.dtype("<i8"), "<u1": np.dtype("<u1")}


class CheckpointError(Exception):
    pass


def _dtype_tag(arr):
    if arr.dtype.kind == "f":
        return "<f8"
    if arr.dtype.kind in "iu" and arr.dtype != np.uint8:
        return "<i8"
    if arr.dtype == np.uint8:
        return "<u1"
    raise CheckpointError(f"unsupported dtype {arr.dtype}")


def save_arrays(path, named_arrays, meta=None):
    """named_arrays: sequence of (name, ndarray); meta: JSON-serializable dict."""
    manifest = []
    payloads = []
    for name, arr in named_arrays:
        arr = np.asarray(arr)
        tag = _dtype_tag(arr)
        data = np.ascontiguousarray(arr, dtype=_DTYPES[tag]).tobytes()
        manifest.append({"name": name, "shape": list(arr.shape), "dtype": tag})
        payloads.append(data)
    header = json.dumps({"version": 1, "arrays": manifest, "meta": meta or {}}).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        for data in payloads:
            f.write(data)


def load_arrays(path):
    """Returns (dict name -> ndarray, meta dict)."""
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: bad magic {magic!r}")
        (hlen,) = struct.unpack("<I", f.read(4))
        try:
            header = json.loads(f.read(hlen).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise CheckpointError(f"{path}: corrupt header: {e}") from e
        if header.get("version") != 1:
            raise CheckpointError(f"{path}: unsupported version {header.get('version')}")
        arrays = {}
        for entry in header["arrays"]:
            dtype = _DTYPES[entry["dtype"]]
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            data = f.read(count * dtype.itemsize)
            if len(data) != count * dtype.itemsize:
                raise CheckpointError(f"{path}: truncated payload for {entry['name']}")
            arrays[entry["name"]] = np.frombuffer(data, dtype=dtype).reshape(shape).copy()
    return arrays, header["meta"]


def net_meta(spec):
    return {
        "layer_widths": list(spec.layer_widths),
        "activation": spec.activation,
        "output_activation": spec.output_activation,
    }


def spec_from_meta(meta):
    return NetSpec(tuple(meta["layer_widths"]), meta["activation"], meta["output_activation"])


def save_net(path, params, extra_meta=None):
    meta = {"net": net_meta(params.spec)}
    if extra_meta:
        meta.update(extra_meta)
    save_arrays(path, params.flat_arrays(), meta)


def load_net(path):
    arrays, meta = load_arrays(path)
    spec = spec_from_meta(meta["net"])
    return params_from_arrays(spec, arrays), meta


def params_from_arrays(spec, arrays, prefix=""):
    weights, biases = [], []
    for i in range(spec.num_layers):
        w = arrays.get(f"{prefix}w{i}")
        b = arrays.get(f"{prefix}b{i}")
        if w is None or b is None:
            raise CheckpointError(f"missing layer {i} arrays (prefix {prefix!r})")
        want_w = (spec.layer_widths[i], spec.layer_widths[i + 1])
        if w.shape != want_w or b.shape != (spec.layer_widths[i + 1],):
            raise CheckpointError(
                f"layer {i}: shape {w.shape}/{b.shape} incongruent with spec {want_w}"
            )
        weights.append(w)
        biases.append(b)
    return NetParams(spec, weights, biases)
