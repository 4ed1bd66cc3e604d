"""Versioned binary container for trained taggers.

Layout, all integers little-endian:

    bytes 0..6   magic "SNERMDL"
    byte  7      container version (currently 1)
    bytes 8..15  uint64 header length H
    next H bytes UTF-8 JSON header
    rest         weight payload: float64 little-endian arrays, concatenated
                 in the header's "arrays" order

The header carries the model type tag ("crf" or "svm"), the label order, the
feature-key table, the estimator parameters, and the payload's byte length
and SHA-256, which is verified on load.  The format is self-contained so
other implementations can exchange models.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .corpus import TagScheme
from .crf import CrfTagger
from .features import FeatureIndex, MaxAbsScaler
from .svm import LinearSvmTagger
from .validation import DataError

_MAGIC = b"SNERMDL"
_VERSION = 1


def _write_container(path: str | Path, header: dict, arrays: list[tuple[str, np.ndarray]]) -> None:
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for _, a in arrays)
    header = dict(header)
    header["arrays"] = [{"name": name, "shape": list(a.shape)} for name, a in arrays]
    header["payload"] = {
        "dtype": "<f8",
        "bytes": len(payload),
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(bytes([_VERSION]))
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(payload)


def _read_container(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise DataError(f"{path}: truncated model file")
    if data[:7] != _MAGIC:
        raise DataError(f"{path}: not a model container (bad magic)")
    if data[7] != _VERSION:
        raise DataError(f"{path}: unsupported container version {data[7]}")
    (header_len,) = struct.unpack("<Q", data[8:16])
    if len(data) < 16 + header_len:
        raise DataError(f"{path}: truncated model header")
    try:
        header = json.loads(data[16:16 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DataError(f"{path}: unreadable model header: {e}") from e
    payload = data[16 + header_len:]
    meta = header.get("payload", {})
    if len(payload) != meta.get("bytes"):
        raise DataError(f"{path}: payload length mismatch "
                        f"(expected {meta.get('bytes')}, found {len(payload)})")
    if hashlib.sha256(payload).hexdigest() != meta.get("sha256"):
        raise DataError(f"{path}: payload checksum mismatch")
    arrays = {}
    offset = 0
    for spec in header.get("arrays", []):
        shape = tuple(spec["shape"])
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        arrays[spec["name"]] = np.frombuffer(
            payload, dtype="<f8", count=count, offset=offset).reshape(shape).copy()
        offset += count * 8
    return header, arrays


def _scheme_from_labels(labels: list[str]) -> TagScheme:
    entities = tuple(tag[2:] for tag in labels if tag.startswith("B-"))
    scheme = TagScheme(entities)
    if list(scheme.label_strings) != labels:
        raise DataError(f"stored label order {labels!r} is not an O-first B/I scheme")
    return scheme


def save_model(model: CrfTagger | LinearSvmTagger, path: str | Path) -> None:
    if not isinstance(model, (CrfTagger, LinearSvmTagger)):
        raise TypeError(f"cannot serialize {type(model).__name__}")
    model._check_fitted()
    if isinstance(model, CrfTagger):
        header = {
            "type": "crf",
            "labels": list(model.scheme_.label_strings),
            "feature_keys": model.index_.keys,
            "params": model.get_params(),
        }
        arrays = [("emission", model.emission_weights_),
                  ("transition", model.transition_weights_)]
    else:
        header = {
            "type": "svm",
            "labels": list(model.scheme_.label_strings),
            "feature_keys": model.index_.keys,
            "params": model.get_params(),
        }
        arrays = [("weights", model.weights_),
                  ("biases", model.biases_),
                  ("scale", model.scaler_.scale_)]
    _write_container(path, header, arrays)


def load_model(path: str | Path) -> CrfTagger | LinearSvmTagger:
    header, arrays = _read_container(path)
    kind = header.get("type")
    scheme = _scheme_from_labels(header["labels"])
    index = FeatureIndex.from_keys(header["feature_keys"])
    if kind == "crf":
        model = CrfTagger(**header["params"])
        expected = (index.n_features, len(scheme))
        if arrays["emission"].shape != expected:
            raise DataError(f"{path}: emission weights shaped {arrays['emission'].shape}, "
                            f"expected {expected}")
        if arrays["transition"].shape != (len(scheme), len(scheme)):
            raise DataError(f"{path}: transition weights shaped {arrays['transition'].shape}, "
                            f"expected {(len(scheme), len(scheme))}")
        model.scheme_ = scheme
        model.index_ = index
        model.emission_weights_ = arrays["emission"]
        model.transition_weights_ = arrays["transition"]
        return model
    if kind == "svm":
        model = LinearSvmTagger(**header["params"])
        expected = (len(scheme), index.n_features)
        if arrays["weights"].shape != expected:
            raise DataError(f"{path}: weight matrix shaped {arrays['weights'].shape}, "
                            f"expected {expected}")
        scaler = MaxAbsScaler()
        scaler.scale_ = arrays["scale"]
        model.scheme_ = scheme
        model.index_ = index
        model.scaler_ = scaler
        model.weights_ = arrays["weights"]
        model.biases_ = arrays["biases"]
        return model
    raise DataError(f"{path}: unknown model type tag {kind!r}")
