"""JSON serialization helpers.

Complex scalars are stored as [re, im] pairs; arrays as nested lists of
pairs.  Files are written with sorted keys and a fixed float format so
repeated runs are byte-identical.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = [
    "FormatError",
    "encode_complex_array",
    "decode_complex_array",
    "read_json",
    "write_json",
]


class FormatError(ValueError):
    """Malformed structured-text input (parse or shape errors)."""


def encode_complex_array(arr) -> list:
    arr = np.asarray(arr, dtype=complex)

    def enc(x):
        if isinstance(x, np.ndarray) and x.ndim > 0:
            return [enc(row) for row in x]
        return [float(np.real(x)), float(np.imag(x))]

    return enc(arr)


def _decode(node):
    if (
        isinstance(node, (list, tuple))
        and len(node) == 2
        and all(isinstance(x, (int, float)) for x in node)
    ):
        return complex(node[0], node[1])
    if isinstance(node, (list, tuple)):
        return [_decode(x) for x in node]
    raise FormatError(f"expected [re, im] pair or nested list, got {node!r}")


def decode_complex_array(node) -> np.ndarray:
    try:
        return np.asarray(_decode(node), dtype=complex)
    except ValueError as exc:
        raise FormatError(f"ragged complex array: {exc}") from exc


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise FormatError(f"top-level JSON value in {path} must be an object")
    return payload


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
