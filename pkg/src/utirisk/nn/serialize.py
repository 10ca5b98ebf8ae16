"""Portable text container for named, shaped, dtyped arrays.

Format (JSON):
  {"format": "utirisk-arrays", "version": 1,
   "arrays": [{"name", "dtype", "shape", "data": base64(raw C-order bytes)}],
   "checksum": sha256 hex over every name/dtype/shape/raw-bytes in order}

The checksum covers content, so a corrupted or hand-edited file is refused
rather than silently loaded.
"""

from __future__ import annotations

import base64
import hashlib
import json
from pathlib import Path

import numpy as np

FORMAT_NAME = "utirisk-arrays"
FORMAT_VERSION = 1


def _digest(items: list[tuple[str, str, tuple[int, ...], bytes]]) -> str:
    h = hashlib.sha256()
    for name, dtype, shape, raw in items:
        h.update(name.encode())
        h.update(dtype.encode())
        h.update(repr(tuple(shape)).encode())
        h.update(raw)
    return h.hexdigest()


def arrays_to_payload(arrays: dict[str, np.ndarray]) -> dict:
    items = []
    entries = []
    for name in sorted(arrays):
        arr = np.asarray(arrays[name])
        raw = arr.tobytes()
        items.append((name, arr.dtype.str, arr.shape, raw))
        entries.append({
            "name": name,
            "dtype": arr.dtype.str,
            "shape": list(arr.shape),
            "data": base64.b64encode(raw).decode("ascii"),
        })
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "arrays": entries,
        "checksum": _digest(items),
    }


def payload_to_arrays(payload: dict) -> dict[str, np.ndarray]:
    if payload.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} payload")
    if payload.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported version {payload.get('version')!r}, "
                         f"expected {FORMAT_VERSION}")
    items = []
    arrays: dict[str, np.ndarray] = {}
    for entry in payload["arrays"]:
        raw = base64.b64decode(entry["data"])
        shape = tuple(entry["shape"])
        items.append((entry["name"], entry["dtype"], shape, raw))
        arrays[entry["name"]] = np.frombuffer(raw, dtype=entry["dtype"]).reshape(shape).copy()
    if _digest(items) != payload.get("checksum"):
        raise ValueError("checksum mismatch: refusing corrupted array payload")
    return arrays


def save_arrays(arrays: dict[str, np.ndarray], path: str | Path) -> None:
    Path(path).write_text(json.dumps(arrays_to_payload(arrays)) + "\n")


def load_arrays(path: str | Path) -> dict[str, np.ndarray]:
    return payload_to_arrays(json.loads(Path(path).read_text()))
