"""Serialization: a small binary array container, CSV tables, manifests.

Binary container format (little endian throughout):

    magic   8 bytes  b"KFLOW01\\n"
    count   uint32   number of named arrays
    then per array:
        name_len uint16, name utf-8 bytes
        dtype    uint8   0 = float64, 1 = complex128, 2 = int64
        ndim     uint8
        shape    ndim * uint64
        data     C-order raw bytes

Every run also writes a JSON manifest holding the fully resolved
configuration, package version, tolerances, and seeds, so outputs are
reproducible byte for byte from the manifest alone. Manifests deliberately
contain no timestamps.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigError

__all__ = ["write_arrays", "read_arrays", "write_manifest", "write_csv"]

_MAGIC = b"KFLOW01\n"
_DTYPES = {0: np.float64, 1: np.complex128, 2: np.int64}
_CODES = {np.dtype(np.float64): 0, np.dtype(np.complex128): 1, np.dtype(np.int64): 2}


def write_arrays(path, arrays: dict) -> None:
    """Write named arrays to the binary container at ``path``."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(arrays)))
        for name, arr in arrays.items():
            arr = np.ascontiguousarray(arr)
            if arr.dtype not in _CODES:
                if np.issubdtype(arr.dtype, np.integer):
                    arr = arr.astype(np.int64)
                elif np.issubdtype(arr.dtype, np.complexfloating):
                    arr = arr.astype(np.complex128)
                else:
                    arr = arr.astype(np.float64)
            code = _CODES[arr.dtype]
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<BB", code, arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes(order="C"))


def read_arrays(path) -> dict:
    """Read a binary container written by :func:`write_arrays`."""
    path = Path(path)
    out = {}
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ConfigError(f"{path} is not a kerrflow array container")
        (count,) = struct.unpack("<I", fh.read(4))
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            code, ndim = struct.unpack("<BB", fh.read(2))
            shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim)) if ndim else ()
            dtype = np.dtype(_DTYPES[code])
            n_items = int(np.prod(shape)) if shape else 1
            data = fh.read(n_items * dtype.itemsize)
            out[name] = np.frombuffer(data, dtype=dtype).reshape(shape).copy()
    return out


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return _jsonify(obj.item())
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_manifest(path, payload: dict) -> None:
    """Deterministic JSON manifest (sorted keys, no timestamps)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonify(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    """Plain deterministic CSV; floats use repr for exact round-trips."""
    path = Path(path)

    def fmt(value):
        if isinstance(value, float):
            return repr(value)
        if isinstance(value, (np.floating, np.integer)):
            return repr(value.item())
        return str(value)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
