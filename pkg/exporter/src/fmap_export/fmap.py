"""FMAP writer: the wire format shared with the segmentation pipeline.

Layout: magic ``FMAP``, u32 version (1), u32 H, W, D, then H*W*D
little-endian float32 values, row-major with the channel index fastest
(value (y, x, d) at offset (y*W + x)*D + d).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"FMAP"
VERSION = 1
_HEADER = struct.Struct("<4s4I")


def write_fmap(values: np.ndarray, path: str | Path) -> None:
    """Write an (H, W, D) array as an FMAP file."""
    values = np.asarray(values)
    if values.ndim != 3 or values.size == 0:
        raise ValueError(f"expected nonempty (H, W, D) array, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("refusing to write non-finite values")
    h, w, d = values.shape
    header = _HEADER.pack(MAGIC, VERSION, h, w, d)
    payload = np.ascontiguousarray(values, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def read_fmap(path: str | Path) -> np.ndarray:
    """Read an FMAP file back (used by the round-trip tests)."""
    raw = Path(path).read_bytes()
    magic, version, h, w, d = _HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION:
        raise ValueError(f"{path}: not a version-{VERSION} FMAP file")
    if len(raw) != _HEADER.size + h * w * d * 4:
        raise ValueError(f"{path}: payload size mismatch")
    return np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(h, w, d).copy()
