"""Self-contained writer for the ONEM embedding-table interchange format.

Layout: magic ``ONEM``, u32 version (=1), u64 vocab size, u64 dimension,
then vocab*dim little-endian float32 values row-major. Kept independent of
the analysis package on purpose: the byte layout is the contract.
"""

from __future__ import annotations

import hashlib
import json
import struct
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

MAGIC = b"ONEM"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def payload_bytes(matrix: np.ndarray) -> bytes:
    return np.ascontiguousarray(matrix, dtype="<f4").tobytes()


def write_table(matrix: np.ndarray, path, model_id: str = "", sidecar: bool = True) -> str:
    """Write the ONEM file (plus metadata sidecar); returns the payload sha256."""
    path = Path(path)
    vocab, dim = matrix.shape
    payload = payload_bytes(matrix)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, vocab, dim))
        fh.write(payload)
    if sidecar:
        meta = {
            "model_id": model_id,
            "extracted_at": datetime.now(timezone.utc).isoformat(),
        }
        Path(f"{path}.meta.json").write_text(json.dumps(meta, indent=2))
    return hashlib.sha256(payload).hexdigest()


def read_header(path) -> tuple:
    """(version, vocab, dim) of an existing ONEM file; used for verification."""
    with open(path, "rb") as fh:
        magic, version, vocab, dim = _HEADER.unpack(fh.read(_HEADER.size))
    if magic != MAGIC:
        raise ValueError(f"{path}: not an ONEM file")
    return version, vocab, dim
