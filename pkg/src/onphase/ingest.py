"""Interchange formats: embedding tables, token dumps, embedding lookups.

The binary table format ("ONEM") is fixed-width and endianness-pinned so that
any producer in any language can interoperate: magic ``b"ONEM"``, u32 format
version (=1), u64 vocab size V, u64 embedding dimension N, then V*N
little-endian float32 values, row-major. An optional JSON sidecar
(``<path>.meta.json``) carries the model id and extraction timestamp.

Token dumps are JSON lines, one generation per line, with fields
``prompt_id``, ``temperature`` and ``token_ids`` (plus optional ``model_id``).
Loaders are pure functions on immutable inputs and are thread-safe.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    DegenerateInputError,
    FormatError,
    InvalidHeaderError,
    ParseError,
    RangeError,
    TruncationError,
    ValidationError,
)

ONEM_MAGIC = b"ONEM"
ONEM_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")  # magic, version, V, N


@dataclass(frozen=True)
class EmbeddingTable:
    """Vocab-indexed matrix of token embedding vectors.

    ``rows`` has shape (V, N); row v is the embedding of token id v.
    """

    rows: np.ndarray
    model_id: str = ""

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float32)
        if rows.ndim != 2:
            raise ValidationError("embedding rows must be a 2-d array")
        if rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValidationError("vocab size and dimension must be positive")
        if not np.isfinite(rows).all():
            bad = int(np.argwhere(~np.isfinite(rows).all(axis=1))[0, 0])
            raise DataError(f"non-finite component in embedding row {bad}")
        object.__setattr__(self, "rows", rows)
        self.rows.setflags(write=False)

    @property
    def vocab_size(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class TokenSequence:
    """One generated token stream together with the sampling temperature."""

    token_ids: tuple
    temperature: float
    prompt_id: str = ""
    model_id: str = ""

    def __post_init__(self):
        ids = tuple(int(t) for t in self.token_ids)
        if any(t < 0 for t in ids):
            raise ValidationError(f"negative token id in sequence {self.prompt_id!r}")
        if not np.isfinite(self.temperature) or self.temperature < 0:
            raise ValidationError(
                f"temperature must be finite and >= 0, got {self.temperature!r}"
            )
        object.__setattr__(self, "token_ids", ids)
        object.__setattr__(self, "temperature", float(self.temperature))

    def __len__(self) -> int:
        return len(self.token_ids)

    def validate_against(self, table: EmbeddingTable) -> None:
        for t in self.token_ids:
            if t >= table.vocab_size:
                raise RangeError(
                    f"token id {t} out of range for vocab size {table.vocab_size}"
                    f" (sequence {self.prompt_id!r})"
                )


@dataclass(frozen=True)
class EmbeddingSequence:
    """Embedding vectors of one generation; the input to the energy observable."""

    vectors: np.ndarray
    temperature: float

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=np.float64)
        if vecs.ndim != 2 or vecs.shape[0] < 1:
            raise ValidationError("embedding sequence needs at least one vector")
        if not np.isfinite(vecs).all():
            raise DataError("non-finite component in embedding sequence")
        object.__setattr__(self, "vectors", vecs)
        self.vectors.setflags(write=False)

    @property
    def length(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.length


def write_embedding_table(table: EmbeddingTable, path, sidecar: bool = False) -> Path:
    """Write an ONEM file; optionally a JSON metadata sidecar next to it."""
    path = Path(path)
    payload = np.ascontiguousarray(table.rows, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(ONEM_MAGIC, ONEM_VERSION, table.vocab_size, table.dim))
        fh.write(payload.tobytes())
    if sidecar:
        meta = {
            "model_id": table.model_id,
            "extracted_at": datetime.now(timezone.utc).isoformat(),
        }
        Path(f"{path}.meta.json").write_text(json.dumps(meta, indent=2))
    return path


def load_embedding_table(path) -> EmbeddingTable:
    """Read an ONEM file, enforcing magic, header sanity and exact payload size."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: file shorter than the fixed header")
    magic, version, vocab, dim = _HEADER.unpack_from(blob)
    if magic != ONEM_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {ONEM_MAGIC!r}")
    if version != ONEM_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    if vocab == 0 or dim == 0:
        raise InvalidHeaderError(f"{path}: header declares V={vocab}, N={dim}")
    expected = vocab * dim * 4
    got = len(blob) - _HEADER.size
    if got < expected:
        raise TruncationError(f"{path}: payload has {got} bytes, header promises {expected}")
    if got > expected:
        raise FormatError(f"{path}: {got - expected} trailing bytes after payload")
    rows = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(vocab, dim)
    if not np.isfinite(rows).all():
        bad = int(np.argwhere(~np.isfinite(rows).all(axis=1))[0, 0])
        raise DataError(f"{path}: non-finite value in embedding row {bad}")
    model_id = ""
    meta_path = Path(f"{path}.meta.json")
    if meta_path.exists():
        try:
            model_id = str(json.loads(meta_path.read_text()).get("model_id", ""))
        except (OSError, json.JSONDecodeError):
            model_id = ""
    return EmbeddingTable(rows=rows.copy(), model_id=model_id)


def write_token_dump(sequences, path) -> Path:
    """Write token sequences as JSON lines, one generation per line."""
    path = Path(path)
    with open(path, "w") as fh:
        for seq in sequences:
            rec = {
                "prompt_id": seq.prompt_id,
                "temperature": seq.temperature,
                "token_ids": list(seq.token_ids),
            }
            if seq.model_id:
                rec["model_id"] = seq.model_id
            fh.write(json.dumps(rec) + "\n")
    return path


def load_token_dump(path, table: EmbeddingTable | None = None) -> list[TokenSequence]:
    """Read a token dump; order preserved, one TokenSequence per line.

    When ``table`` is given, every token id is range-checked against it.
    """
    path = Path(path)
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                seq = TokenSequence(
                    token_ids=rec["token_ids"],
                    temperature=rec["temperature"],
                    prompt_id=str(rec.get("prompt_id", "")),
                    model_id=str(rec.get("model_id", "")),
                )
            except ValidationError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}: line {lineno}: malformed record ({exc})") from exc
            if table is not None:
                seq.validate_against(table)
            out.append(seq)
    return out


def lookup_embeddings(table: EmbeddingTable, seq: TokenSequence) -> EmbeddingSequence:
    """Map token ids to their embedding rows, carrying the temperature through."""
    if len(seq) < 1:
        raise ValidationError("cannot embed an empty token sequence")
    seq.validate_against(table)
    ids = np.fromiter(seq.token_ids, dtype=np.int64, count=len(seq))
    return EmbeddingSequence(vectors=table.rows[ids].astype(np.float64), temperature=seq.temperature)
