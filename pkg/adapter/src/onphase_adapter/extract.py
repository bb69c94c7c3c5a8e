"""Input-embedding extraction from transformers checkpoints."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, ResolutionError
from .onem import write_table


@dataclass(frozen=True)
class ExtractionRecord:
    """Provenance of one written ONEM file."""

    model_id: str
    vocab_size: int
    dim: int
    output_path: str
    checksum: str  # sha256 of the payload bytes
    matrix: str = "input"  # which embedding matrix was taken


def load_input_embedding_matrix(model_id: str) -> np.ndarray:
    """The model's input-embedding weight as float32 (V, N).

    The input matrix is the one that defines tokens as vectors; for
    tied-weight models it coincides with the output head anyway.
    """
    try:
        from transformers import AutoModel

        model = AutoModel.from_pretrained(model_id)
    except (OSError, ValueError, EnvironmentError) as exc:
        raise ResolutionError(f"cannot resolve model {model_id!r}: {exc}") from exc
    weight = model.get_input_embeddings().weight.detach().cpu().numpy()
    return np.asarray(weight, dtype=np.float32)


def extract_embedding_table(model_id: str, out_path) -> ExtractionRecord:
    """Write the input-embedding matrix as an ONEM file.

    Refuses to write anything when the matrix contains non-finite entries.
    Extraction is read-only with respect to the checkpoint.
    """
    matrix = load_input_embedding_matrix(model_id)
    if not np.isfinite(matrix).all():
        bad = int(np.argwhere(~np.isfinite(matrix).all(axis=1))[0, 0])
        raise DataError(f"embedding row {bad} of {model_id!r} is non-finite; refusing to write")
    out_path = Path(out_path)
    checksum = write_table(matrix, out_path, model_id=model_id)
    return ExtractionRecord(
        model_id=model_id,
        vocab_size=int(matrix.shape[0]),
        dim=int(matrix.shape[1]),
        output_path=str(out_path),
        checksum=checksum,
    )
