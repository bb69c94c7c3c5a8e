"""Checkpoint and tokenizer bridge to the analysis interchange formats."""

__version__ = "0.1.0"

from .extract import ExtractionRecord, extract_embedding_table
from .tokens import detokenize, encode, tokenize_file

__all__ = [
    "ExtractionRecord",
    "detokenize",
    "encode",
    "extract_embedding_table",
    "tokenize_file",
    "__version__",
]
