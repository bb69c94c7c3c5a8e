"""Tokenization bridge: text generation records to token dumps and back."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

from .errors import ConsistencyError, ParseError, RangeError, ResolutionError


@lru_cache(maxsize=8)
def _tokenizer(model_id: str):
    try:
        from transformers import AutoTokenizer

        return AutoTokenizer.from_pretrained(model_id)
    except (OSError, ValueError, EnvironmentError) as exc:
        raise ResolutionError(f"cannot resolve tokenizer {model_id!r}: {exc}") from exc


def encode(model_id: str, text: str) -> list:
    """Content token ids of ``text`` (no special tokens added)."""
    return list(_tokenizer(model_id)(text, add_special_tokens=False)["input_ids"])


def detokenize(model_id: str, ids) -> str:
    """Text for a token id list; inverse of :func:`encode` for clean tokenizers."""
    tokenizer = _tokenizer(model_id)
    ids = [int(i) for i in ids]
    vocab = len(tokenizer)
    for token_id in ids:
        if not 0 <= token_id < vocab:
            raise RangeError(f"token id {token_id} outside vocabulary of size {vocab}")
    if not ids:
        return ""
    return tokenizer.decode(ids)


def tokenize_file(model_id: str, text_path, out_path, vocab_size: int | None = None) -> int:
    """Tokenize line-delimited generation records into a token dump.

    Input lines are JSON objects with ``prompt_id``, ``temperature`` and
    ``text``; output lines replace ``text`` with ``token_ids`` in the same
    order. ``vocab_size``, when given (e.g. from the ONEM header), guards
    against tokenizer/embedding mismatches. Returns the record count.
    """
    text_path = Path(text_path)
    out_path = Path(out_path)
    count = 0
    with open(text_path) as src, open(out_path, "w") as dst:
        for lineno, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                prompt_id = rec["prompt_id"]
                temperature = float(rec["temperature"])
                text = rec["text"]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{text_path}: line {lineno}: malformed record ({exc})") from exc
            ids = encode(model_id, text) if text else []
            if vocab_size is not None:
                for token_id in ids:
                    if token_id >= vocab_size:
                        raise ConsistencyError(
                            f"{text_path}: line {lineno}: token id {token_id} >= embedding "
                            f"vocab {vocab_size}; tokenizer and table do not match"
                        )
            out = {"prompt_id": prompt_id, "temperature": temperature, "token_ids": ids}
            dst.write(json.dumps(out) + "\n")
            count += 1
    return count
