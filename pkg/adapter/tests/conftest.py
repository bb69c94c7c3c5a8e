"""Fixture checkpoint and tokenizer, built locally; no hub access needed."""

import os

import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

WORDPIECE_VOCAB = [
    "[PAD]",
    "[UNK]",
    "[CLS]",
    "[SEP]",
    "[MASK]",
    "hello",
    "world",
    "!",
    "good",
    "morning",
    "the",
    "a",
    "dog",
    "cat",
    "sat",
    "on",
    "mat",
    "##s",
    "##ly",
    "quick",
    ".",
    ",",
]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """GPT-2-architecture checkpoint with V=10, N=4, deterministic weights."""
    import torch
    from transformers import GPT2Config, GPT2Model

    torch.manual_seed(0)
    config = GPT2Config(
        vocab_size=10,
        n_positions=16,
        n_embd=4,
        n_layer=1,
        n_head=1,
    )
    model = GPT2Model(config)
    path = tmp_path_factory.mktemp("ckpt") / "tiny-gpt2"
    model.save_pretrained(path)
    return str(path)


@pytest.fixture(scope="session")
def wordpiece_tokenizer_dir(tmp_path_factory):
    """Word-piece tokenizer over a tiny fixed vocabulary."""
    from transformers import BertTokenizer

    vocab_dir = tmp_path_factory.mktemp("tok")
    (vocab_dir / "vocab.txt").write_text("\n".join(WORDPIECE_VOCAB) + "\n")
    tokenizer = BertTokenizer(str(vocab_dir / "vocab.txt"), do_lower_case=True)
    out = tmp_path_factory.mktemp("tok_saved") / "wordpiece"
    tokenizer.save_pretrained(out)
    return str(out)
