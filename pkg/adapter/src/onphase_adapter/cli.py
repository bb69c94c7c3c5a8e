"""Adapter CLI: extract-embeddings, tokenize, detokenize."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import AdapterError
from .extract import extract_embedding_table
from .tokens import detokenize, tokenize_file


def _cmd_extract(args) -> int:
    record = extract_embedding_table(args.model, args.out)
    print(json.dumps(record.__dict__, indent=2))
    return 0


def _cmd_tokenize(args) -> int:
    count = tokenize_file(args.model, args.infile, args.out, vocab_size=args.vocab_size)
    print(f"tokenized {count} records -> {args.out}")
    return 0


def _cmd_detokenize(args) -> int:
    with open(args.infile) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            print(detokenize(args.model, rec["token_ids"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onphase-adapter",
        description="Bridge model checkpoints and tokenizers to the ONEM/token-dump formats.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ext = sub.add_parser("extract-embeddings", help="write a model's input embeddings as ONEM")
    ext.add_argument("--model", required=True, help="model id or local checkpoint path")
    ext.add_argument("--out", required=True, help="output .onem path")
    ext.set_defaults(func=_cmd_extract)

    tok = sub.add_parser("tokenize", help="tokenize line-delimited generation records")
    tok.add_argument("--model", required=True)
    tok.add_argument("--in", dest="infile", required=True)
    tok.add_argument("--out", required=True)
    tok.add_argument("--vocab-size", type=int, default=None, help="embedding vocab to check against")
    tok.set_defaults(func=_cmd_tokenize)

    det = sub.add_parser("detokenize", help="print text for each token-dump record")
    det.add_argument("--model", required=True)
    det.add_argument("--in", dest="infile", required=True)
    det.set_defaults(func=_cmd_detokenize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
