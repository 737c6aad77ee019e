"""Command line wrapper: infer-adapter --model <id> --types <file>
--threshold 0.5 --in test.jsonl --out preds.jsonl"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .adapter import (
    AdapterConfig,
    AdapterError,
    DEFAULT_BATCH_SIZE,
    DEFAULT_SPAN_THRESHOLD,
    SchemaViolations,
    load_types,
    predict_file,
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="infer-adapter",
        description="Run a zero-shot NER backend over a test JSONL file and "
                    "write prediction JSONL for the evaluation harness.",
    )
    parser.add_argument("--version", action="version", version=f"infer-adapter {__version__}")
    parser.add_argument("--model", required=True,
                        help="'echo-gold' or 'hf:<model-id>'")
    parser.add_argument("--types", required=True, help="file with one entity type per line")
    parser.add_argument("--threshold", type=float, default=DEFAULT_SPAN_THRESHOLD,
                        help="minimum span probability (default %(default)s)")
    parser.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    parser.add_argument("--in", dest="test_path", required=True, metavar="TEST_JSONL")
    parser.add_argument("--out", dest="out_path", required=True, metavar="PREDS_JSONL")
    args = parser.parse_args(argv)

    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)-7s %(name)s: %(message)s")
    try:
        config = AdapterConfig(
            model=args.model,
            types=load_types(args.types),
            span_threshold=args.threshold,
            batch_size=args.batch_size,
            output=Path(args.out_path),
        )
        predict_file(args.test_path, config)
    except SchemaViolations as exc:
        for err in exc.errors:
            print(json.dumps(err), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AdapterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
