"""Command-line front end.

    score-export --model clf.joblib --data sklearn:digits --split test --out scores.csv

Exit codes: 0 success, 2 bad flags, 3 export failure (unreadable inputs,
class-count mismatch, model without a scoring API).
"""

from __future__ import annotations

import argparse
import sys

from .datasets import SPLITS
from .errors import ExportError
from .export import ExportJob, export_logits

EXIT_USAGE = 2
EXIT_DATA = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="score-export",
        description="Run a pretrained classifier over a labeled dataset "
        "and dump an id,label,logit_* CSV of raw scores.",
    )
    parser.add_argument("--model", required=True,
                        help="joblib pickle, or TorchScript archive (.pt/.pth)")
    parser.add_argument("--data", required=True,
                        help="sklearn:<name> or path to an .npz with X and y")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--split", choices=SPLITS, default="all")
    parser.add_argument("--batch-size", type=int, default=256)
    parser.add_argument("--device", default="cpu",
                        help="device hint for TorchScript models")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        job = ExportJob(
            model=args.model,
            data=args.data,
            out=args.out,
            split=args.split,
            batch_size=args.batch_size,
            device=args.device,
        )
        path = export_logits(job)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    with open(path, encoding="utf-8") as fh:
        rows = sum(1 for _ in fh) - 1
    print(f"wrote {path} ({rows} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
