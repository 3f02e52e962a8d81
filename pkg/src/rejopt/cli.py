"""Command-line pipeline: synthesize data, learn thresholds, evaluate, sweep.

Exit codes: 0 success, 2 usage error (bad flags, missing input files),
3 data error (malformed files, schema or class-count mismatches).
All outputs are written atomically and are byte-stable for identical
inputs; report JSON carries a timestamp unless --no-timestamp is given.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import datetime, timezone

from .calibration import CalibrationMap, fit_per_class_temperature
from .learner import learn_thresholds
from .metrics import evaluate, rejected_mask
from .plotting import scatter_svg
from .randomness import RegionTally, ViabilityMethod, region_viable
from .scores import (
    ParseError,
    ThresholdVector,
    atomic_write_text,
    mask_path_for,
    read_mask,
    read_scoreset,
    read_thresholds,
    write_mask,
    write_scoreset,
    write_thresholds,
)
from .synthetic import SyntheticSpec, generate, preset, preset_names

__all__ = ["main"]

EXIT_USAGE = 2
EXIT_DATA = 3

# Default output directory for synthesized presets when --out is omitted.
DATA_DIR_ENV = "REJOPT_DATA_DIR"

_METHOD_NAMES = [m.value for m in ViabilityMethod]


def _delta(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"delta must lie in (0, 1), got {text}")
    return value


def _method(text: str) -> ViabilityMethod:
    try:
        return ViabilityMethod(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown method {text!r}; choose from {', '.join(_METHOD_NAMES)}"
        )


def _delta_list(text: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("need at least one delta")
    return [_delta(p.strip()) for p in parts]


def _method_list(text: str) -> list[ViabilityMethod]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("need at least one method")
    methods = []
    for p in parts:
        m = _method(p.strip())
        if m not in methods:
            methods.append(m)
    return methods


def _counts(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("counts must be train,val,test")
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"counts must be integers: {text!r}")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("counts must be positive")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rejopt",
        description="Learn and apply per-class rejection thresholds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic score dataset")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="named preset (see error message for the list)")
    src.add_argument("--spec", help="path to a problem spec JSON")
    p.add_argument("--seed", type=int, default=None, help="sampling seed (default 0)")
    p.add_argument("--counts", type=_counts, default=None, help="base per-class train,val,test counts")
    p.add_argument("--out", default=None, help=f"output directory (default ${DATA_DIR_ENV})")

    p = sub.add_parser("learn", help="learn per-class thresholds from validation scores")
    p.add_argument("--val", required=True, help="validation score CSV")
    p.add_argument("--delta", type=_delta, default=0.05, help="significance level in (0, 1)")
    p.add_argument("--method", type=_method, default=ViabilityMethod.BCDF,
                   help=f"viability test: {', '.join(_METHOD_NAMES)}")
    p.add_argument("--out", required=True, help="threshold JSON output path")

    p = sub.add_parser("eval", help="apply thresholds to a score set and report metrics")
    p.add_argument("--scores", required=True, help="score CSV to evaluate")
    p.add_argument("--thresholds", required=True, help="threshold JSON")
    p.add_argument("--mask", default=None, help="ideal-reject mask CSV")
    p.add_argument("--report", required=True, help="report JSON output path")
    p.add_argument("--per-class", dest="per_class", default=None, help="per-class breakdown CSV output path")
    p.add_argument("--svg", default=None, help="scatter SVG output path (needs x,y columns)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the report timestamp")

    p = sub.add_parser("sweep", help="learn and evaluate across a delta x method grid")
    p.add_argument("--val", required=True, help="validation score CSV")
    p.add_argument("--test", required=True, help="test score CSV")
    p.add_argument("--deltas", type=_delta_list, default=[0.05, 0.1, 0.5, 0.75, 0.95],
                   help="comma-separated significance levels")
    p.add_argument("--methods", type=_method_list, default=list(ViabilityMethod),
                   help="comma-separated viability tests")
    p.add_argument("--out", required=True, help="output directory for sweep.csv and sweep.json")
    p.add_argument("--jobs", type=int, default=4, help="parallel workers for grid cells")
    p.add_argument("--no-timestamp", action="store_true", help="omit the sweep timestamp")
    return parser


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _require_inputs(*paths: str | None) -> str | None:
    for path in paths:
        if path is not None and not os.path.isfile(path):
            return f"input file not found: {path}"
    return None


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _fmt(value) -> str:
    return "" if value is None else f"{value:.6f}"


def cmd_synth(args) -> int:
    out_dir = args.out or os.environ.get(DATA_DIR_ENV)
    if not out_dir:
        return _fail_usage(f"synth needs --out or the {DATA_DIR_ENV} environment variable")
    if args.preset:
        try:
            spec = preset(args.preset, seed=args.seed or 0,
                          per_class_counts=args.counts or (1000, 1000, 4000))
        except ValueError as exc:
            return _fail_usage(str(exc))
    else:
        missing = _require_inputs(args.spec)
        if missing:
            return _fail_usage(missing)
        try:
            with open(args.spec, encoding="utf-8") as fh:
                spec = SyntheticSpec.from_json(fh.read())
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            print(f"error: bad spec file {args.spec}: {exc}", file=sys.stderr)
            return EXIT_DATA
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
        if args.counts is not None:
            spec = replace(spec, per_class_counts=args.counts)

    os.makedirs(out_dir, exist_ok=True)
    data = generate(spec)
    atomic_write_text(os.path.join(out_dir, "spec.json"), spec.to_json())
    for name in ("train", "val", "test"):
        path = os.path.join(out_dir, f"{name}.csv")
        part = data.partition(name)
        write_scoreset(part, path)
        print(f"wrote {path} ({len(part)} rows)")
        mask = {"val": data.val_mask, "test": data.test_mask}.get(name)
        if mask is not None:
            mpath = mask_path_for(path)
            write_mask(part.ids, mask, mpath)
            print(f"wrote {mpath} ({int(mask.sum())} ideal rejects)")
    return 0


def cmd_learn(args) -> int:
    missing = _require_inputs(args.val)
    if missing:
        return _fail_usage(missing)
    scores = read_scoreset(args.val)
    cal = fit_per_class_temperature(scores)
    tv = learn_thresholds(scores, cal, args.delta, args.method)
    write_thresholds(tv, args.out)
    report = evaluate(scores, tv)
    print(f"method={args.method.value} delta={args.delta}")
    print("class  threshold  temperature  n_rej  k_rej  viable")
    for row in report.per_class:
        tally = row.reject_tally
        viable = region_viable(RegionTally(tally.n, tally.k), args.delta, args.method)
        j = row.class_index
        print(
            f"{j:>5}  {tv.thresholds[j]:>9.6f}  {tv.temperatures[j]:>11.6f}"
            f"  {tally.n:>5}  {tally.k:>5}  {str(viable).lower():>6}"
        )
    print(f"wrote {args.out}")
    return 0


def _write_per_class_csv(report, path: str) -> None:
    lines = ["class_index,predicted_count,coverage,select_accuracy,reject_count,reject_correct"]
    for row in report.per_class:
        d = row.to_dict()
        lines.append(
            f"{d['class_index']},{d['predicted_count']},{_fmt(row.coverage)},"
            f"{_fmt(row.select_accuracy)},{d['reject_count']},{d['reject_correct']}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def cmd_eval(args) -> int:
    missing = _require_inputs(args.scores, args.thresholds, args.mask)
    if missing:
        return _fail_usage(missing)
    scores = read_scoreset(args.scores)
    tv = read_thresholds(args.thresholds)
    mask = read_mask(args.mask, scores.ids) if args.mask else None
    if args.svg and scores.coords is None:
        print(f"error: {args.scores} has no x,y columns, cannot render --svg", file=sys.stderr)
        return EXIT_DATA
    report = evaluate(scores, tv, mask)

    payload = report.to_dict()
    if not args.no_timestamp:
        payload["generated_at"] = _timestamp()
    atomic_write_text(args.report, json.dumps(payload, indent=2) + "\n")
    print(f"wrote {args.report}")
    if args.per_class:
        _write_per_class_csv(report, args.per_class)
        print(f"wrote {args.per_class}")
    if args.svg:
        svg = scatter_svg(scores, rejected_mask(scores, tv))
        atomic_write_text(args.svg, svg)
        print(f"wrote {args.svg}")
    cov = _fmt(report.coverage)
    sa = _fmt(report.select_accuracy) or "n/a"
    ra = _fmt(report.reject_accuracy) or "n/a"
    print(f"coverage={cov} select_accuracy={sa} reject_accuracy={ra}")
    return 0


def _sweep_cell(val, test, cal, delta, method):
    tv = learn_thresholds(val, cal, delta, method)
    return tv, evaluate(val, tv), evaluate(test, tv)


def _sweep_row(label, delta, rv, rt, match="") -> dict:
    return {
        "delta": delta,
        "method": label,
        "val_coverage": rv.coverage,
        "val_select_accuracy": rv.select_accuracy,
        "val_reject_accuracy": rv.reject_accuracy,
        "test_coverage": rt.coverage,
        "test_select_accuracy": rt.select_accuracy,
        "test_reject_accuracy": rt.reject_accuracy,
        "match_bcdf": match,
    }


def cmd_sweep(args) -> int:
    missing = _require_inputs(args.val, args.test)
    if missing:
        return _fail_usage(missing)
    if args.jobs < 1:
        return _fail_usage("--jobs must be at least 1")
    val = read_scoreset(args.val)
    test = read_scoreset(args.test)
    if val.class_count != test.class_count:
        print(
            f"error: class counts differ: {args.val} has {val.class_count}, "
            f"{args.test} has {test.class_count}",
            file=sys.stderr,
        )
        return EXIT_DATA

    cal = fit_per_class_temperature(val)
    identity = CalibrationMap.identity(val.class_count)

    # Baseline rows: no rejection, and a fixed 0.5 threshold with and
    # without calibration.  These are comparison rows, not learners.
    rows = []
    base_tv = ThresholdVector(
        class_count=val.class_count, delta=0.5, method=ViabilityMethod.BCDF,
        temperatures=identity.temperatures, thresholds=(0.0,) * val.class_count,
    )
    rows.append(_sweep_row("base", None, evaluate(val, base_tv), evaluate(test, base_tv)))
    for label, temps in (("naive_0.5", identity.temperatures), ("naive_0.5_cal", cal.temperatures)):
        naive_tv = ThresholdVector(
            class_count=val.class_count, delta=0.5, method=ViabilityMethod.BCDF,
            temperatures=temps, thresholds=(0.5,) * val.class_count,
        )
        rows.append(_sweep_row(label, None, evaluate(val, naive_tv), evaluate(test, naive_tv)))

    cells = [(d, m) for d in args.deltas for m in args.methods]
    with ThreadPoolExecutor(max_workers=min(args.jobs, len(cells))) as pool:
        futures = {cell: pool.submit(_sweep_cell, val, test, cal, *cell) for cell in cells}
    results = {cell: fut.result() for cell, fut in futures.items()}

    mismatches = []
    for delta, method in cells:
        tv, rv, rt = results[(delta, method)]
        match = ""
        if ViabilityMethod.BCDF in args.methods and method is not ViabilityMethod.BCDF:
            ref = results[(delta, ViabilityMethod.BCDF)][0]
            match = "yes" if tv.thresholds == ref.thresholds else "no"
            if match == "no":
                for j, (got, want) in enumerate(zip(tv.thresholds, ref.thresholds)):
                    if got != want:
                        mismatches.append(
                            {
                                "delta": delta,
                                "method": method.value,
                                "class_index": j,
                                "threshold": got,
                                "bcdf_threshold": want,
                            }
                        )
        rows.append(_sweep_row(method.value, delta, rv, rt, match))

    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "sweep.csv")
    header = (
        "delta,method,val_coverage,val_select_accuracy,val_reject_accuracy,"
        "test_coverage,test_select_accuracy,test_reject_accuracy,match_bcdf"
    )
    lines = [header]
    for r in rows:
        delta_text = "" if r["delta"] is None else repr(r["delta"])
        lines.append(
            f"{delta_text},{r['method']},{_fmt(r['val_coverage'])},"
            f"{_fmt(r['val_select_accuracy'])},{_fmt(r['val_reject_accuracy'])},"
            f"{_fmt(r['test_coverage'])},{_fmt(r['test_select_accuracy'])},"
            f"{_fmt(r['test_reject_accuracy'])},{r['match_bcdf']}"
        )
    atomic_write_text(csv_path, "\n".join(lines) + "\n")

    payload = {
        "val": args.val,
        "test": args.test,
        "deltas": args.deltas,
        "methods": [m.value for m in args.methods],
        "rows": rows,
        "mismatches": mismatches,
    }
    if not args.no_timestamp:
        payload["generated_at"] = _timestamp()
    json_path = os.path.join(args.out, "sweep.json")
    atomic_write_text(json_path, json.dumps(payload, indent=2) + "\n")

    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if mismatches:
        flagged = sorted({(m['delta'], m['method']) for m in mismatches})
        for delta, method in flagged:
            count = sum(1 for m in mismatches if (m["delta"], m["method"]) == (delta, method))
            print(f"threshold mismatch vs bcdf: method={method} delta={delta} ({count} classes)")
    else:
        print("all CI methods matched bcdf thresholds")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help.
        return int(exc.code or 0)
    handlers = {
        "synth": cmd_synth,
        "learn": cmd_learn,
        "eval": cmd_eval,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
