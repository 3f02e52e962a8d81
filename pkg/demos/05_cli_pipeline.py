"""
The command-line pipeline, end to end
=====================================

Everything the library does is also reachable from the `rejopt` console
script, speaking plain CSV and JSON so any classifier can feed it.  This
demo drives a full run in a temporary directory:

    synth  -> train/val/test score CSVs (plus ideal-mask sidecars)
    learn  -> thresholds.json
    eval   -> report.json, per-class CSV, SVG scatter of the reject region
    sweep  -> delta x method grid with baseline rows

The same subcommands are available as `python3 -m rejopt.cli`.
"""

import json
import pathlib
import subprocess
import sys
import tempfile

def run(*args):
    cmd = [sys.executable, "-m", "rejopt.cli", *args]
    print("$ rejopt " + " ".join(args))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    sys.stdout.write(proc.stdout)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(proc.returncode)
    return proc

with tempfile.TemporaryDirectory() as tmp:
    root = pathlib.Path(tmp)
    data = root / "data"

    # Two unit squares with a quarter overlap; counts are per class.
    run("synth", "--preset", "synthetic1", "--seed", "5",
        "--counts", "400,400,800", "--out", str(data))

    run("learn", "--val", str(data / "val.csv"),
        "--delta", "0.05", "--method", "bcdf",
        "--out", str(root / "thresholds.json"))

    run("eval", "--scores", str(data / "test.csv"),
        "--thresholds", str(root / "thresholds.json"),
        "--mask", str(data / "test.mask.csv"),
        "--report", str(root / "report.json"),
        "--per-class", str(root / "per_class.csv"),
        "--svg", str(root / "scatter.svg"))

    run("sweep", "--val", str(data / "val.csv"), "--test", str(data / "test.csv"),
        "--deltas", "0.05,0.25", "--methods", "bcdf,wilson_nocc",
        "--out", str(root / "sweep"))

    print("\nfiles produced:")
    for p in sorted(root.rglob("*")):
        if p.is_file():
            print(f"  {p.relative_to(root)}  ({p.stat().st_size} bytes)")

    report = json.loads((root / "report.json").read_text())
    print("\nreport.json highlights:")
    for key in ("coverage", "select_accuracy", "reject_accuracy", "ida"):
        print(f"  {key}: {report[key]}")

    # The SVG colors kept points by predicted class and paints rejected ones
    # black; open it in a browser to see the reject band hugging the overlap.
    svg = (root / "scatter.svg").read_text()
    black = 'fill="#000000"'
    print(f"\nscatter.svg: {svg.count('<circle')} points, "
          f"{svg.count(black)} rejected")
