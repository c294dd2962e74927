#!/usr/bin/env python3
"""Reproduce every artifact from one input file in one go.

Usage:
    python scripts/reproduce_all.py --input data/gridwatch_2017.csv --out-dir out

Runs, in order: ingest --check, histogram, curves, bev (week 17),
lull (week 3, base 7 GWe), table2. Stops at the first nonzero exit code.
Without --input, generates the synthetic year into the output directory first.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from windfleet.cli import main as cli_main  # noqa: E402
from windfleet.synth import synthetic_year, write_series_csv  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", help="5-minute records CSV; synthetic year if omitted")
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--workers", default="1")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    input_path = args.input
    if input_path is None:
        input_path = out_dir / "synthetic_year.csv"
        if not Path(input_path).exists():
            write_series_csv(synthetic_year(), input_path)
            print(f"generated {input_path}")

    common = ["--input", str(input_path), "--out-dir", str(out_dir)]
    steps = [
        ["ingest", "--check", *common],
        ["histogram", *common],
        ["curves", *common, "--workers", args.workers],
        ["bev", *common, "--weeks", "17"],
        ["lull", *common, "--weeks", "3", "--base-gen", "7"],
        ["table2", *common, "--workers", args.workers],
    ]
    for step in steps:
        print(f"\n=== windfleet {' '.join(step)}")
        code = cli_main(step)
        if code != 0:
            print(f"step failed with exit code {code}", file=sys.stderr)
            return code
    print(f"\nall artifacts written to {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
