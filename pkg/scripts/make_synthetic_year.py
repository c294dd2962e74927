#!/usr/bin/env python3
"""Write the bundled deterministic synthetic year as a raw-format CSV.

Usage:
    python scripts/make_synthetic_year.py [out.csv]

The file has the default columns (timestamp,demand,wind,solar) in MW at
5-minute cadence, 52 full weeks. Repeated runs produce identical bytes.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from windfleet.synth import synthetic_year, write_series_csv  # noqa: E402


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("synthetic_year.csv")
    series = synthetic_year()
    write_series_csv(series, out)
    print(f"wrote {series.n_samples} samples to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
