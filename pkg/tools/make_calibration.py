#!/usr/bin/env python3
"""Regenerate the pinned calibration bands.

Measures every two-sided comparability ratio on the fixed seeded suite and
rewrites src/focksum/calibration.txt.  A change to that file is a reviewed
event: regenerate, inspect the diff, and commit deliberately.

Usage: python tools/make_calibration.py [--seed 0] [--version N]
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from focksum.calibration import format_calibration  # noqa: E402
from focksum.oracles import compute_calibration  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--version", type=int, default=1)
    args = ap.parse_args()
    table = compute_calibration(seed=args.seed, version=args.version)
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "focksum" / "calibration.txt"
    out.write_text(format_calibration(table), encoding="utf-8")
    print(f"wrote {len(table.bands)} bands to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
