"""Pinned regression bands for every two-sided comparability estimate.

All hidden comparability constants in the analysis are operationalized as
measured ratio bands on a fixed, seeded calibration suite.  The measured
values are pinned in one versioned text file shipped with the package;
re-runs (including with fresh seeds) must stay within the pinned band up
to a +-20% slack.  Changing a band means regenerating the file with
``tools/make_calibration.py`` and reviewing the diff — never editing a
number in place silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

BAND_SLACK = 1.2  # re-measurements must stay within band * [1/1.2, 1.2]

_DEFAULT_BANDS = {
    # conservative fallbacks used when a case id was never calibrated
    "pi_band:default": (0.5, 2.0),
    "pi_band:const": (0.588, 1.70),
}


@dataclass(frozen=True)
class CalibrationTable:
    version: int
    bands: dict

    def get(self, case_id: str):
        if case_id in self.bands:
            return self.bands[case_id]
        return _DEFAULT_BANDS.get(case_id)

    def band_for_weight(self, prefix: str, w) -> tuple[float, float]:
        """Band for a weight family: exact label, then head, then default."""
        for key in (f"{prefix}:{w.label}", f"{prefix}:{w.label.split(':')[0]}",
                    f"{prefix}:default"):
            band = self.get(key)
            if band is not None:
                return band
        return (0.5, 2.0)

    def within(self, case_id: str, value: float, slack: float = BAND_SLACK) -> bool:
        band = self.get(case_id)
        if band is None:
            return False
        lo, hi = band
        return lo / slack <= value <= hi * slack


def parse_calibration(text: str) -> CalibrationTable:
    version = 0
    bands = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "version":
            version = int(parts[1])
            continue
        if len(parts) != 3:
            raise ValueError(f"bad calibration line: {raw!r}")
        bands[parts[0]] = (float(parts[1]), float(parts[2]))
    return CalibrationTable(version, bands)


def format_calibration(table: CalibrationTable) -> str:
    lines = ["# focksum calibration bands (generated by tools/make_calibration.py)",
             f"version {table.version}"]
    for case_id in sorted(table.bands):
        lo, hi = table.bands[case_id]
        lines.append(f"{case_id} {lo:.12g} {hi:.12g}")
    return "\n".join(lines) + "\n"


def load_calibration(path: str) -> CalibrationTable:
    with open(path, encoding="utf-8") as fh:
        return parse_calibration(fh.read())


@lru_cache(maxsize=1)
def default_calibration() -> CalibrationTable:
    try:
        text = resources.files("focksum").joinpath("calibration.txt").read_text()
    except FileNotFoundError:
        return CalibrationTable(0, dict(_DEFAULT_BANDS))
    return parse_calibration(text)
