"""Delimited tables, text formatting and figure bundles for the command line."""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Dict, List, Optional

from .econ import GainCurve, break_even, gain_curve
from .plotting import plot_gain_curves
from .scenario import Scenario

CSV_COLUMNS = ("n", "friction_profile", "valid_rate", "expected_winnings", "expected_gain")
CSV_NAME = "gain_curve.csv"
SVG_NAME = "gain_curve.svg"

_FOUR_PLACES = Decimal("0.0001")


def fmt_money(value: float) -> str:
    """Fixed-point with four decimals, ties to even."""
    q = Decimal(value).quantize(_FOUR_PLACES, rounding=ROUND_HALF_EVEN)
    if q == 0:
        q = abs(q)
    return f"{q:f}"


@dataclass(frozen=True)
class FigureArtifact:
    csv_path: Path
    svg_path: Path
    labels: Dict[str, str] = field(default_factory=dict)  # profile -> colour
    crossings: Dict[str, Optional[int]] = field(default_factory=dict)
    rows: int = 0


def gain_curves(scenario: Scenario) -> Dict[str, GainCurve]:
    n_min, n_max, step = scenario.sweep_range()
    return {
        name: gain_curve(scenario.lottery, friction, n_min, n_max, step)
        for name, friction in scenario.frictions.items()
    }


def first_positive(curve: GainCurve) -> Optional[int]:
    """Break-even point if the lottery supports it, else the first sampled positive n."""
    if curve.spec.is_parimutuel:
        return break_even(curve.spec, curve.friction)
    for pt in curve.points:
        if pt.expected_gain > 0:
            return pt.n
    return None


def csv_rows(curves: Dict[str, GainCurve]) -> List[List[str]]:
    rows = []
    for name, curve in curves.items():
        for pt in curve.points:
            # repr round-trips, so the gain identity can be re-checked from the file
            rows.append([str(pt.n), name, repr(pt.valid_rate), repr(pt.expected_winnings), repr(pt.expected_gain)])
    return rows


def _write_csv(path: Path, rows: List[List[str]]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)


def write_gain_figure(scenario: Scenario, out_dir) -> FigureArtifact:
    """Write ``gain_curve.csv`` and ``gain_curve.svg`` into ``out_dir``.

    Both files are rendered to temporaries first and moved into place only
    once both exist, so a failure leaves no partial output behind.
    """
    out_dir = Path(out_dir)
    curves = gain_curves(scenario)
    crossings = {}
    for name, curve in curves.items():
        first = first_positive(curve)
        crossings[name] = first if first is not None and curve.ns[0] <= first <= curve.ns[-1] else None
    rows = csv_rows(curves)

    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path, svg_path = out_dir / CSV_NAME, out_dir / SVG_NAME
    tmp_csv = tmp_svg = None
    try:
        fd, tmp_csv = tempfile.mkstemp(dir=out_dir, prefix=".gain_curve.", suffix=".csv")
        os.close(fd)
        fd, tmp_svg = tempfile.mkstemp(dir=out_dir, prefix=".gain_curve.", suffix=".svg")
        os.close(fd)
        _write_csv(Path(tmp_csv), rows)
        colors = plot_gain_curves(curves, tmp_svg, crossings)
        for tmp in (tmp_csv, tmp_svg):
            os.chmod(tmp, 0o644)
        os.replace(tmp_csv, csv_path)
        tmp_csv = None
        os.replace(tmp_svg, svg_path)
        tmp_svg = None
    finally:
        for tmp in (tmp_csv, tmp_svg):
            if tmp is not None and os.path.exists(tmp):
                os.unlink(tmp)
    return FigureArtifact(csv_path, svg_path, colors, crossings, len(rows))


def read_gain_csv(path) -> List[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
