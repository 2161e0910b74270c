"""
Report rendering.

The table has one row per stage and one column per eigenvalue index, with
each enclosure written as shared digits plus the differing tails, e.g.
2.48604311[47,50]. The CSV carries the exact endpoint texts of the report.
"""

import csv
import io
import math
import os
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from typing import Dict, List

from rich.console import Console
from rich.table import Table

from src.core.models import EntryRecord, RunReport, StageRecord

CSV_HEADER = ["stage", "index", "lo", "hi", "width"]
MAX_DECIMALS = 10

_WIDE = Context(prec=80)


def _quantize(text: str, decimals: int, rounding: str) -> str:
    return str(Decimal(text).quantize(Decimal(1).scaleb(-decimals), rounding=rounding, context=_WIDE))


def compact(entry: EntryRecord) -> str:
    lo, hi = float(entry.lo), float(entry.hi)
    if math.isinf(hi):
        return f"[{lo:.6g}, ∞)"
    if math.isinf(lo):
        return f"(-∞, {hi:.6g}]"
    width = hi - lo
    decimals = MAX_DECIMALS if width <= 0 else max(0, min(MAX_DECIMALS, 1 - math.floor(math.log10(width))))
    a = _quantize(entry.lo, decimals, ROUND_FLOOR)
    b = _quantize(entry.hi, decimals, ROUND_CEILING)
    if a == b:
        return a
    prefix = os.path.commonprefix([a, b])
    if "." not in prefix or len(a) != len(b):
        return f"[{a}, {b}]"
    return f"{prefix}[{a[len(prefix):]},{b[len(prefix):]}]"


def _indices(stages: List[StageRecord]) -> List[int]:
    return sorted({e.index for s in stages for e in s.entries})


def emit_table(report: RunReport) -> str:
    table = Table(title=f"{report.name} ({report.kind})" if report.stages else None)
    table.add_column("stage", style="bold")
    indices = _indices(report.stages)
    for i in indices:
        table.add_column(f"μ{i}", justify="right")
    for stage in report.stages:
        by_index: Dict[int, EntryRecord] = {e.index: e for e in stage.entries}
        table.add_row(stage.label, *[compact(by_index[i]) if i in by_index else "" for i in indices])

    buffer = io.StringIO()
    Console(file=buffer, width=max(80, 24 * (len(indices) + 1)), color_system=None).print(table)
    return buffer.getvalue()


def emit_csv(report: RunReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for stage in report.stages:
        for e in stage.entries:
            writer.writerow([stage.label, e.index, e.lo, e.hi, repr(e.width)])
    return buffer.getvalue()


def read_csv(text: str) -> List[StageRecord]:
    """Stages back from emit_csv output (ceilings are not part of the CSV)"""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    stages: Dict[str, StageRecord] = {}
    for label, index, lo, hi, width in reader:
        stage = stages.setdefault(label, StageRecord(label=label))
        stage.entries.append(EntryRecord(index=int(index), lo=lo, hi=hi, width=float(width)))
    return list(stages.values())


def emit_results(report: RunReport, format: str = "table") -> str:
    if format == "csv":
        return emit_csv(report)
    if format == "table":
        return emit_table(report)
    raise ValueError(f"unknown format {format!r}")


def effort_table(report: RunReport) -> Table:
    table = Table(title="effort")
    table.add_column("metric", style="bold")
    table.add_column("value", justify="right")
    if report.effort is not None:
        table.add_row("operators", str(report.effort.operators))
        table.add_row("levels", str(report.effort.levels))
        table.add_row("eigenvalues per level", ", ".join(str(n) for n in report.effort.eigenvalues_per_level))
        table.add_row("eigenvalues", str(report.effort.total_eigenvalues))
    for name, value in sorted(report.metrics.get("counters", {}).items()):
        table.add_row(name, str(value))
    for name, value in sorted(report.metrics.get("gauges", {}).items()):
        table.add_row(name, f"{value:g}")
    for name, stats in sorted(report.metrics.get("histograms", {}).items()):
        table.add_row(name, f"n={stats['count']} max={stats['max']:.3g}")
    table.add_row("wall seconds", f"{report.wall_seconds:.2f}")
    return table
