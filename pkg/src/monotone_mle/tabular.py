"""CSV ingestion, report emission and the bundled no-show dataset.

Two input layouts are accepted:

* aggregate -- ``level,total,successes[,order]``; expands to 0/1 observations.
* long -- ``level,value[,order]``; one observation per row.

A header row is recognized when its numeric columns do not parse as numbers.
Without an ``order`` column, levels keep file order; rows of one level must be
contiguous and numeric labels must not decrease.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from importlib import resources
from typing import IO

from .errors import FormatError, StructuralError
from .families import FamilySpec
from .fit import MonotoneEstimate, log_likelihood
from .table import ObservationTable, is_integral

DATASET = "sat_r_no_show.csv"


class Format(enum.Enum):
    AGGREGATE = "aggregate"
    LONG = "long"


def _number(text: str) -> float | None:
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def _rows(stream: IO[str], width: int) -> list[tuple[int, list[str]]]:
    rows = []
    for lineno, row in enumerate(csv.reader(stream), start=1):
        row = [c.strip() for c in row]
        if not row or all(not c for c in row):
            continue
        if len(row) not in (width, width + 1):
            raise FormatError(
                f"line {lineno}: expected {width} or {width + 1} fields, got {len(row)}"
            )
        rows.append((lineno, row))
    if rows and any(_number(c) is None for c in rows[0][1][1:]):
        rows = rows[1:]
    if not rows:
        raise StructuralError("input has no data rows")
    return rows


def _group(rows: list[tuple[int, str, object, int | None]]) -> tuple[list[str], list[list]]:
    """Group ``(lineno, label, payload, order)`` rows into ordered levels."""
    has_order = [r[3] is not None for r in rows]
    if any(has_order) and not all(has_order):
        raise FormatError("order column must be present on every row or none")
    labels: list[str] = []
    groups: list[list] = []
    if all(has_order):
        by_order: dict[int, tuple[str, list]] = {}
        owner: dict[str, int] = {}
        for lineno, label, payload, order in rows:
            if owner.setdefault(label, order) != order:
                raise FormatError(f"line {lineno}: level {label!r} given two order values")
            slot = by_order.setdefault(order, (label, []))
            if slot[0] != label:
                raise FormatError(f"line {lineno}: order {order} shared by {slot[0]!r} and {label!r}")
            slot[1].append(payload)
        for order in sorted(by_order):
            labels.append(by_order[order][0])
            groups.append(by_order[order][1])
        return labels, groups

    seen: set[str] = set()
    prev_numeric = None
    for lineno, label, payload, _ in rows:
        if labels and label == labels[-1]:
            groups[-1].append(payload)
            continue
        if label in seen:
            raise FormatError(f"line {lineno}: level {label!r} is not contiguous")
        x = _number(label)
        if x is not None:
            if prev_numeric is not None and x < prev_numeric:
                raise FormatError(f"line {lineno}: level {label!r} is out of order")
            prev_numeric = x
        seen.add(label)
        labels.append(label)
        groups.append([payload])
    return labels, groups


def _order(lineno: int, row: list[str], width: int) -> int | None:
    if len(row) == width:
        return None
    v = _number(row[width])
    if v is None or not is_integral(v):
        raise FormatError(f"line {lineno}: order {row[width]!r} is not an integer")
    return int(round(v))


def parse_table(stream: IO[str] | str, format: Format | str = Format.AGGREGATE) -> ObservationTable:
    """Read an ``ObservationTable`` from CSV text or a text stream."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    fmt = Format(format)
    width = 3 if fmt is Format.AGGREGATE else 2
    parsed = []
    for lineno, row in _rows(stream, width):
        label = row[0]
        if fmt is Format.AGGREGATE:
            total, ones = _number(row[1]), _number(row[2])
            if total is None or ones is None or not (is_integral(total) and is_integral(ones)):
                raise FormatError(f"line {lineno}: total and successes must be integers")
            total, ones = int(round(total)), int(round(ones))
            if total < 1:
                raise StructuralError(f"line {lineno}: total {total} < 1")
            if not 0 <= ones <= total:
                raise FormatError(f"line {lineno}: {ones} successes out of {total}")
            payload = (total, ones)
        else:
            value = _number(row[1])
            if value is None:
                raise FormatError(f"line {lineno}: value {row[1]!r} is not a finite number")
            payload = value
        parsed.append((lineno, label, payload, _order(lineno, row, width)))

    labels, groups = _group(parsed)
    if fmt is Format.AGGREGATE:
        for label, g in zip(labels, groups):
            if len(g) > 1:
                raise FormatError(f"level {label!r} appears in {len(g)} aggregate rows")
        return ObservationTable.from_counts(
            [g[0][0] for g in groups], [g[0][1] for g in groups], labels
        )
    return ObservationTable(groups, labels)


def write_long(table: ObservationTable, sink: IO[str]) -> None:
    """Write ``table`` as long CSV with an order column; ``parse_table`` reads it back exactly."""
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["level", "value", "order"])
    for i, (label, level) in enumerate(zip(table.labels, table.levels)):
        for x in level:
            w.writerow([label, repr(x), i])


def load_dataset() -> ObservationTable:
    """The bundled SAT-R no-show counts: 35 levels, 152 students, 26 no-shows."""
    text = resources.files("monotone_mle.data").joinpath(DATASET).read_text("utf-8")
    return parse_table(text, Format.AGGREGATE)


# ---------------------------------------------------------------------- #
# Reports
# ---------------------------------------------------------------------- #


def _g17(x: float) -> str:
    return f"{x:.17g}"


def _num(x) -> str:
    if isinstance(x, int):
        return str(x)
    return str(int(x)) if float(x).is_integer() and abs(x) < 2**53 else _g17(x)


def _check(estimate: MonotoneEstimate, table: ObservationTable) -> None:
    if estimate.m != table.m:
        raise StructuralError(f"estimate covers {estimate.m} levels, table has {table.m}")
    for b in estimate.blocks:
        if sum(table.counts[b.first : b.last + 1]) != b.count:
            raise StructuralError(f"block {b.first}..{b.last} count does not match the table")


def fit_record(
    estimate: MonotoneEstimate, table: ObservationTable, family: FamilySpec | None = None
) -> dict:
    _check(estimate, table)
    n = table.total_count
    total = math.fsum(table.flat())
    return {
        "direction": estimate.direction.value,
        "levels": table.m,
        "blocks": [
            {
                "first": table.labels[b.first],
                "last": table.labels[b.last],
                "count": b.count,
                "sum": b.total,
                "value": b.value,
            }
            for b in estimate.blocks
        ],
        "phi": [float(v) for v in estimate.phi],
        "labels": list(table.labels),
        "total": {"count": n, "sum": total, "mean": total / n},
        "family": None if family is None else str(family),
        "loglik": None if family is None else log_likelihood(family, estimate.phi, table),
    }


def emit_fit(
    estimate: MonotoneEstimate,
    table: ObservationTable,
    sink: IO[str],
    *,
    family: FamilySpec | None = None,
    emit: str = "blocks",
    as_json: bool = False,
) -> None:
    """Write a fit report.

    ``emit`` selects the body: ``blocks`` (one row per block plus totals),
    ``phi`` (one row per level) or ``plotdata`` (per level: observed mean and
    fitted value). ``as_json`` writes one JSON object instead.
    """
    record = fit_record(estimate, table, family)
    if as_json:
        if record["loglik"] == -math.inf:
            record["loglik"] = "-inf"
        json.dump(record, sink, indent=2)
        sink.write("\n")
        return
    w = csv.writer(sink, lineterminator="\n")
    if emit == "blocks":
        w.writerow(["direction", record["direction"]])
        w.writerow(["levels", table.m])
        w.writerow(["record", "first", "last", "count", "sum", "value", "value_rounded"])
        for b in record["blocks"]:
            w.writerow(
                ["block", b["first"], b["last"], b["count"], _num(b["sum"]),
                 _g17(b["value"]), f"{b['value']:.4f}"]
            )
        t = record["total"]
        w.writerow(
            ["total", table.labels[0], table.labels[-1], t["count"], _num(t["sum"]),
             _g17(t["mean"]), f"{t['mean']:.4f}"]
        )
        if family is not None:
            w.writerow(["loglik", record["family"], _g17(record["loglik"])])
    elif emit == "phi":
        w.writerow(["label", "phi"])
        for label, v in zip(table.labels, record["phi"]):
            w.writerow([label, _g17(v)])
    elif emit == "plotdata":
        emit_plotdata(estimate, table, sink)
    else:
        raise ValueError(f"unknown emit mode {emit!r}")


def emit_plotdata(estimate: MonotoneEstimate, table: ObservationTable, sink: IO[str]) -> None:
    """Per-level ``label,observed_mean,fitted_phi`` rows for plotting."""
    _check(estimate, table)
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["label", "observed_mean", "fitted_phi"])
    for label, mean, phi in zip(table.labels, table.level_means(), estimate.phi):
        w.writerow([label, _g17(mean), _g17(phi)])


def emit_report(summary: dict, sink: IO[str], *, as_json: bool = False) -> None:
    """Write a simulation summary as ``key,value`` lines or JSON."""
    if as_json:
        json.dump(summary, sink, indent=2)
        sink.write("\n")
        return
    w = csv.writer(sink, lineterminator="\n")
    for key, value in summary.items():
        if isinstance(value, float):
            value = _g17(value)
        elif isinstance(value, bool):
            value = str(value).lower()
        w.writerow([key, value])

