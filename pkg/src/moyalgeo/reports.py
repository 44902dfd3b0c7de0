"""Result records and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

FLOAT_FMT = "{:.12g}"


@dataclass
class DistanceReport:
    """A distance-like quantity with the evidence behind it.

    ``value`` is the preferred number (the analytic one when available).
    ``analytic`` and ``operator`` hold the two independent routes; ``residual``
    is their gap, or the truncation residual when only one route exists.
    """

    quantity: str
    value: float
    method: str                         # analytic | operator-evaluation | solver
    truncation: int | None = None
    analytic: float | None = None
    operator: float | None = None
    residual: float | None = None
    converged: bool = True
    per_truncation: list[tuple[int, float]] = field(default_factory=list)
    extras: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_truncation"] = [list(p) for p in self.per_truncation]
        return _jsonable(d)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def fmt(x) -> str:
    """Fixed 12-significant-digit rendering used for byte-stable CSV output."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if v == 0:
            return "0"
        return FLOAT_FMT.format(v)
    if isinstance(x, complex):
        return fmt(x.real) if x.imag == 0 else f"{fmt(x.real)}{x.imag:+.12g}j"
    return str(x)


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def rows_to_json(rows: Sequence[dict], **meta) -> str:
    return json.dumps(_jsonable({**meta, "rows": list(rows)}), indent=2, sort_keys=True) + "\n"


def read_csv_rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def report_row(report: DistanceReport, **labels) -> dict:
    """Flatten a report into one CSV row."""
    row = dict(labels)
    row.update(quantity=report.quantity, value=report.value, method=report.method,
               N=report.truncation, analytic=report.analytic, operator=report.operator,
               residual=report.residual, converged=report.converged)
    return row


REPORT_COLUMNS = ["quantity", "value", "method", "N", "analytic", "operator", "residual",
                  "converged"]


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
