"""Deterministic report rendering as JSON, CSV or aligned text.

Every report has the same shape: the operation name, the inputs as given,
one row per item (``per_item``, columns in the fixed order ``columns``),
a ``summary`` mapping and the ``tolerances`` used.  Floats are always
written with 17 significant digits so that they parse back to the same
double.  Complex numbers are split into ``<name>_re`` / ``<name>_im``
columns by :func:`complex_fields`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

FORMATS = ("text", "json", "csv")


def fmt_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v + 0.0, ".17g")


def complex_fields(name: str, z) -> dict:
    z = complex(z)
    return {f"{name}_re": z.real, f"{name}_im": z.imag}


def _plain(v):
    if isinstance(v, (Fraction,)):
        return float(v)
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    if isinstance(v, list):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):  # numpy scalars
        return _plain(v.item())
    return v


def _json(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        s = fmt_float(v)
        # non-finite values are not JSON numbers
        return json.dumps(s) if s in ("nan", "inf", "-inf") else s
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, list):
        return "[" + ", ".join(_json(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, list):
        return ";".join(_cell(x) for x in v)
    if isinstance(v, dict):
        return _json(v)
    return str(v)


@dataclass
class Report:
    op: str
    inputs: dict
    per_item: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    columns: list[str] | None = None

    def __post_init__(self):
        self.inputs = _plain(self.inputs)
        self.per_item = [_plain(r) for r in self.per_item]
        self.summary = _plain(self.summary)
        self.tolerances = _plain(self.tolerances)
        if self.columns is None:
            cols: list[str] = []
            for row in self.per_item:
                cols.extend(k for k in row if k not in cols)
            self.columns = cols

    def as_dict(self) -> dict:
        return {"op": self.op, "inputs": self.inputs, "columns": list(self.columns),
                "per_item": [{c: row.get(c) for c in self.columns} for row in self.per_item],
                "summary": self.summary, "tolerances": self.tolerances}

    def to_json(self) -> str:
        return _json(self.as_dict()) + "\n"

    def to_csv(self) -> str:
        """Header row then one row per item.  Without items, one ``key,value`` row per summary entry."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.per_item:
            w.writerow(self.columns)
            for row in self.per_item:
                w.writerow([_cell(row.get(c)) for c in self.columns])
        else:
            w.writerow(["key", "value"])
            for k, v in self.summary.items():
                w.writerow([k, _cell(v)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.op}"]
        lines += [f"  {k}: {_cell(v)}" for k, v in self.inputs.items()]
        if self.per_item:
            table = [list(self.columns)] + [[_cell(r.get(c)) for c in self.columns]
                                            for r in self.per_item]
            widths = [max(len(row[i]) for row in table) for i in range(len(self.columns))]
            for row in table:
                lines.append("  ".join(cell.rjust(wd) for cell, wd in zip(row, widths)).rstrip())
        lines += [f"{k}: {_cell(v)}" for k, v in self.summary.items()]
        if self.tolerances:
            lines.append("tolerances: " + ", ".join(f"{k}={_cell(v)}" for k, v in
                                                    self.tolerances.items()))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str = "text") -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "text":
            return self.to_text()
        raise ValueError(f"unknown format {fmt!r}")


def render_error(record: dict, fmt: str = "text") -> str:
    record = _plain(record)
    if fmt == "json":
        return _json({"error": record}) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(record))
        w.writerow([_cell(v) for v in record.values()])
        return buf.getvalue()
    extra = ", ".join(f"{k}={_cell(v)}" for k, v in record.items() if k not in ("error", "message"))
    return f"error: {record['error']}: {record['message']}" + (f" ({extra})" if extra else "") + "\n"
