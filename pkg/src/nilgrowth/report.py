"""CSV and JSON report emission with stable formatting.

Exact quantities print as integers or "p/q"; floats (slope fits, interval
endpoints) print with 6 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

from .errors import UsageError


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return f"{v:.6g}"
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(to_jsonable(v), separators=(",", ":"))
    if v is None:
        return ""
    return str(v)


def to_jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_value(obj)
    if isinstance(obj, float):
        if math.isinf(obj) or math.isnan(obj):
            return format_value(obj)
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    return str(obj)


def render_csv(rows, columns=None, header=None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    for k, v in (header or {}).items():
        buf.write(f"# {k}: {format_value(v)}\n")
    if columns:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


def render_json(obj, header=None) -> str:
    data = to_jsonable(obj)
    if header:
        data = {"header": to_jsonable(header), **(data if isinstance(data, dict) else {"results": data})}
    return json.dumps(data, indent=2) + "\n"


def emit_report(results, fmt="json", path=None, columns=None, header=None) -> str:
    """Render results as CSV rows or a JSON document and optionally write them to path."""
    if fmt == "csv":
        rows = results if isinstance(results, list) else results.get("rows", [])
        text = render_csv(rows, columns, header)
    elif fmt == "json":
        text = render_json(results, header)
    else:
        raise UsageError(f"unknown format {fmt!r} (expected csv or json)")
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write report to {path}: {exc.strerror or exc}")
    return text
