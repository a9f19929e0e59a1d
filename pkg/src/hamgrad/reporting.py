"""Byte-deterministic JSON and CSV emission.

JSON: sorted keys, two-space indent, non-finite floats rendered as the
strings "inf", "-inf", "nan".  CSV: fixed column order, floats with 17
significant digits, vector cells joined with ';'.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
import os
from pathlib import Path

import numpy as np

OUTPUT_DIR_ENV = "HAMGRAD_OUTPUT_DIR"


def resolve_path(path) -> Path:
    """Relative paths are placed under $HAMGRAD_OUTPUT_DIR when it is set."""
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "as_dict"):
            return to_jsonable(obj.as_dict())
        return to_jsonable(dataclasses.asdict(obj))
    if hasattr(obj, "summary") and callable(obj.summary):
        return to_jsonable(obj.summary())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def json_text(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _cell(v):
    if isinstance(v, (np.ndarray, list, tuple)):
        return ";".join(_cell(x) for x in np.ravel(v))
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def emit_report(report, path=None, fmt="json", header=None, rows=None):
    """Write ``report`` as JSON, or ``rows`` under ``header`` as CSV.

    ``path=None`` returns the text instead of writing it.
    """
    if fmt == "json":
        text = json_text(report)
    elif fmt == "csv":
        if header is None or rows is None:
            raise ValueError("csv output needs header and rows")
        text = csv_text(header, rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None:
        return text
    p = resolve_path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
