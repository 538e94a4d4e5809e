"""Matrix files and line-delimited reports.

Canonical serialization writes every float with 17 significant digits, so a
value read back compares bitwise equal. Non-finite floats become the strings
``"inf"``, ``"-inf"`` and ``"nan"``.
"""
from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .hermitian import as_hermitian

__all__ = [
    "dumps_canonical",
    "fmt_float",
    "matrix_to_rows",
    "rows_to_matrix",
    "write_matrix",
    "read_matrix",
    "check_line",
    "write_csv",
    "REPORT_KEYS",
]

REPORT_KEYS = (
    "inequality_id",
    "params",
    "dim",
    "family",
    "seed_path",
    "ordinal",
    "lhs",
    "rhs",
    "gap",
    "rel_gap",
    "verdict",
    "diagnostics",
    "note",
    "payload",
)


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _parse_float(v) -> float:
    # "inf", "-inf" and "nan" arrive as strings; float() takes both forms
    return float(v)


def dumps_canonical(obj) -> str:
    """JSON text with 17-significant-digit floats.

    Dict keys keep insertion order, except keys of nested plain dicts
    (params, diagnostics), which are sorted.
    """
    return _dump(obj, top=True)


def _dump(obj, top=False) -> str:
    if isinstance(obj, enum.Enum):
        obj = obj.value
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = obj.items() if top else sorted(obj.items(), key=lambda kv: str(kv[0]))
        return "{" + ",".join(f"{json.dumps(str(k))}:{_dump(v, top=top and False)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_to_rows(a) -> list:
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return [[[float(z.real), float(z.imag)] for z in row] for row in a]
    return [[float(x) for x in row] for row in a]


def rows_to_matrix(rows) -> np.ndarray:
    arr = []
    for row in rows:
        out = []
        for e in row:
            if isinstance(e, (list, tuple)):
                if len(e) != 2:
                    raise ValueError("complex entries must be [re, im] pairs")
                out.append(complex(_parse_float(e[0]), _parse_float(e[1])))
            else:
                out.append(complex(_parse_float(e), 0.0))
        arr.append(out)
    n = len(arr)
    if n == 0 or any(len(r) != n for r in arr):
        raise DimensionMismatch("matrix rows must form a non-empty square array")
    return np.array(arr, dtype=np.complex128)


def write_matrix(path, a, field: str | None = None) -> None:
    a = np.asarray(a)
    if field is None:
        field = "complex" if np.iscomplexobj(a) and np.any(a.imag != 0) else "real"
    rows = matrix_to_rows(a.astype(np.complex128) if field == "complex" else a.real)
    doc = {"dim": int(a.shape[0]), "field": field, "rows": rows}
    Path(path).write_text(dumps_canonical(doc) + "\n", encoding="utf-8")


def read_matrix(path, check: bool = True) -> np.ndarray:
    """Parse a matrix file into a symmetrized Hermitian array."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "rows" not in doc:
        raise ValueError(f"{path}: not a matrix document")
    field = doc.get("field", "real")
    if field not in ("real", "complex"):
        raise ValueError(f"{path}: unknown field {field!r}")
    m = rows_to_matrix(doc["rows"])
    if "dim" in doc and int(doc["dim"]) != m.shape[0]:
        raise DimensionMismatch(f"{path}: dim {doc['dim']} does not match {m.shape[0]} rows")
    return as_hermitian(m, check=check)


def check_line(record: dict) -> str:
    """One report line with the canonical key order."""
    ordered = {k: record[k] for k in REPORT_KEYS if k in record}
    return dumps_canonical(ordered)


def write_csv(path_or_handle, records) -> None:
    """Lossy flat export: params and diagnostics are flattened to ``key=value`` strings."""
    cols = ["inequality_id", "params", "dim", "family", "seed_path", "lhs", "rhs", "gap", "rel_gap", "verdict"]

    def flat(v):
        if isinstance(v, dict):
            return ";".join(f"{k}={v[k]}" for k in sorted(v))
        return v

    def emit(handle):
        w = csv.writer(handle, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            w.writerow([flat(r.get(c, "")) for c in cols])

    if hasattr(path_or_handle, "write"):
        emit(path_or_handle)
    else:
        with open(path_or_handle, "w", newline="", encoding="utf-8") as h:
            emit(h)
