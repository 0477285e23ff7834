"""Machine-readable reports: JSON schema, deterministic JSON, flat CSV."""
from __future__ import annotations

import csv
import io
import json
import math

from . import __version__

SCHEMA_VERSION = "1"

_NUM = {"type": ["number", "null"]}

RESULT_SCHEMA = {
    "type": "object",
    "required": ["case", "params", "model", "function", "lhs", "rhs", "ratio", "constant",
                 "deficit", "margin", "error_estimates", "pass"],
    "properties": {
        "case": {"type": "string"},
        "params": {"type": "object"},
        "model": {"type": "string"},
        "function": {"type": "string"},
        "lhs": _NUM,
        "rhs": _NUM,
        "ratio": _NUM,
        "constant": _NUM,
        "deficit": _NUM,
        "margin": _NUM,
        "slack": _NUM,
        "error_estimates": {
            "type": "object",
            "required": ["lhs", "rhs"],
            "properties": {"lhs": _NUM, "rhs": _NUM},
        },
        "pass": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "schema_version", "command", "config", "results", "pass"],
    "properties": {
        "version": {"type": "string"},
        "schema_version": {"type": "string"},
        "command": {"type": "string", "enum": ["verify", "identity", "sharpness", "stability"]},
        "config": {"type": "object"},
        "results": {"type": "array", "items": RESULT_SCHEMA},
        "sweeps": {"type": "array", "items": {"type": "object"}},
        "pass": {"type": "boolean"},
    },
}

CSV_COLUMNS = ("case", "model", "function", "params", "lhs", "rhs", "ratio", "constant",
               "deficit", "margin", "slack", "lhs_error", "rhs_error", "pass", "notes")


def _fmt_float(x: float) -> str:
    return format(x, ".17g") if math.isfinite(x) else "null"


def _emit(obj, out: list):
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, k in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(k)) + ":")
            _emit(obj[k], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    elif hasattr(obj, "item"):  # numpy scalars
        _emit(obj.item(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, null for
    non-finite numbers."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out) + "\n"


def make_report(command: str, config: dict, results: list[dict], sweeps: list[dict] | None = None) -> dict:
    doc = {
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "results": results,
        "pass": all(r["pass"] for r in results) and all(s.get("pass", True) for s in sweeps or []),
    }
    if sweeps is not None:
        doc["sweeps"] = sweeps
    return doc


def validate_report(doc: dict) -> None:
    """Raise jsonschema.ValidationError if ``doc`` does not match the schema."""
    import jsonschema

    jsonschema.validate(json.loads(dumps(doc)), REPORT_SCHEMA)


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in doc["results"]:
        row = []
        for col in CSV_COLUMNS:
            if col == "params":
                v = dumps(r["params"]).strip()
            elif col in ("lhs_error", "rhs_error"):
                v = r["error_estimates"][col.split("_")[0]]
            elif col == "notes":
                v = " | ".join(r.get("notes", []))
            else:
                v = r.get(col)
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = "" if not math.isfinite(v) else format(v, ".17g")
            elif v is None:
                v = ""
            row.append(v)
        w.writerow(row)
    return buf.getvalue()
