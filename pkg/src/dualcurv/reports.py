"""Serialisation of reports: JSON with 17 significant digits and CSV tables."""
import csv
import io
import json
import math
from datetime import datetime, timezone

import numpy as np

from .exceptions import ConfigError

VERIFICATION_COLUMNS = ("body", "q", "k", "gamma", "ratio", "bound", "bound_kind", "margin", "pass")
SWEEP_COLUMNS = ("param", "q", "gamma", "ratio", "bound", "margin")
PLOT_COLUMNS = {
    "verification": ("body", "q", "k", "ratio", "bound", "margin"),
    "sweep": ("param", "q", "ratio", "bound", "margin"),
}


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return _json_str(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_str(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json_str(s):
    return json.dumps(s, ensure_ascii=False)


def dumps(obj, indent=2):
    """JSON text with every float written as ``%.17g`` (round-trips exactly)."""
    return _encode(obj, indent, 0)


def with_timestamp(doc, reproducible):
    """Add a UTC ``timestamp`` unless the output must be reproducible."""
    if reproducible:
        return doc
    out = dict(doc)
    out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return out


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def write_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def verification_csv(records):
    return write_csv(VERIFICATION_COLUMNS, (
        (r.body, r.q, r.k, r.gamma, r.ratio, r.bound, r.bound_kind, r.margin, r.passed) for r in records))


def sweep_csv(rows):
    return write_csv(SWEEP_COLUMNS, ((r.param, r.q, r.gamma, r.ratio, r.bound, r.margin) for r in rows))


def slice_profile_csv(profile, k):
    cols = tuple(f"x_{i + 1}" for i in range(k)) + ("g", "grad_dot", "boundary_flag")
    return write_csv(cols, profile.rows())


def _schema(report):
    from .bounds import SweepRow, VerificationRecord

    if isinstance(report, VerificationRecord):
        return "verification"
    if isinstance(report, SweepRow):
        return "sweep"
    raise ConfigError(f"no plot schema for {type(report).__name__}")


def emit_plot_data(reports):
    """CSV of ratio and bound against q, one row per report, sorted by q."""
    reports = list(reports)
    if not reports:
        raise ConfigError("no reports to emit")
    schemas = {_schema(r) for r in reports}
    if len(schemas) != 1:
        raise ConfigError(f"mixed report schemas: {sorted(schemas)}")
    schema = schemas.pop()
    cols = PLOT_COLUMNS[schema]
    ordered = sorted(reports, key=lambda r: r.q)
    if schema == "verification":
        rows = ((r.body, r.q, r.k, r.ratio, r.bound, r.margin) for r in ordered)
    else:
        rows = ((r.param, r.q, r.ratio, r.bound, r.margin) for r in ordered)
    return write_csv(cols, rows)
