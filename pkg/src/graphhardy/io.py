"""Bit-stable CSV/JSON output and weight-file input."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from typing import Iterable, Mapping, Sequence

from .errors import InputError
from .graph import _vertex


def format_float(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def format_vertex(x) -> str:
    return ",".join(str(c) for c in x) if isinstance(x, tuple) else str(x)


def parse_vertex(s: str):
    s = s.strip().strip("()")
    parts = [p for p in s.replace(";", ",").split(",") if p.strip()]
    if not parts:
        raise InputError("empty vertex id")
    try:
        vals = [int(p) for p in parts]
    except ValueError as exc:
        raise InputError(f"vertex ids must be integers or integer tuples, got {s!r}") from exc
    return vals[0] if len(vals) == 1 else _vertex(tuple(vals))


def config_hash(config: Mapping) -> str:
    blob = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, float):
        return format_float(obj) if not math.isfinite(obj) else obj
    return obj


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, tuple):
        return format_vertex(v)
    if v is None:
        return ""
    return str(v)


def render_csv(header: Sequence[str], rows: Iterable[Sequence], config: Mapping) -> str:
    """CSV text: a provenance comment, the header, then one line per row."""
    buf = io.StringIO()
    buf.write(f"# graphhardy command={config.get('command', '')} config-sha256={config_hash(config)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render_json(payload: Mapping, config: Mapping) -> str:
    doc = {"provenance": {"command": config.get("command", ""), "config_sha256": config_hash(config)}}
    doc.update(_plain(payload))
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def table_payload(header, rows) -> dict:
    return {"columns": list(header),
            "rows": [[format_vertex(v) if isinstance(v, tuple) else v for v in row] for row in rows]}


def read_weight_csv(path, nonnegative: bool = True) -> dict:
    """``vertex,value`` table; ``#`` lines and a header row are skipped."""
    out = {}
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines)
    for i, row in enumerate(reader):
        if len(row) < 2:
            raise InputError(f"{path}: row {i + 1} needs a vertex and a weight")
        if i == 0 and row[0].strip().lower() == "vertex":
            continue
        try:
            w = float(row[-1])
        except ValueError as exc:
            raise InputError(f"{path}: bad weight {row[-1]!r}") from exc
        if not math.isfinite(w) or (nonnegative and w < 0):
            raise InputError(f"{path}: values must be finite" + (" and nonnegative" if nonnegative else ""))
        out[parse_vertex(",".join(row[:-1]))] = w
    return out
