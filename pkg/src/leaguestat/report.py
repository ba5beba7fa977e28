"""Deterministic JSON/CSV emission for analysis results."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np

from .dataset import MatchRecord, TeamId

SCHEMA_VERSION = 1


def to_plain(obj):
    """Recursively convert results into JSON-compatible builtins."""
    if isinstance(obj, TeamId):
        return obj.name
    if isinstance(obj, MatchRecord):
        return {
            "season": obj.season,
            "match_day": obj.match_day,
            "home": obj.home.name,
            "away": obj.away.name,
            "goals_home": obj.goals_home,
            "goals_away": obj.goals_away,
            "tier": obj.tier,
        }
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(to_plain(k)): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _encode(value, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        text = format(value, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(value, (int, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{json.dumps(k, ensure_ascii=False)}: {_encode(value[k], indent, level + 1)}" for k in sorted(value)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in value) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in value) + end + "]"
    raise TypeError(f"cannot encode {type(value).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON with sorted keys and floats written to 17 significant digits."""
    return _encode(to_plain(obj), indent, 0) + "\n"


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    v = to_plain(v)
    if isinstance(v, float):
        return "" if not math.isfinite(v) else format(v, ".17g")
    return v


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
