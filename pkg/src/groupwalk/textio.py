"""Deterministic text output: CSV with config headers and 17-digit floats.

Identical configs must produce byte-identical files, so nothing here ever
touches wall-clock time or unordered containers.
"""

from __future__ import annotations

import math
from typing import Any

from . import __version__


def fmt(value: Any) -> str:
    """Render a scalar for CSV/JSON output; floats get 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if value is None:
        return "nan"
    return str(value)


def csv_text(header_cols: list[str], rows: list[tuple], config: dict, seed=None) -> str:
    """CSV document with '#' comment lines echoing the tool version and config."""
    lines = [f"# groupwalk {__version__}"]
    cfg = " ".join(f"{k}={fmt(v)}" for k, v in config.items())
    lines.append(f"# config: {cfg}" if cfg else "# config:")
    if seed is not None:
        lines.append(f"# seed: {seed}")
    lines.append(",".join(header_cols))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def json_text(obj: Any) -> str:
    """Compact JSON with 17-significant-digit floats (round-trip exact)."""
    out: list[str] = []
    _write_json(obj, out)
    out.append("\n")
    return "".join(out)


def _write_json(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            out.append("null")
        else:
            out.append(format(obj, ".17g"))
    elif isinstance(obj, str):
        out.append(_escape(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(_escape(str(k)))
            out.append(":")
            _write_json(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _write_json(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def _escape(text: str) -> str:
    body = (text.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t"))
    return f'"{body}"'
