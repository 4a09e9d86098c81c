"""Deterministic text output: 17 significant digits, LF endings.

Byte-identical output across runs and thread counts is a hard requirement,
so every float goes through fmt17 and JSON is emitted by a small recursive
writer (json.dumps formats floats with repr, which we do not control).
Key order is the caller's insertion order, never hash order.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

__all__ = ["fmt17", "write_csv", "write_json", "json17"]


def fmt17(x) -> str:
    """Shortest fixed-width decimal that round-trips a double."""
    return format(float(x), ".17g")


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt17(v)
    return str(v)


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable], comments: Mapping | None = None) -> None:
    """CSV with '# key=value' comment lines echoing the run configuration."""
    lines = []
    if comments:
        for k, v in comments.items():
            lines.append(f"# {k}={_scalar(v)}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_scalar(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _json_str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _emit(obj, indent: int) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            raise ValueError(f"non-finite value in JSON payload: {obj!r}")
        return fmt17(obj)
    if isinstance(obj, str):
        return _json_str(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        inner = "  " * (indent + 1)
        parts = [
            f"{inner}{_json_str(str(k))}: {_emit(v, indent + 1)}" for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        inner = "  " * (indent + 1)
        parts = [f"{inner}{_emit(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    # numpy scalars and anything float-like
    if hasattr(obj, "item"):
        return _emit(obj.item(), indent)
    raise TypeError(f"not serializable: {type(obj)!r}")


def json17(obj) -> str:
    """JSON text with every float at 17 significant digits."""
    return _emit(obj, 0)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json17(obj) + "\n")
