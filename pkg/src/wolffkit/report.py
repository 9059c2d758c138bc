"""Canonical report serialization.

Byte-identical output for identical inputs: insertion-ordered objects,
floats printed with 17 significant digits, infinities as the string "inf"
(JSON has no literal for them), LF line endings.
"""

import json
import math


def format_float(x):
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    return format(x, ".17g")


def canon_dumps(obj, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{inner}{json.dumps(str(k))}: {canon_dumps(v, indent + 1)}"
                for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(
                format_float(v) if isinstance(v, float) else str(v)
                for v in seq) + "]"
        rows = [f"{inner}{canon_dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    # numpy scalars and arrays
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):
        return canon_dumps(obj.item(), indent)
    if hasattr(obj, "tolist"):
        return canon_dumps(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        fh.write(canon_dumps(obj))
        fh.write("\n")


def write_csv(path, rows, header=("radius", "value")):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                format(v, ".17g") if isinstance(v, float) else str(v)
                for v in row) + "\n")
