"""Deterministic JSON output: sorted keys, 12-significant-digit floats.

Every artifact the package writes (scene files, planner results) goes
through ``dumps`` so reruns are byte-identical.
"""

import math


def format_float(x):
    """Render a float with 12 significant digits, '-0' folded to '0'."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise ValueError("non-finite float in JSON output: %r" % x)
        if x == 0.0:
            return "0"
        s = format(x, ".12g")
        if "e" in s:
            mant, exp = s.split("e")
            s = mant + "e" + str(int(exp))
        return s
    return str(x)


def canonical_float(x):
    """Round a float to its 12-significant-digit representation."""
    return float(format_float(float(x)))


def dumps(obj, indent=None, _level=0):
    """Serialize to JSON with sorted keys and fixed float formatting."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        out = ['"']
        for ch in obj:
            if ch == '"':
                out.append('\\"')
            elif ch == "\\":
                out.append("\\\\")
            elif ord(ch) < 0x20:
                out.append("\\u%04x" % ord(ch))
            else:
                out.append(ch)
        out.append('"')
        return "".join(out)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    nl, pad, pad_in = "", "", ""
    if indent is not None:
        nl = "\n"
        pad = " " * (indent * _level)
        pad_in = " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            items.append(
                dumps(key) + ": " + dumps(obj[key], indent, _level + 1)
            )
        return "{" + nl + pad_in + ("," + nl + pad_in).join(items) + nl + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = [dumps(v, indent, _level + 1) for v in obj]
        return "[" + nl + pad_in + ("," + nl + pad_in).join(items) + nl + pad + "]"
    raise TypeError("cannot serialize %r" % type(obj))
