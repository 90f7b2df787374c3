"""Graph files and result documents.

Graph file format::

    {"vertices": ["A", "B"], "edges": [{"id": "l1", "ends": ["A", "B"]}]}

Exact rationals are written as ``"num/den"`` strings (integers without a
denominator); floats are written with 17 significant digits, which always
round-trips.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import GraphFormatError
from .graph import Edge, Multigraph

SCHEMA = "resumkit.result/1"


def graph_from_dict(data: object) -> Multigraph:
    if not isinstance(data, dict) or not isinstance(data.get("vertices"), list) \
            or not isinstance(data.get("edges"), list):
        raise GraphFormatError("parse", "graph must be an object with 'vertices' and 'edges' lists")
    vertices = data["vertices"]
    if not all(isinstance(v, str) for v in vertices):
        raise GraphFormatError("parse", "vertex ids must be strings")
    seen: set[str] = set()
    for v in vertices:
        if v in seen:
            raise GraphFormatError("duplicate-label", f"duplicate vertex id {v!r}")
        seen.add(v)
    edges = []
    labels: set[str] = set()
    for item in data["edges"]:
        if not isinstance(item, dict) or not isinstance(item.get("id"), str):
            raise GraphFormatError("parse", f"edge entry {item!r} needs a string 'id'")
        ends = item.get("ends")
        if not isinstance(ends, list) or len(ends) != 2 or not all(isinstance(x, str) for x in ends):
            raise GraphFormatError("parse", f"edge {item['id']!r} needs 'ends' as two vertex ids")
        if item["id"] in labels:
            raise GraphFormatError("duplicate-label", f"duplicate edge id {item['id']!r}")
        labels.add(item["id"])
        for x in ends:
            if x not in seen:
                raise GraphFormatError("dangling-endpoint",
                                       f"edge {item['id']!r} refers to unknown vertex {x!r}")
        edges.append(Edge(item["id"], ends[0], ends[1]))
    return Multigraph(tuple(vertices), tuple(edges))


def bundled_fixture(name: str) -> Path | None:
    path = resources.files("resumkit.fixtures").joinpath(f"{name}.json")
    return Path(str(path)) if path.is_file() else None


def load_graph(path: str | Path) -> Multigraph:
    """Read and validate a graph file.  A missing path whose stem names a
    bundled fixture (``fixtures/g_eye.json``) resolves to that fixture."""
    p = Path(path)
    if not p.exists():
        fallback = bundled_fixture(p.stem)
        if fallback is None:
            raise GraphFormatError("parse", f"no such file: {path}")
        p = fallback
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise GraphFormatError("parse", f"{path}: invalid JSON ({exc})") from exc
    return graph_from_dict(data)


def rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def document(command: str, config: dict, result: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "config": config, "result": result}


def float_text(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x!r} cannot be serialized")
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(doc: dict) -> str:
    """JSON with indent 2; floats go through ``float_text`` via placeholders
    since the stdlib encoder offers no float formatting hook."""
    floats: list[float] = []

    def mark(obj):
        if isinstance(obj, bool) or obj is None:
            return obj
        if isinstance(obj, str) and "\x00" in obj:
            raise ValueError("NUL characters are not allowed in output strings")
        if isinstance(obj, float):
            floats.append(obj)
            return f"\x00{len(floats) - 1}\x00"
        if isinstance(obj, dict):
            return {mark(k): mark(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [mark(v) for v in obj]
        return obj

    text = json.dumps(mark(doc), indent=2)
    text = re.sub(r'"\\u0000(\d+)\\u0000"', lambda m: float_text(floats[int(m.group(1))]), text)
    return text + "\n"
