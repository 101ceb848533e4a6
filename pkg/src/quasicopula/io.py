"""Grid JSON, CSV emitters and result serialisation.

Grid JSON::

    {"x": ["0", "1/2", "1"], "y": [...], "values": [[...], ...]}

with exactly one of ``"values"`` or ``"mass"``; rows run bottom (``y = 0``)
to top, every number is a string ``"p"`` or ``"p/q"``.  Any other key, a
bare JSON number or a decimal string is rejected.

Output is deterministic: fixed key order, two-space indent, LF endings.
Decimals (continuous-layer quantities only) carry 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import BadRational, MalformedJson
from .grid import GridFunction, Mesh, grid_from_mass, grid_from_values

__all__ = [
    "parse_rational",
    "format_rational",
    "format_decimal",
    "grid_to_json",
    "grid_from_json",
    "parse_grid",
    "dumps",
    "write_text_atomic",
    "write_json",
    "emit_csv",
    "csv_text",
    "mass_rows",
]

_RATIONAL = re.compile(r"^-?[0-9]+(/[0-9]+)?$")


def parse_rational(s: Any) -> Fraction:
    if not isinstance(s, str) or not _RATIONAL.match(s):
        raise BadRational(f"not a rational string: {s!r}")
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise BadRational(f"zero denominator in {s!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q: Fraction | int) -> str:
    return str(Fraction(q))


def format_decimal(v: float) -> str:
    return format(float(v), ".12g")


def grid_to_json(G: GridFunction, form: str = "values") -> dict:
    if form == "values":
        rows = G.values
    elif form == "mass":
        rows = G.mass()
    else:
        raise ValueError(f"unknown grid form {form!r}")
    return {
        "x": [format_rational(x) for x in G.mesh.xs],
        "y": [format_rational(y) for y in G.mesh.ys],
        form: [[format_rational(v) for v in row] for row in rows],
    }


def _rational_list(obj, what: str) -> list[Fraction]:
    if not isinstance(obj, list):
        raise MalformedJson(f'"{what}" must be an array')
    return [parse_rational(v) for v in obj]


def grid_from_json(obj: Any) -> GridFunction:
    if not isinstance(obj, dict):
        raise MalformedJson("grid must be a JSON object")
    keys = set(obj)
    forms = keys & {"values", "mass"}
    if len(forms) != 1:
        raise MalformedJson('exactly one of "values" or "mass" is required')
    extra = keys - {"x", "y", "values", "mass"}
    if extra or not {"x", "y"} <= keys:
        raise MalformedJson(f"grid keys must be x, y and values|mass; got {sorted(keys)}")
    xs = _rational_list(obj["x"], "x")
    ys = _rational_list(obj["y"], "y")
    mesh = Mesh(tuple(xs), tuple(ys))  # raises MeshError subclasses
    form = forms.pop()
    rows = obj[form]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedJson(f'"{form}" must be an array of arrays')
    matrix = [[parse_rational(v) for v in r] for r in rows]
    if form == "values":
        return grid_from_values(mesh, matrix)
    return grid_from_mass(mesh, matrix)


def parse_grid(path: str | os.PathLike) -> GridFunction:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedJson(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"{path}: {exc}") from exc
    return grid_from_json(obj)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | os.PathLike, obj: Any) -> None:
    write_text_atomic(path, dumps(obj))


def _cell(v: Any) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_decimal(v)
    return str(v)


def csv_text(rows: Iterable[Sequence[Any]], schema: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(schema)
    for row in rows:
        row = list(row)
        if len(row) != len(schema):
            raise ValueError(f"row of length {len(row)} does not match schema {list(schema)}")
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def emit_csv(rows: Iterable[Sequence[Any]], schema: Sequence[str], path: str | os.PathLike) -> None:
    """RFC 4180 CSV with a header row; Fractions as ``p/q``, floats to 12 digits."""
    write_text_atomic(path, csv_text(rows, schema))


MASS_SCHEMA = ("i", "j", "x_lo", "x_hi", "y_lo", "y_hi", "mass")


def mass_rows(G: GridFunction) -> list[tuple]:
    """One row per cell, bottom row first, for heatmap-style exports."""
    m = G.mass()
    xs, ys = G.mesh.xs, G.mesh.ys
    return [
        (i, j, xs[i], xs[i + 1], ys[j], ys[j + 1], m[j, i])
        for j in range(G.mesh.ny)
        for i in range(G.mesh.nx)
    ]
