"""Result tables and their on-disk formats."""
from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class ResultTable:
    """Rectangular numeric table.

    ``provenance`` maps a column name to the formula that produced it.
    A ``None`` cell marks a quantity that does not exist for that row
    (sqrt(Z) at T = 0) and is written as an empty field.
    """

    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.rows = [self._check_row(r) for r in self.rows]

    def _check_row(self, row) -> tuple:
        row = tuple(row)
        if len(row) != len(self.columns):
            raise ValueError(
                f"{self.name}: row has {len(row)} cells, table has {len(self.columns)} columns")
        out = []
        for cell in row:
            if cell is None:
                out.append(None)
            elif isinstance(cell, (bool, np.bool_)):
                raise TypeError(f"{self.name}: boolean cell")
            elif isinstance(cell, (int, np.integer)):
                out.append(int(cell))
            else:
                value = float(cell)
                if not math.isfinite(value):
                    raise ValueError(f"{self.name}: non-finite cell {value!r}")
                out.append(value)
        return tuple(out)

    def append(self, *row) -> None:
        self.rows.append(self._check_row(row))

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]


def format_cell(cell) -> str:
    # repr(float) is the shortest string that round-trips
    if cell is None:
        return ""
    if isinstance(cell, int):
        return str(cell)
    return repr(float(cell))


def to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(format_cell(c) for c in row) + "\n")
    return buf.getvalue()


def to_report(table: ResultTable) -> str:
    lines = [f"# {table.name}", ""]
    if table.provenance:
        lines.append("provenance:")
        for col in table.columns:
            if col in table.provenance:
                lines.append(f"  {col}: {table.provenance[col]}")
        lines.append("")
    cells = [list(table.columns)] + [[format_cell(c) for c in r] for r in table.rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(table.columns))]
    for r in cells:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit(table: ResultTable, out_dir, fmt: str = "csv") -> Path:
    """Write ``table`` to ``out_dir/<name>.csv`` or ``<name>.txt``.

    Raises ``OSError`` (with the offending path) when the directory
    cannot be created or written.
    """
    if fmt not in ("csv", "report"):
        raise ValueError(f"unknown format {fmt!r}")
    out_dir = Path(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    if fmt == "csv":
        path = out_dir / f"{table.name}.csv"
        _write(path, to_csv(table))
    else:
        path = out_dir / f"{table.name}.txt"
        _write(path, to_report(table))
    return path


def write_meta(meta: dict, out_dir) -> Path:
    path = Path(out_dir) / "run_meta.json"
    _write(path, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path
