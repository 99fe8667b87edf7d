"""Result emission: schema-checked CSV plus a JSON mirror with metadata.

Floats are written with repr (shortest round-trip form), newline is fixed
to \\n, and column order is part of each experiment's schema, so a rerun
with the same config reproduces files bitwise.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

__all__ = ["emit_results", "read_csv_rows", "TOOL_VERSION"]

TOOL_VERSION = "0.1.0"


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_results(
    rows: list[dict],
    path,
    columns: list[str],
    fmt: str = "csv",
    metadata: dict | None = None,
):
    """Write rows in the declared column order.

    Every row must supply exactly the declared columns.  The json format
    mirrors the rows and adds a metadata object.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    for i, row in enumerate(rows):
        if set(row) != set(columns):
            extra = sorted(set(row) - set(columns))
            missing = sorted(set(columns) - set(row))
            raise ValueError(
                f"row {i} does not match schema (extra={extra}, missing={missing})"
            )
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_value(row[c]) for c in columns])
    elif fmt == "json":
        payload = {
            "metadata": metadata or {},
            "columns": columns,
            "rows": [{c: row[c] for c in columns} for row in rows],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_csv_rows(path) -> list[dict]:
    """Parse a CSV written by emit_results back into string-valued rows."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
