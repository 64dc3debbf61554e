"""Reading of the qkr CSV data files.

Files start with '# '-prefixed metadata lines, followed by one header row of
column names and comma-separated numeric rows.  Reading never modifies the
file.
"""

from __future__ import annotations

import numpy as np


class SchemaError(ValueError):
    """CSV file does not match the expected column schema."""


def read_table(path: str) -> tuple[list[str], dict[str, np.ndarray]]:
    meta: list[str] = []
    names: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                meta.append(line.lstrip("# "))
                continue
            if names is None:
                names = line.split(",")
                continue
            values = line.split(",")
            if len(values) != len(names):
                raise SchemaError(
                    f"{path}:{line_no}: expected {len(names)} columns, got {len(values)}"
                )
            try:
                rows.append([float(v) for v in values])
            except ValueError as err:
                raise SchemaError(f"{path}:{line_no}: non-numeric value ({err})") from err
    if not meta:
        raise SchemaError(f"{path}: missing '#' metadata header")
    if names is None or not rows:
        raise SchemaError(f"{path}: no data rows found")
    table = np.asarray(rows)
    return meta, {name: table[:, i] for i, name in enumerate(names)}


def require_columns(path: str, data: dict[str, np.ndarray], required: tuple[str, ...]) -> None:
    missing = [name for name in required if name not in data]
    if missing:
        raise SchemaError(
            f"{path}: missing required column(s) {', '.join(missing)}; "
            f"found {', '.join(data)}"
        )
