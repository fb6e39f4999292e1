"""Plot-ready output tables: CSV with a commented metadata header, or JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

FORMAT_VERSION = "qidiode-table/1"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return "auto"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


@dataclass
class OutputTable:
    columns: list[str]
    data: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.data.shape[1] != len(self.columns):
            raise ValueError(
                f"table has {self.data.shape[1]} columns but {len(self.columns)} names")

    def __len__(self) -> int:
        return self.data.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def to_csv(self) -> str:
        lines = [f"# format = {FORMAT_VERSION}"]
        for key, value in self.metadata.items():
            if isinstance(value, dict):
                for sub, inner in value.items():
                    lines.append(f"# {key}.{sub} = {_fmt(inner)}")
            else:
                lines.append(f"# {key} = {_fmt(value)}")
        lines.append(",".join(self.columns))
        for row in self.data:
            lines.append(",".join(format(float(x), ".17g") for x in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "format": FORMAT_VERSION,
            "metadata": _jsonable(self.metadata),
            "columns": {name: self.data[:, i].tolist() for i, name in enumerate(self.columns)},
        }
        return json.dumps(doc, indent=1) + "\n"


def read_csv(text: str) -> OutputTable:
    """Inverse of :meth:`OutputTable.to_csv`; metadata values stay strings."""
    metadata: dict[str, Any] = {}
    rows = []
    columns = None
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            metadata[key.strip()] = value.strip()
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(x) for x in line.split(",")])
    if columns is None:
        raise ValueError("no header row")
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return OutputTable(columns=columns, data=data, metadata=metadata)
