"""CSV access that preserves the source tokens.

Every plotted value is carried around as the exact string read from the
results CSV; floats are derived only at draw time. That keeps the series
dumps byte-identical to the input columns and guarantees the renderer never
recomputes physics.
"""

from __future__ import annotations

import csv
import os


class ResultsError(Exception):
    """A required results file is absent or malformed."""


class Table:
    """One results CSV held as raw string columns."""

    def __init__(self, path: str, header: list[str], columns: dict[str, list[str]]):
        self.path = path
        self.header = header
        self.columns = columns

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def column(self, name: str) -> list[str]:
        if name not in self.columns:
            raise ResultsError(f"{self.path}: missing column {name!r}")
        return self.columns[name]

    def rows_where(self, **filters: str) -> list[int]:
        idx = range(len(self))
        for name, value in filters.items():
            col = self.column(name)
            idx = [i for i in idx if col[i] == value]
        return list(idx)

    def distinct(self, name: str) -> list[str]:
        seen: dict[str, None] = {}
        for value in self.column(name):
            seen.setdefault(value)
        return list(seen)


def read_table(path: str) -> Table:
    if not os.path.exists(path):
        raise ResultsError(f"missing results file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ResultsError(f"empty results file: {path}") from None
        columns: dict[str, list[str]] = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise ResultsError(f"malformed row in {path}: {row!r}")
            for name, value in zip(header, row):
                columns[name].append(value)
    return Table(path, header, columns)


def dump_series(out_dir: str, figure: str, name: str, tokens: list[str]) -> str:
    """Write one plotted series verbatim, one source token per line."""
    os.makedirs(out_dir, exist_ok=True)
    safe = name.replace("/", "-").replace(" ", "_")
    path = os.path.join(out_dir, f"{figure}__{safe}.txt")
    with open(path, "w") as fh:
        for token in tokens:
            fh.write(token)
            fh.write("\n")
    return path
