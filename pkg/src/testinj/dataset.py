"""Named binary-column dataset shared by labeling, CI testing and discovery."""

from __future__ import annotations

import csv

import numpy as np

__all__ = ["BinaryDataset", "DatasetError"]


class DatasetError(ValueError):
    """Raised for malformed dataset contents or files."""


class BinaryDataset:
    """An (n rows) x (k named columns) matrix of 0/1 values."""

    def __init__(self, columns, values):
        columns = tuple(columns)
        if len(set(columns)) != len(columns):
            raise DatasetError("duplicate column names")
        values = np.asarray(values, dtype=np.uint8)
        if values.ndim != 2 or values.shape[1] != len(columns):
            raise DatasetError(f"values shape {values.shape} does not match {len(columns)} columns")
        if values.shape[0] < 1:
            raise DatasetError("dataset needs at least one row")
        if values.size and values.max() > 1:
            raise DatasetError("dataset cells must be 0 or 1")
        self.columns = columns
        self.values = values
        self.values.setflags(write=False)
        self._col_index = {name: i for i, name in enumerate(columns)}

    @classmethod
    def from_columns(cls, columns: dict) -> "BinaryDataset":
        names = tuple(columns)
        return cls(names, np.column_stack([np.asarray(columns[c]) for c in names]))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self._col_index[name]]
        except KeyError:
            raise DatasetError(f"unknown column {name!r}")

    def select(self, names) -> "BinaryDataset":
        return BinaryDataset(tuple(names), np.column_stack([self.column(n) for n in names]))

    def __eq__(self, other):
        return (
            isinstance(other, BinaryDataset)
            and self.columns == other.columns
            and np.array_equal(self.values, other.values)
        )

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.values:
                writer.writerow([int(v) for v in row])

    @classmethod
    def read_csv(cls, path) -> "BinaryDataset":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DatasetError(f"{path}: empty file")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise DatasetError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
                try:
                    cells = [int(c) for c in row]
                except ValueError:
                    raise DatasetError(f"{path}:{lineno}: non-integer cell")
                if any(c not in (0, 1) for c in cells):
                    raise DatasetError(f"{path}:{lineno}: cells must be 0 or 1")
                rows.append(cells)
        if not rows:
            raise DatasetError(f"{path}: no data rows")
        return cls(tuple(h.strip() for h in header), np.array(rows, dtype=np.uint8))
