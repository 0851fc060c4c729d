"""Tabular dataset ingestion and per-feature statistics.

A Dataset is an immutable bundle of row ids, feature names, a float64 value
matrix and per-feature summary statistics. CSV input follows the common
RFC-4180 shape: UTF-8, first row is a header, '.' as the decimal separator.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np


class CsvParseError(ValueError):
    """Raised when a CSV payload cannot be turned into a Dataset."""


@dataclass(frozen=True)
class FeatureStats:
    """Summary statistics of one feature column. std is population std (ddof=0)."""

    mean: float
    std: float
    min: float
    max: float


def compute_stats(column) -> FeatureStats:
    """Compute FeatureStats for one column of at least two finite values."""
    col = np.asarray(column, dtype=np.float64)
    if col.ndim != 1:
        raise ValueError("column must be one-dimensional")
    if col.shape[0] < 2:
        raise ValueError("column needs at least 2 values")
    if not np.all(np.isfinite(col)):
        raise ValueError("column contains non-finite values")
    return FeatureStats(
        mean=float(np.mean(col)),
        std=float(np.std(col)),  # population convention, 0 iff constant
        min=float(np.min(col)),
        max=float(np.max(col)),
    )


@dataclass(frozen=True, eq=False)
class Dataset:
    ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    values: np.ndarray  # (n, d) float64, read-only
    stats: tuple[FeatureStats, ...]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def index_of(self, point_id: str) -> int:
        try:
            return self.ids.index(point_id)
        except ValueError:
            raise KeyError(f"unknown point id {point_id!r}") from None

    def row(self, point_id: str) -> np.ndarray:
        return self.values[self.index_of(point_id)].copy()

    def sigmas(self) -> np.ndarray:
        return np.array([s.std for s in self.stats])

    def to_csv(self, id_column: str = "id") -> bytes:
        """Serialize back to CSV. repr() keeps every float64 exact on re-parse."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([id_column, *self.feature_names])
        for pid, row in zip(self.ids, self.values):
            writer.writerow([pid, *[repr(float(v)) for v in row]])
        return out.getvalue().encode("utf-8")


def dataset_from_matrix(values, ids=None, feature_names=None) -> Dataset:
    """Build a Dataset from an in-memory matrix, recomputing all stats."""
    mat = np.array(values, dtype=np.float64, order="C")
    if mat.ndim != 2:
        raise ValueError("values must be a 2-d matrix")
    n, d = mat.shape
    if n < 2:
        raise ValueError("a dataset needs at least 2 rows")
    if d < 1:
        raise ValueError("a dataset needs at least 1 feature")
    if not np.all(np.isfinite(mat)):
        raise ValueError("values contain non-finite entries")
    if ids is None:
        ids = tuple(str(i) for i in range(n))
    else:
        ids = tuple(str(i) for i in ids)
    if len(ids) != n:
        raise ValueError("number of ids does not match number of rows")
    if len(set(ids)) != n:
        raise ValueError("ids must be unique")
    if feature_names is None:
        feature_names = tuple(f"f{j}" for j in range(d))
    else:
        feature_names = tuple(str(s) for s in feature_names)
    if len(feature_names) != d:
        raise ValueError("number of feature names does not match columns")
    if len(set(feature_names)) != d:
        raise ValueError("feature names must be unique")
    stats = tuple(compute_stats(mat[:, j]) for j in range(d))
    mat.flags.writeable = False
    return Dataset(ids=ids, feature_names=feature_names, values=mat, stats=stats)


def _parse_cell(text: str, row_no: int, col_name: str) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise CsvParseError(
            f"non-numeric cell at row {row_no}, column {col_name!r}: {text!r}"
        ) from None
    if not math.isfinite(value):
        raise CsvParseError(
            f"non-finite cell at row {row_no}, column {col_name!r}: {text!r}"
        )
    return value


def load_csv(data: bytes | str, id_column: str | None = None) -> Dataset:
    """Parse CSV bytes into a Dataset.

    Parameters
    ----------
    data : CSV payload, UTF-8 bytes or str. The first row must be a header.
    id_column : optional name of the column holding row ids. Without it rows
        are numbered "0", "1", ... in file order.

    Raises CsvParseError on an empty file, ragged rows, duplicate ids,
    duplicate feature names, or any cell that is not a finite number. Row
    numbers in messages are 1-based file rows (header is row 1).
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8-sig")
    else:
        text = data
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise CsvParseError("empty CSV: no header row")
    header = [h.strip() for h in rows[0]]
    if not header or all(h == "" for h in header):
        raise CsvParseError("empty CSV: blank header row")

    id_idx = None
    if id_column is not None:
        if id_column not in header:
            raise CsvParseError(f"id column {id_column!r} not found in header")
        id_idx = header.index(id_column)
    feature_names = tuple(h for i, h in enumerate(header) if i != id_idx)
    if len(feature_names) < 1:
        raise CsvParseError("no feature columns")
    if len(set(feature_names)) != len(feature_names):
        raise CsvParseError("duplicate feature names in header")

    ids: list[str] = []
    matrix: list[list[float]] = []
    for file_row, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvParseError(
                f"ragged row {file_row}: expected {len(header)} cells, got {len(row)}"
            )
        if id_idx is not None:
            ids.append(row[id_idx].strip())
        values = [
            _parse_cell(cell, file_row, header[i])
            for i, cell in enumerate(row)
            if i != id_idx
        ]
        matrix.append(values)

    if len(matrix) < 2:
        raise CsvParseError("a dataset needs at least 2 data rows")
    if id_idx is not None:
        seen: set[str] = set()
        for pid in ids:
            if pid in seen:
                raise CsvParseError(f"duplicate id {pid!r}")
            seen.add(pid)
    else:
        ids = [str(i) for i in range(len(matrix))]

    try:
        return dataset_from_matrix(matrix, ids=ids, feature_names=feature_names)
    except ValueError as exc:  # uniqueness or shape issues surface as parse errors
        raise CsvParseError(str(exc)) from None
