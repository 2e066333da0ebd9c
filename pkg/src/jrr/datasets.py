"""Dataset ingestion and synthetic cohort generation.

Two on-disk formats are supported: "bit-lines" (one ASCII 0 or 1 per line)
and "csv-column" (a named binary column of a CSV file with a header row).
Real-dataset preparation lives in scripts/prepare_datasets.py; the harness
only consumes prepared files.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from jrr.errors import DatasetFormatError, ParameterError

FORMATS = ("bit-lines", "csv-column")


@dataclass(frozen=True)
class DatasetSummary:
    name: str
    n: int
    n1: int

    @property
    def ratio(self) -> float:
        return self.n1 / self.n


def load_dataset(path, format: str = "bit-lines", column: str | None = None) -> np.ndarray:
    """Load a binary cohort from disk, in file order.

    Args:
        path: file to read.
        format: "bit-lines" or "csv-column".
        column: column name, required for csv-column.

    Returns:
        int8 vector of 0/1 values.
    """
    path = Path(path)
    if format not in FORMATS:
        raise ParameterError(f"format must be one of {FORMATS}, got {format!r}")
    try:
        if format == "bit-lines":
            values = _load_bit_lines(path)
        else:
            if not column:
                raise ParameterError("csv-column format requires a column name")
            values = _load_csv_column(path, column)
    except OSError as exc:
        raise DatasetFormatError(f"{path}: {exc}") from exc
    if len(values) == 0:
        raise DatasetFormatError(f"{path}: empty dataset")
    return np.asarray(values, dtype=np.int8)


def _load_bit_lines(path: Path) -> list[int]:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip()
            if token not in ("0", "1"):
                raise DatasetFormatError(
                    f"{path}:{lineno}: expected '0' or '1', got {token!r}"
                )
            values.append(int(token))
    return values


def _load_csv_column(path: Path, column: str) -> list[int]:
    values = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise DatasetFormatError(f"{path}: no column named {column!r}")
        for lineno, row in enumerate(reader, start=2):
            token = (row[column] or "").strip()
            if token not in ("0", "1"):
                raise DatasetFormatError(
                    f"{path}:{lineno}: expected '0' or '1' in column "
                    f"{column!r}, got {token!r}"
                )
            values.append(int(token))
    return values


def summarize(values, name: str = "") -> DatasetSummary:
    values = np.asarray(values)
    return DatasetSummary(name=name, n=len(values), n1=int(np.sum(values == 1)))


def synthesize(n: int, n1: int, seed: int) -> np.ndarray:
    """Deterministic synthetic cohort with exactly n1 ones among n values."""
    if not 0 <= n1 <= n:
        raise ParameterError(f"n1 must lie in [0, n], got n1={n1}, n={n}")
    values = np.zeros(n, dtype=np.int8)
    values[:n1] = 1
    return np.random.default_rng(seed).permutation(values)
