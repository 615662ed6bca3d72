"""CSV ingestion and seeded subsampling."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distributions import Seed
from .errors import DataError, DomainError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DatasetRef:
    """A numeric column of a delimited text file.

    ``column`` is a header name, or a 0-based index (int, or digit string
    when the file has no header).
    """

    path: Path
    column: str | int = 0
    delimiter: str = ","
    has_header: bool = True


def _resolve_column(header: list[str] | None, column: str | int, path: Path) -> int:
    if isinstance(column, str) and header is not None and column in header:
        return header.index(column)
    if isinstance(column, str) and not column.isdigit():
        if header is None:
            raise DataError(f"{path}: column {column!r} given by name but the file has no header")
        raise DataError(f"{path}: no column {column!r}; available columns: {', '.join(header)}")
    idx = int(column)
    if idx < 0 or (header is not None and idx >= len(header)):
        raise DataError(f"{path}: column index {idx} out of range")
    return idx


def ingest_csv(ref: DatasetRef) -> np.ndarray:
    """Read one numeric column in file order.

    Rows whose target cell is empty are skipped and counted in a warning.

    Raises:
        DataError: missing file or column, a non-numeric or non-finite cell
            (with its 1-based line number), or fewer than 2 usable rows.
    """
    path = Path(ref.path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    values: list[float] = []
    skipped = 0
    with handle:
        reader = csv.reader(handle, delimiter=ref.delimiter)
        header = None
        if ref.has_header:
            header = next(reader, None)
            if header is None:
                raise DataError(f"{path}: fewer than 2 usable rows (file is empty)")
            header = [h.strip() for h in header]
        idx = _resolve_column(header, ref.column, path)
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                skipped += 1
                continue
            if idx >= len(row):
                raise DataError(f"{path}: line {line} has no column {ref.column!r}")
            cell = row[idx].strip()
            if not cell:
                skipped += 1
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric value {cell!r} at line {line}") from None
            if not math.isfinite(value):
                raise DataError(f"{path}: non-finite value {cell!r} at line {line}")
            values.append(value)
    if skipped:
        log.warning("%s: skipped %d blank row(s)", path, skipped)
    if len(values) < 2:
        raise DataError(f"{path}: fewer than 2 usable rows")
    return np.array(values)


def subsample(values, t: int, seed: Seed) -> np.ndarray:
    """Simple random sample of size ``t`` without replacement, in draw order."""
    arr = np.asarray(values, dtype=float)
    if int(t) != t or t < 1:
        raise DomainError(f"subsample size must be a positive integer, got {t!r}")
    if t > arr.size:
        raise DomainError(f"subsample size {t} exceeds the {arr.size} available values")
    idx = seed.generator().choice(arr.size, size=int(t), replace=False)
    return arr[idx]
