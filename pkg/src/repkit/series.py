"""Core series types and the reversible transforms applied ahead of coding.

Price levels, log-returns and integer series are thin immutable wrappers
around numpy arrays.  The transforms here (log-return extraction, first
differencing, affine shifts) are all invertible given the recorded side
information, which is what lets a pipeline replay or undo them exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, DataError, SizeError


def _as_readonly(values, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype).copy()
    if arr.ndim != 1:
        raise DataError("series values must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Strictly positive price levels, optionally labelled."""

    values: np.ndarray
    timestamps: Optional[tuple] = None

    def __init__(self, values: Sequence[float], timestamps: Optional[Sequence] = None):
        arr = _as_readonly(values, np.float64)
        if not np.all(np.isfinite(arr)):
            raise DomainError("prices must be finite")
        bad = np.flatnonzero(arr <= 0.0)
        if bad.size:
            raise DomainError(f"non-positive price at index {int(bad[0])}")
        if timestamps is not None and len(timestamps) != arr.size:
            raise DataError("timestamps must match the number of prices")
        object.__setattr__(self, "values", arr)
        object.__setattr__(
            self, "timestamps", tuple(timestamps) if timestamps is not None else None
        )

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class ReturnSeries:
    """Log-returns (dimensionless reals); always finite."""

    values: np.ndarray

    def __init__(self, values: Sequence[float]):
        arr = _as_readonly(values, np.float64)
        if not np.all(np.isfinite(arr)):
            raise DomainError("returns must be finite (no NaN/inf)")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class IntegerSeries:
    """A plain sequence of (arbitrary-range) integers."""

    values: np.ndarray

    def __init__(self, values: Sequence[int]):
        arr = _as_readonly(values, np.int64)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """r_i = ln(p_{i+1}) - ln(p_i); output is one shorter than the input."""
    if len(prices) < 2:
        raise SizeError("need at least 2 prices to take returns")
    logs = np.log(prices.values)
    return ReturnSeries(np.diff(logs))


def prices_from_returns(returns: ReturnSeries, initial_price: float) -> PriceSeries:
    """Inverse of :func:`log_returns` given the stored initial price."""
    if initial_price <= 0:
        raise DomainError("initial price must be positive")
    levels = np.exp(np.cumsum(returns.values)) * initial_price
    return PriceSeries(np.concatenate(([initial_price], levels)))


def first_difference(series) -> IntegerSeries:
    """d_i = x_{i+1} - x_i; keep x_0 alongside to invert."""
    values = np.asarray(series.values if hasattr(series, "values") else series)
    if values.size < 2:
        raise SizeError("need at least 2 values to difference")
    if values.dtype.kind == "f":
        rounded = np.rint(values)
        if not np.array_equal(rounded, values):
            raise DomainError("first difference over reals would not be integer-valued")
        values = rounded
    return IntegerSeries(np.diff(values.astype(np.int64)))


def cumulative_sum(diffs: IntegerSeries, initial: int) -> IntegerSeries:
    """Inverse of :func:`first_difference` given the stored initial value."""
    out = np.concatenate(([initial], initial + np.cumsum(diffs.values)))
    return IntegerSeries(out)


def affine_shift(series: IntegerSeries, offset: int) -> IntegerSeries:
    """Add a constant offset; reversible by shifting back."""
    return IntegerSeries(series.values + int(offset))


def read_price_csv(path) -> PriceSeries:
    """Load prices from a one-column (price) or two-column (label, price) CSV.

    A header row is detected by a non-numeric price field on line 1; decimal
    points only (locale commas are rejected as malformed).  Parse failures
    report the 1-based line number.
    """
    path = Path(path)
    labels: list = []
    prices: list = []
    ncols: Optional[int] = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) not in (1, 2):
                raise DataError(f"{path.name}:{lineno}: expected 1 or 2 columns, got {len(row)}")
            if ncols is None:
                ncols = len(row)
            elif len(row) != ncols:
                raise DataError(
                    f"{path.name}:{lineno}: expected {ncols} column(s) as on earlier rows, "
                    f"got {len(row)} (decimal commas are not supported)"
                )
            if len(row) == 1:
                label, cell = None, row[0]
            else:
                label, cell = row[0].strip(), row[1]
            cell = cell.strip()
            try:
                value = float(cell)
            except ValueError:
                if lineno == 1 and not prices:
                    continue  # header row
                raise DataError(f"{path.name}:{lineno}: cannot parse price {cell!r}") from None
            if not math.isfinite(value) or value <= 0.0:
                raise DataError(f"{path.name}:{lineno}: non-positive or non-finite price {cell!r}")
            prices.append(value)
            labels.append(label)
    if len(prices) < 2:
        raise SizeError(f"{path.name}: need at least 2 prices, found {len(prices)}")
    timestamps = None if all(lab is None for lab in labels) else labels
    return PriceSeries(prices, timestamps)


def read_return_csv(path) -> ReturnSeries:
    """Load a return series from a one- or two-column CSV (same layout rules)."""
    path = Path(path)
    values: list = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            cell = row[-1].strip()
            try:
                value = float(cell)
            except ValueError:
                if lineno == 1 and not values:
                    continue
                raise DataError(f"{path.name}:{lineno}: cannot parse return {cell!r}") from None
            if not math.isfinite(value):
                raise DataError(f"{path.name}:{lineno}: non-finite return {cell!r}")
            values.append(value)
    return ReturnSeries(values)


def write_return_csv(returns: ReturnSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["return"])
        for v in returns.values:
            writer.writerow([repr(float(v))])
