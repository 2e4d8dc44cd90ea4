"""Lossless discretization of real returns onto power-of-two alphabets.

Four schemes are provided: equal-width bins between the sample extremes,
standard-normal quantile bins, empirical-quantile bins over the whole
sample, and the progressive scheme that re-derives empirical quantiles
inside a trailing window at every position (which is what flattens
volatility clustering out of the symbol stream).

Alphabet sizes are powers of two so a symbol stream re-codes into bits
without bias; a bin count that did not divide the byte evenly would by
itself hand coders a spurious regularity.
"""

from __future__ import annotations

import csv
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .bits import SymbolSeries
from .errors import DataError, DomainError, RangeError, SizeError
from .normal import norm_ppf
from .series import ReturnSeries


@dataclass(frozen=True)
class BoundsTable:
    """2^width + 1 strictly increasing bin bounds; ends may be infinite."""

    bounds: np.ndarray
    width: int

    def __init__(self, bounds: Sequence[float], width: int):
        width = int(width)
        arr = np.asarray(bounds, dtype=np.float64).copy()
        if arr.size != (1 << width) + 1:
            raise DataError(
                f"bounds table for width {width} needs {(1 << width) + 1} entries, got {arr.size}"
            )
        if np.isnan(arr).any():
            raise DataError("bounds may not be NaN")
        if not np.all(np.diff(arr) > 0):
            raise DataError("bounds must be strictly increasing")
        if np.isinf(arr[1:-1]).any():
            raise DataError("only the first and last bound may be infinite")
        arr.setflags(write=False)
        object.__setattr__(self, "bounds", arr)
        object.__setattr__(self, "width", width)

    @property
    def n_bins(self) -> int:
        return 1 << self.width


@dataclass(frozen=True)
class DiscretizationRecord:
    """Everything needed to re-run a discretization bit-identically."""

    scheme: str
    width: int
    window: int | None = None
    bounds: tuple | None = None

    def apply(self, returns: ReturnSeries) -> SymbolSeries:
        if self.scheme == "equal_width":
            return equal_width_bins(returns, self.width)[0]
        if self.scheme == "normal_quantile":
            return discretize_with_bounds(returns, normal_quantile_bounds(self.width))
        if self.scheme == "empirical_quantile":
            return empirical_quantile_discretize(returns, self.width)
        if self.scheme == "progressive":
            assert self.window is not None
            return progressive_discretize(returns, self.window, self.width)
        if self.scheme == "explicit_bounds":
            assert self.bounds is not None
            return discretize_with_bounds(returns, BoundsTable(self.bounds, self.width))
        raise DataError(f"unknown discretization scheme {self.scheme!r}")


def equal_width_bins(returns: ReturnSeries, width: int) -> tuple[SymbolSeries, BoundsTable]:
    """Split [min, max] into 2^width equal bins; the maximum joins the top bin."""
    x = returns.values
    if x.size < 2:
        raise SizeError("need at least 2 returns to derive equal-width bins")
    m, big = float(x.min()), float(x.max())
    if not big > m:
        raise DomainError("degenerate input: all returns identical, no bin width")
    k = 1 << int(width)
    e = (big - m) / k
    symbols = np.floor((x - m) / e).astype(np.int64)
    np.clip(symbols, 0, k - 1, out=symbols)
    bounds = BoundsTable(m + e * np.arange(k + 1), width)
    return SymbolSeries(symbols, width), bounds


def normal_quantile_bounds(width: int) -> BoundsTable:
    """Bounds giving each bin probability 2^-width under N(0, 1)."""
    k = 1 << int(width)
    return BoundsTable(norm_ppf(np.arange(k + 1) / k), width)


def discretize_with_bounds(returns: ReturnSeries, bounds: BoundsTable) -> SymbolSeries:
    """Map each return to the index i with bounds[i] <= x < bounds[i+1]."""
    x = returns.values
    b = bounds.bounds
    idx = np.searchsorted(b, x, side="right") - 1
    bad = np.flatnonzero((idx < 0) | (idx >= bounds.n_bins))
    if bad.size:
        i = int(bad[0])
        raise RangeError(f"return at index {i} ({x[i]!r}) lies outside the bounds table")
    return SymbolSeries(idx, bounds.width)


def empirical_quantile_discretize(returns: ReturnSeries, width: int) -> SymbolSeries:
    """Rank-based symbols: floor(rank * 2^width / n) with stable tie order.

    Ties are broken by original position (stable sort), so the map is
    deterministic and bins differ in size by at most one element.
    """
    x = returns.values
    k = 1 << int(width)
    n = x.size
    if n < k:
        raise SizeError(f"need at least {k} returns for a width-{width} alphabet, got {n}")
    order = np.argsort(x, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n, dtype=np.int64)
    return SymbolSeries(ranks * k // n, width)


def progressive_discretize(returns: ReturnSeries, window: int, width: int) -> SymbolSeries:
    """Per-position empirical-quantile coding inside a trailing window.

    Output position t codes return r_{t+window-1} by its rank among the
    window ending at (and including) it: floor(rank * 2^width / window).
    Each return is therefore measured against its local neighbourhood, which
    normalizes local volatility.
    """
    x = returns.values
    window = int(window)
    k = 1 << int(width)
    n = x.size
    if window < k:
        raise SizeError(f"window {window} smaller than alphabet size {k}")
    if window >= n:
        raise SizeError(f"window {window} must be shorter than the series ({n})")
    out = np.empty(n - window + 1, dtype=np.int64)
    # Sorted multiset of the window excluding the current (most recent) return.
    buf = sorted(x[: window - 1].tolist())
    xs = x.tolist()
    for j in range(n - window + 1):
        cur = xs[j + window - 1]
        rank = bisect_right(buf, cur)  # earlier-indexed ties rank below the current
        out[j] = rank * k // window
        insort(buf, cur)
        del buf[bisect_left(buf, xs[j])]
    return SymbolSeries(out, width)


def bounds_to_csv(table: BoundsTable, path) -> None:
    """(index, bound) rows; infinities spelled "-inf" / "+inf"."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "bound"])
        for i, b in enumerate(table.bounds):
            if np.isneginf(b):
                text = "-inf"
            elif np.isposinf(b):
                text = "+inf"
            else:
                text = repr(float(b))
            writer.writerow([i, text])


def bounds_from_csv(path, width: int | None = None) -> BoundsTable:
    path = Path(path)
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            cell = row[-1].strip()
            if lineno == 1 and cell.lower() == "bound":
                continue
            if cell == "-inf":
                values.append(-np.inf)
            elif cell == "+inf":
                values.append(np.inf)
            else:
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(f"{path.name}:{lineno}: cannot parse bound {cell!r}") from None
    if width is None:
        count = len(values) - 1
        width = count.bit_length() - 1
        if count <= 0 or (1 << width) != count:
            raise DataError(f"{path.name}: bound count {len(values)} is not 2^w + 1")
    return BoundsTable(values, width)
