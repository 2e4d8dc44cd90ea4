"""Statistical baselines: Ljung-Box autocorrelation, ADF unit root, BDS independence.

These are the conventional tests a compression probe gets compared against.
Each returns a :class:`TestReport`; the report also answers the question the
comparison actually asks -- "is this series consistent with i.i.d. noise?" --
with the right polarity per test:

* Ljung-Box and BDS test an i.i.d.-type null, so consistency means a HIGH
  p-value (no rejection).
* The ADF null is a unit root.  A well-behaved return series is stationary,
  so consistency means the unit root IS rejected (p at the 0.01 clip floor);
  failing to reject on returns would itself be an anomaly.

BDS decisions use the (m=2, eps=1.0*sd) cell; the full grid is reported but
a decision over many correlated cells would not hold its nominal level.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit
from scipy import stats as _scipy_stats

from .errors import DomainError, NumericError, SizeError
from .series import ReturnSeries

DEFAULT_EPS_MULTIPLES = (0.5, 1.0, 1.5, 2.0)
DEFAULT_M_VALUES = (2, 3)
DEFAULT_LB_LAGS = 36


@dataclass(frozen=True)
class TestReport:
    """One statistical test run: statistics and p-values plus their parameters.

    ``cells`` aligns with ``statistics``/``p_values``; for single-statistic
    tests it holds one entry.
    """

    test_id: str
    statistics: tuple
    p_values: tuple
    params: dict
    cells: tuple

    def representative(self) -> tuple[float, float]:
        """(statistic, p) of the cell decisions are based on."""
        if self.test_id == "bds":
            for cell, stat, p in zip(self.cells, self.statistics, self.p_values):
                if cell.get("m") == 2 and cell.get("eps_multiple") == 1.0:
                    return stat, p
        return self.statistics[0], self.p_values[0]

    def consistent_with_iid(self, alpha: float = 0.05) -> bool:
        _, p = self.representative()
        if self.test_id == "adf":
            return p <= alpha  # stationary returns must reject the unit root
        return p > alpha

    def to_json(self) -> dict:
        return {
            "test_id": self.test_id,
            "params": self.params,
            "cells": [
                dict(cell, statistic=float(s), p_value=float(p))
                for cell, s, p in zip(self.cells, self.statistics, self.p_values)
            ],
        }


def _checked_values(series, min_len: int) -> np.ndarray:
    x = np.asarray(series.values if hasattr(series, "values") else series, dtype=np.float64)
    if x.size < min_len:
        raise SizeError(f"need at least {min_len} observations, got {x.size}")
    if float(np.var(x)) == 0.0:
        raise DomainError("series has zero variance")
    return x


def ljung_box(series: ReturnSeries, lags: int = DEFAULT_LB_LAGS) -> TestReport:
    """Portmanteau autocorrelation test; Q ~ chi2(lags) under the i.i.d. null."""
    lags = int(lags)
    if lags < 1:
        raise SizeError("lags must be >= 1")
    x = _checked_values(series, lags + 1)
    n = x.size
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    acf = np.array([float(np.dot(xc[k:], xc[:-k])) / denom for k in range(1, lags + 1)])
    q = n * (n + 2.0) * float(np.sum(acf**2 / (n - np.arange(1, lags + 1))))
    p = float(_scipy_stats.chi2.sf(q, lags))
    return TestReport(
        test_id="ljung_box",
        statistics=(q,),
        p_values=(p,),
        params={"lags": lags, "n": n},
        cells=({"lags": lags},),
    )


def default_adf_lag(n: int) -> int:
    """Cube-root rule used when no lag order is given: floor((n-1)^(1/3)).

    Computed as an exact integer cube root; float powering misses perfect
    cubes by one ulp.
    """
    k = max(0, int(round((n - 1) ** (1.0 / 3.0))))
    while k**3 > n - 1:
        k -= 1
    while (k + 1) ** 3 <= n - 1:
        k += 1
    return k


def adf_test(series: ReturnSeries, lag_order: Optional[int] = None) -> TestReport:
    """Augmented Dickey-Fuller tau test, constant term, no trend.

    The p-value comes from MacKinnon's response-surface interpolation and is
    clipped to [0.01, 0.99], mirroring the reporting convention of the usual
    econometrics packages.
    """
    from statsmodels.tsa.stattools import adfuller

    x = _checked_values(series, 8)
    n = x.size
    lag = default_adf_lag(n) if lag_order is None else int(lag_order)
    if lag < 0:
        raise SizeError("lag order must be >= 0")
    if n <= lag + 2:
        raise SizeError(f"series of length {n} cannot support lag order {lag}")
    try:
        result = adfuller(x, maxlag=lag, regression="c", autolag=None)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"ADF regression failed: {exc}") from exc
    stat, pvalue, usedlag = result[0], result[1], result[2]
    p = float(min(max(pvalue, 0.01), 0.99))
    return TestReport(
        test_id="adf",
        statistics=(float(stat),),
        p_values=(p,),
        params={"lag_order": int(usedlag), "n": n, "regression": "c"},
        cells=({"lag_order": int(usedlag)},),
    )


@njit(cache=True, nogil=True)
def _bds_diagonal_scan(x, eps_arr, m_max, d_lo, d_hi):
    """Pair counts along indicator-matrix diagonals d in [d_lo, d_hi).

    A length-L run of consecutive matches on a diagonal contributes
    L - m + 1 embedded-pair matches for each m <= L, so runs are flushed in
    O(m_max) instead of per element.

    Returns, per epsilon:
      pair_m[e, m-1]  -- #{s<t=s+d, all m consecutive matches ending at (s, t)}
      c1_m[e, m-1]    -- #{s<t, s >= m-1, |x_s - x_t| < eps}
    """
    n = x.size
    ne = eps_arr.size
    pair_m = np.zeros((ne, m_max), dtype=np.int64)
    c1_m = np.zeros((ne, m_max), dtype=np.int64)
    for e in range(ne):
        eps = eps_arr[e]
        for d in range(d_lo, d_hi):
            nd = n - d
            run = 0
            total = 0
            for i in range(nd):
                if abs(x[i] - x[i + d]) < eps:
                    run += 1
                    total += 1
                elif run > 0:
                    lim = run if run < m_max else m_max
                    for m in range(1, lim + 1):
                        pair_m[e, m - 1] += run - m + 1
                    run = 0
            if run > 0:
                lim = run if run < m_max else m_max
                for m in range(1, lim + 1):
                    pair_m[e, m - 1] += run - m + 1
            # C_1 truncated to s >= m-1: subtract the few head matches
            c1_m[e, 0] += total
            for m in range(2, m_max + 1):
                head = m - 1 if m - 1 < nd else nd
                sub = 0
                for i in range(head):
                    if abs(x[i] - x[i + d]) < eps:
                        sub += 1
                c1_m[e, m - 1] += total - sub
    return pair_m, c1_m


def _bds_scan(x: np.ndarray, eps_arr: np.ndarray, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Run the diagonal scan, chunked across threads for long series.

    Counts are exact integers, so the merge is order-independent.
    """
    n = x.size
    workers = min(8, os.cpu_count() or 1)
    if n < 4096 or workers == 1:
        return _bds_diagonal_scan(x, eps_arr, m_max, 1, n)
    # Pair work on diagonal d is (n - d): chunk boundaries equalize the area.
    boundaries = [1 + int(round((n - 1) * (1.0 - np.sqrt(1.0 - f / workers)))) for f in range(workers + 1)]
    boundaries[-1] = n
    pair_m = np.zeros((eps_arr.size, m_max), dtype=np.int64)
    c1_m = np.zeros((eps_arr.size, m_max), dtype=np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_bds_diagonal_scan, x, eps_arr, m_max, lo, hi)
            for lo, hi in zip(boundaries[:-1], boundaries[1:])
            if lo < hi
        ]
        for fut in futures:
            part_pairs, part_c1 = fut.result()
            pair_m += part_pairs
            c1_m += part_c1
    return pair_m, c1_m


def _match_row_counts(x: np.ndarray, eps: float) -> np.ndarray:
    """R_v = #{u != v : |x_u - x_v| < eps} via sorted counting, O(n log n)."""
    order = np.sort(x)
    hi = np.searchsorted(order, x + eps, side="left")
    lo = np.searchsorted(order, x - eps, side="right")
    return (hi - lo - 1).astype(np.float64)


def bds_correlation_integrals(x: np.ndarray, eps: float, m_max: int) -> np.ndarray:
    """C_1..C_m_max at one epsilon, each over the points with full m-histories."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    pair_m, _ = _bds_scan(x, np.array([eps], dtype=np.float64), m_max)
    out = np.empty(m_max, dtype=np.float64)
    n = x.size
    for m in range(1, m_max + 1):
        nobs = n - (m - 1)
        out[m - 1] = 2.0 * pair_m[0, m - 1] / (nobs * (nobs - 1.0))
    return out


def bds_test(
    series: ReturnSeries,
    m_values: Sequence[int] = DEFAULT_M_VALUES,
    eps_multiples: Sequence[float] = DEFAULT_EPS_MULTIPLES,
) -> TestReport:
    """BDS independence test over a grid of embedding dims and epsilons.

    W(m, eps) = sqrt(n_m) (C_m - C_1^m) / sigma_m with the standard
    asymptotic variance; two-sided normal p-values, one cell per (m, eps).
    """
    x = _checked_values(series, 200)
    n = x.size
    m_values = sorted(int(m) for m in m_values)
    if m_values[0] < 2:
        raise SizeError("embedding dimension must be >= 2")
    m_max = m_values[-1]
    if n <= m_max + 1:
        raise SizeError("series too short for the requested embedding dimension")
    sd = float(np.std(x, ddof=1))
    eps_multiples = [float(e) for e in eps_multiples]
    eps_arr = np.array([mult * sd for mult in eps_multiples], dtype=np.float64)

    pair_m, c1_m = _bds_scan(np.ascontiguousarray(x), eps_arr, m_max)

    stats_list: list[float] = []
    p_list: list[float] = []
    cells: list[dict] = []
    for e_idx, mult in enumerate(eps_multiples):
        # full-sample quantities for the variance (k and c)
        r = _match_row_counts(x, float(eps_arr[e_idx]))
        c_full = float(r.sum()) / (n * (n - 1.0))
        k_full = float(np.dot(r, r - 1.0)) / (n * (n - 1.0) * (n - 2.0))
        for m in m_values:
            nobs = n - (m - 1)
            c_m = 2.0 * pair_m[e_idx, m - 1] / (nobs * (nobs - 1.0))
            c_1 = 2.0 * c1_m[e_idx, m - 1] / (nobs * (nobs - 1.0))
            var = _bds_variance(c_full, k_full, m)
            if var <= 0:
                raise NumericError("BDS variance is non-positive; epsilon degenerate")
            w = np.sqrt(nobs) * (c_m - c_1**m) / np.sqrt(var)
            p = float(2.0 * _scipy_stats.norm.sf(abs(w)))
            stats_list.append(float(w))
            p_list.append(p)
            cells.append({"m": m, "eps_multiple": mult, "eps": float(eps_arr[e_idx])})
    return TestReport(
        test_id="bds",
        statistics=tuple(stats_list),
        p_values=tuple(p_list),
        params={"m_values": m_values, "eps_multiples": eps_multiples, "n": n, "sd": sd},
        cells=tuple(cells),
    )


def _bds_variance(c: float, k: float, m: int) -> float:
    """Asymptotic variance of the BDS statistic (Brock et al. 1996)."""
    total = k**m + (m - 1.0) ** 2 * c ** (2 * m) - m**2 * k * c ** (2 * m - 2)
    for j in range(1, m):
        total += 2.0 * k ** (m - j) * c ** (2 * j)
    return 4.0 * total


ALL_TESTS = ("ljung_box", "adf", "bds")


def run_test(name: str, series: ReturnSeries, **kwargs) -> TestReport:
    if name == "ljung_box":
        return ljung_box(series, **kwargs)
    if name == "adf":
        return adf_test(series, **kwargs)
    if name == "bds":
        return bds_test(series, **kwargs)
    raise DomainError(f"unknown test {name!r}; choose from {ALL_TESTS}")
