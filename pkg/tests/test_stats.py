import numpy as np
import pytest

from repkit import rng
from repkit.discretize import normal_quantile_bounds
from repkit.errors import DomainError, SizeError
from repkit.generators import (
    embed_low_bit_cycle,
    iid_gaussian_returns,
    symbols_to_returns,
    uniform_symbols,
)
from repkit.series import ReturnSeries
from repkit.stats import (
    adf_test,
    bds_correlation_integrals,
    bds_test,
    default_adf_lag,
    ljung_box,
    run_test,
)


def brute_force_correlation_integral(x: np.ndarray, eps: float, m: int) -> float:
    """O(n^2 m) double loop straight from the definition."""
    n = len(x)
    indicators = np.abs(x[:, None] - x[None, :]) < eps
    count = 0
    for s in range(m - 1, n):
        for t in range(s + 1, n):
            if all(indicators[s - j, t - j] for j in range(m)):
                count += 1
    nobs = n - (m - 1)
    return 2.0 * count / (nobs * (nobs - 1))


# -- Ljung-Box -------------------------------------------------------------------


def test_ljung_box_iid_high_p_values():
    high = sum(
        ljung_box(iid_gaussian_returns(8192, seed), 36).p_values[0] > 0.05
        for seed in range(10)
    )
    assert high >= 9


def test_ljung_box_alternating_series_rejects():
    x = ReturnSeries(np.tile([1.0, -1.0], 500))
    report = ljung_box(x, 5)
    assert report.p_values[0] < 1e-6


def test_ljung_box_short_series_rejected():
    with pytest.raises(SizeError):
        ljung_box(ReturnSeries([0.1, -0.2]), 5)


def test_ljung_box_scale_invariant():
    x = iid_gaussian_returns(2000, 3)
    a = ljung_box(x, 12).statistics[0]
    b = ljung_box(ReturnSeries(5.0 * x.values + 1.0), 12).statistics[0]
    assert a == pytest.approx(b, rel=1e-12)


def test_ljung_box_zero_variance():
    with pytest.raises(DomainError):
        ljung_box(ReturnSeries(np.zeros(100)), 3)


def test_ljung_box_oracle_small_case():
    # explicit-loop oracle for Q on a tiny series
    x = np.array([0.3, -0.1, 0.25, 0.0, -0.4, 0.15, 0.05, -0.2])
    n = len(x)
    xc = x - x.mean()
    denom = np.sum(xc**2)
    q_oracle = 0.0
    for k in (1, 2):
        rho = sum(xc[t] * xc[t - k] for t in range(k, n)) / denom
        q_oracle += rho**2 / (n - k)
    q_oracle *= n * (n + 2)
    report = ljung_box(ReturnSeries(x), 2)
    assert report.statistics[0] == pytest.approx(q_oracle, rel=1e-12)


# -- ADF -------------------------------------------------------------------------


def test_adf_default_lag_reproduces_published_order():
    assert default_adf_lag(32000) == 31
    assert default_adf_lag(4097) == 16
    assert default_adf_lag(4096) == 15


def test_adf_iid_returns_reject_unit_root():
    report = adf_test(iid_gaussian_returns(32000, 11))
    assert report.p_values[0] == pytest.approx(0.01)
    assert report.params["lag_order"] == 31
    assert report.statistics[0] < -20
    assert report.consistent_with_iid()


def test_adf_random_walk_levels_keep_unit_root():
    p_values = []
    for seed in range(30):
        walk = np.cumsum(iid_gaussian_returns(2048, seed).values)
        p_values.append(adf_test(ReturnSeries(walk)).p_values[0])
    assert np.median(p_values) > 0.10


def test_adf_p_value_clipped():
    report = adf_test(iid_gaussian_returns(4096, 0))
    assert 0.01 <= report.p_values[0] <= 0.99


def test_adf_short_series_rejected():
    with pytest.raises(SizeError):
        adf_test(ReturnSeries([0.1, -0.1, 0.2, 0.0]), lag_order=10)


# -- BDS -------------------------------------------------------------------------


def test_bds_matches_brute_force_tiny():
    x = np.array([0.1, -0.3, 0.2, 0.05, -0.1, 0.4, -0.25, 0.15, 0.0, -0.05])
    for eps in (0.15, 0.3, 0.6):
        fast = bds_correlation_integrals(x, eps, 3)
        for m in (1, 2, 3):
            assert fast[m - 1] == pytest.approx(
                brute_force_correlation_integral(x, eps, m), abs=1e-15
            )


@pytest.mark.parametrize("n", [120, 500])
def test_bds_matches_brute_force_gaussian(n):
    x = iid_gaussian_returns(n, 31).values
    sd = np.std(x, ddof=1)
    for eps in (0.5 * sd, 1.0 * sd, 2.0 * sd):
        fast = bds_correlation_integrals(x, eps, 3)
        for m in (1, 2, 3):
            slow = brute_force_correlation_integral(x, eps, m)
            assert abs(fast[m - 1] - slow) <= 1e-12


def test_bds_iid_null_behavior():
    report = bds_test(iid_gaussian_returns(8000, 13))
    stat, p = report.representative()
    assert abs(stat) < 3.0
    assert len(report.cells) == 8  # m in {2,3} x 4 epsilons


def test_bds_detects_genuine_dependence():
    # AR(1) with strong persistence is exactly what BDS is built to flag
    base = iid_gaussian_returns(4000, 5).values
    ar = np.empty_like(base)
    acc = 0.0
    for i, e in enumerate(base):
        acc = 0.7 * acc + e
        ar[i] = acc
    report = bds_test(ReturnSeries(ar))
    _, p = report.representative()
    assert p < 1e-6
    assert not report.consistent_with_iid()


def test_bds_blind_to_low_bit_cycle():
    symbols = embed_low_bit_cycle(uniform_symbols(8000, 8, 21), 1)
    chron = symbols_to_returns(symbols, normal_quantile_bounds(8), rng.derive_seed(21, 1))
    report = bds_test(chron)
    assert all(p > 0.05 for p in report.p_values)


def test_bds_preconditions():
    with pytest.raises(SizeError):
        bds_test(iid_gaussian_returns(100, 0))
    with pytest.raises(SizeError):
        bds_test(iid_gaussian_returns(300, 0), m_values=(1,))
    with pytest.raises(DomainError):
        bds_test(ReturnSeries(np.zeros(500)))


def test_run_test_dispatch():
    r = iid_gaussian_returns(1000, 2)
    assert run_test("ljung_box", r, lags=10).test_id == "ljung_box"
    with pytest.raises(DomainError):
        run_test("phillips_perron", r)
