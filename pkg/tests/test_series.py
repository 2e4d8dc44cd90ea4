import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from repkit.errors import DataError, DomainError, SizeError
from repkit.generators import iid_gaussian_returns
from repkit.series import (
    IntegerSeries,
    PriceSeries,
    ReturnSeries,
    affine_shift,
    cumulative_sum,
    first_difference,
    log_returns,
    prices_from_returns,
    read_price_csv,
    read_return_csv,
    write_return_csv,
)

E1_PRICES = [1000, 1028, 1044, 1015, 998, 1017, 1048, 1079, 1110, 1090, 1058, 1089, 1117, 1100]
E2_DIFFS = [28, 16, -29, -17, 19, 31, 31, 31, -20, -32, 31, 28, -17]
E3_SHIFTED = [60, 48, 3, 15, 51, 63, 63, 63, 12, 0, 63, 60, 15, 15]


def test_log_returns_constant_prices():
    out = log_returns(PriceSeries([100, 100, 100]))
    assert np.array_equal(out.values, [0.0, 0.0])


def test_log_returns_unit_step():
    out = log_returns(PriceSeries([1.0, math.e]))
    assert out.values[0] == pytest.approx(1.0, abs=1e-15)


def test_log_returns_round_trip_through_prices():
    returns = iid_gaussian_returns(5000, 17)
    prices = prices_from_returns(returns, 100.0)
    recovered = log_returns(prices)
    assert np.allclose(recovered.values, returns.values, rtol=0, atol=1e-12)
    assert np.allclose(
        prices_from_returns(recovered, 100.0).values, prices.values, rtol=1e-10
    )


def test_log_returns_needs_two_prices():
    with pytest.raises(SizeError):
        log_returns(PriceSeries([10.0]))


def test_non_positive_price_names_index():
    with pytest.raises(DomainError, match="index 2"):
        PriceSeries([10.0, 5.0, -1.0])


def test_first_difference_worked_example():
    diffs = first_difference(PriceSeries(E1_PRICES))
    assert diffs.values.tolist() == E2_DIFFS


def test_first_difference_constant():
    assert first_difference(IntegerSeries([5, 5, 5])).values.tolist() == [0, 0]


def test_first_difference_short_input():
    with pytest.raises(SizeError):
        first_difference(IntegerSeries([3]))


def test_first_difference_rejects_fractional_reals():
    with pytest.raises(DomainError):
        first_difference(PriceSeries([1.5, 2.25]))


@given(st.lists(st.integers(-10**9, 10**9), min_size=2, max_size=200))
def test_cumsum_inverts_difference(values):
    series = IntegerSeries(values)
    diffs = first_difference(series)
    rebuilt = cumulative_sum(diffs, values[0])
    assert rebuilt.values.tolist() == values


def test_affine_shift_worked_example():
    shifted = affine_shift(IntegerSeries([28, 16, -29]), 32)
    assert shifted.values.tolist() == [60, 48, 3]
    full = affine_shift(first_difference(PriceSeries(E1_PRICES)), 32)
    assert full.values.tolist() == E3_SHIFTED[:13]


def test_affine_shift_zero_is_identity():
    values = [4, -2, 9]
    assert affine_shift(IntegerSeries(values), 0).values.tolist() == values


@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=100), st.integers(-10**6, 10**6))
def test_shift_unshift_identity(values, offset):
    series = IntegerSeries(values)
    assert affine_shift(affine_shift(series, offset), -offset).values.tolist() == values


def test_return_series_rejects_nan():
    with pytest.raises(DomainError):
        ReturnSeries([0.1, float("nan")])


def test_price_csv_two_column_with_header(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("date,price\n2001-01-01,100.5\n2001-01-02,101.25\n")
    prices = read_price_csv(path)
    assert prices.values.tolist() == [100.5, 101.25]
    assert prices.timestamps == ("2001-01-01", "2001-01-02")


def test_price_csv_one_column_no_header(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("100\n101\n99.5\n")
    prices = read_price_csv(path)
    assert prices.values.tolist() == [100.0, 101.0, 99.5]
    assert prices.timestamps is None


def test_price_csv_reports_line_number(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("price\n100\nnot-a-number\n")
    with pytest.raises(DataError, match=":3"):
        read_price_csv(path)


def test_price_csv_rejects_locale_comma(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("100\n101,5\n")
    with pytest.raises(DataError):
        read_price_csv(path)


def test_price_csv_rejects_non_positive(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("100\n-3\n")
    with pytest.raises(DataError, match=":2"):
        read_price_csv(path)


def test_return_csv_round_trip(tmp_path):
    path = tmp_path / "r.csv"
    returns = iid_gaussian_returns(500, 3)
    write_return_csv(returns, path)
    back = read_return_csv(path)
    assert np.array_equal(back.values, returns.values)
