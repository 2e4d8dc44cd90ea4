import numpy as np
import pytest
from hypothesis import given, strategies as st

from repkit.normal import norm_cdf, norm_ppf


def _ppf_by_bisection(p: float) -> float:
    """Independent oracle: invert norm_cdf by bisection."""
    lo, hi = -12.0, 12.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if norm_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("p", [1e-9, 1e-4, 0.01, 0.25, 0.5, 0.6745, 0.975, 1 - 1e-6])
def test_ppf_matches_bisection_oracle(p):
    assert norm_ppf(p) == pytest.approx(_ppf_by_bisection(p), abs=1e-9)


def test_quartile_value():
    # classic probable-error constant for the standard normal
    assert norm_ppf(0.25) == pytest.approx(-0.67448975, abs=1e-8)
    assert norm_ppf(0.75) == pytest.approx(0.67448975, abs=1e-8)


def test_endpoints_are_infinite():
    assert norm_ppf(0.0) == -np.inf
    assert norm_ppf(1.0) == np.inf


def test_out_of_domain_rejected():
    with pytest.raises(ValueError):
        norm_ppf(-0.1)
    with pytest.raises(ValueError):
        norm_ppf(1.1)


def test_symmetry():
    ps = np.linspace(1e-8, 0.5, 1001)
    assert np.allclose(norm_ppf(ps), -norm_ppf(1.0 - ps), atol=1e-12)


@given(st.floats(1e-12, 1.0 - 1e-12))
def test_cdf_ppf_round_trip(p):
    assert norm_cdf(norm_ppf(p)) == pytest.approx(p, abs=1e-11)


def test_ppf_monotone():
    ps = np.linspace(1e-6, 1 - 1e-6, 4001)
    values = norm_ppf(ps)
    assert np.all(np.diff(values) > 0)


def test_cdf_known_points():
    assert norm_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert norm_cdf(1.959963984540054) == pytest.approx(0.975, abs=1e-12)


def test_array_and_scalar_agree():
    ps = np.array([0.1, 0.5, 0.9])
    arr = norm_ppf(ps)
    assert arr.shape == (3,)
    assert arr[0] == norm_ppf(0.1)
