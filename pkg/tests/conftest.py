"""Shared fixtures: seeded data makers and the volatility-clustering fixture."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from repkit.generators import iid_gaussian_returns
from repkit.series import ReturnSeries

settings.register_profile(
    "repkit",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repkit")


def two_regime_returns(n: int, seed: int, block: int = 2048, high_sigma: float = 4.0) -> ReturnSeries:
    """Test fixture: i.i.d. gaussian scaled by a two-level variance regime.

    Blocks of ``block`` consecutive returns alternate between sigma = 1 and
    sigma = ``high_sigma``, which produces the bunching of extreme symbols a
    global quantile discretization exposes.  This fixture is our own
    construction for exercising the clustering-erasure property.
    """
    base = iid_gaussian_returns(n, seed).values
    regime = (np.arange(n) // block) % 2
    sigma = np.where(regime == 1, high_sigma, 1.0)
    return ReturnSeries(base * sigma)


@pytest.fixture(scope="session")
def clustering_fixture():
    return two_regime_returns(27423, seed=1234)
