"""Deterministic 64-bit random streams.

Every stochastic routine in the package draws from the counter-based
SplitMix64 stream defined here.  The stream for a seed is a pure function of
(seed, position), so generation is vectorizable, reproducible across
platforms, and trivially splittable: Monte-Carlo trial ``i`` runs on
``derive_seed(seed, i)`` and is independent of trial order.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF

# (x >> 11) keeps 53 bits; +0.5 keeps draws strictly inside (0, 1) so that
# inverse-CDF transforms never see 0 or 1.
_INV_2_53 = float(2.0**-53)


def _mix_array(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over uint64 arrays."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def mix64(value: int) -> int:
    """Scalar SplitMix64 finalizer; maps any 64-bit value to a well-mixed one."""
    z = value & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Per-trial / per-purpose child seed: hash of (seed XOR mixed index)."""
    salted = (seed & _MASK) ^ mix64(((index & _MASK) + 1) * _GOLDEN)
    return mix64(salted)


def uint64_stream(seed: int, n: int) -> np.ndarray:
    """First ``n`` values of the SplitMix64 stream for ``seed``.

    Position ``i`` is ``mix(seed + (i+1) * golden)``; the stream is stateless.
    """
    if n < 0:
        raise ValueError("stream length must be non-negative")
    with np.errstate(over="ignore"):
        counters = np.uint64(seed & _MASK) + (
            np.arange(1, n + 1, dtype=np.uint64) * np.uint64(_GOLDEN)
        )
    return _mix_array(counters)


def unit_open_stream(seed: int, n: int) -> np.ndarray:
    """``n`` doubles strictly inside (0, 1), 53-bit resolution."""
    raw = uint64_stream(seed, n)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def bit_stream(seed: int, n: int) -> np.ndarray:
    """``n`` unbiased bits as uint8 (top bit of each stream value)."""
    return (uint64_stream(seed, n) >> np.uint64(63)).astype(np.uint8)
