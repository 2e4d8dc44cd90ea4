"""Deterministic and seeded generators for every sequence the pipelines study.

Deterministic sources (Thue-Morse, binary Champernowne, pi digits) are exact
integer constructions.  Seeded sources draw from the SplitMix64 streams in
:mod:`repkit.rng`; the same seed always reproduces the same series bit for
bit, and Monte-Carlo callers derive independent child seeds per trial.
"""

from __future__ import annotations

import threading
from typing import Optional

import numpy as np

from . import rng
from .bits import BitSequence, SymbolSeries, bits_to_symbols, duplicate_each_bit
from .discretize import BoundsTable
from .errors import DomainError, NumericError, RangeError, SizeError
from .normal import norm_ppf
from .series import IntegerSeries, PriceSeries, ReturnSeries


def thue_morse(n: int) -> BitSequence:
    """First ``n`` digits of the Thue-Morse sequence (0, then append negations)."""
    if n < 0:
        raise RangeError("n must be >= 0")
    if n == 0:
        return BitSequence([])
    bits = np.zeros(1, dtype=np.uint8)
    while bits.size < n:
        bits = np.concatenate([bits, 1 - bits])
    return BitSequence(bits[:n])


def champernowne_binary(n: int) -> BitSequence:
    """First ``n`` digits of the base-2 Champernowne concatenation 0,1,10,11,100,..."""
    if n < 0:
        raise RangeError("n must be >= 0")
    chunks: list[str] = []
    total = 0
    i = 0
    while total < n:
        s = bin(i)[2:] if i else "0"
        chunks.append(s)
        total += len(s)
        i += 1
    text = "".join(chunks)[:n]
    return BitSequence.from01(text)


# -- pi digits: exact integer arithmetic only ----------------------------------

_pi_lock = threading.Lock()
_pi_digit_cache = ""


def gibbons_spigot():
    """Unbounded streaming spigot; yields 3, 1, 4, 1, 5, ...

    Simple and self-evidently correct, but quadratic with a large constant;
    kept as the independent cross-check for the fast path below.
    """
    q, r, t, k, n, l = 1, 0, 1, 1, 3, 3
    while True:
        if 4 * q + r - t < n * t:
            yield n
            q, r, n = 10 * q, 10 * (r - n * t), (10 * (3 * q + r)) // t - 10 * n
        else:
            q, r, t, k, n, l = (
                q * k,
                (2 * q + r) * l,
                t * l,
                k + 1,
                (q * (7 * k + 2) + r * l) // (t * l),
                l + 2,
            )


def _chudnovsky_digits(n: int) -> str:
    """First ``n`` decimals of pi via Chudnovsky binary splitting.

    Pure integer arithmetic: the only irrational step is an exact integer
    square root at 50 guard digits, far more than a floor division can leak.
    """
    import math

    guard = 50
    prec = n + guard

    def split(a: int, b: int) -> tuple[int, int, int]:
        if b - a == 1:
            if a == 0:
                pab = qab = 1
            else:
                pab = (6 * a - 5) * (2 * a - 1) * (6 * a - 1)
                qab = a * a * a * 10939058860032000  # 640320^3 / 24
            tab = pab * (13591409 + 545140134 * a)
            return pab, qab, -tab if a & 1 else tab
        mid = (a + b) // 2
        p1, q1, t1 = split(a, mid)
        p2, q2, t2 = split(mid, b)
        return p1 * p2, q1 * q2, t1 * q2 + p1 * t2

    terms = n // 14 + 2  # each term adds ~14.18 digits
    _, q, t = split(0, terms)
    one = 10**prec
    sqrt_c = math.isqrt(10005 * one * one)
    pi_scaled = (q * 426880 * sqrt_c) // t
    text = _int_to_decimal_string(pi_scaled)
    if not text.startswith("3"):
        raise NumericError("pi computation produced an implausible leading digit")
    return text[1 : n + 1]


def _int_to_decimal_string(x: int) -> str:
    """Decimal digits of a huge non-negative int, chunked below the str() limit."""
    chunk_digits = 4000
    chunk = 10**chunk_digits
    parts: list[str] = []
    while x >= chunk:
        x, rem = divmod(x, chunk)
        parts.append(str(rem).zfill(chunk_digits))
    parts.append(str(x))
    return "".join(reversed(parts))


def pi_decimal_digits(n: int) -> IntegerSeries:
    """First ``n`` decimal digits of pi after "3."; exact, cached across calls."""
    if n < 0:
        raise RangeError("n must be >= 0")
    global _pi_digit_cache
    with _pi_lock:
        if len(_pi_digit_cache) < n:
            _pi_digit_cache = _chudnovsky_digits(n)
        return IntegerSeries([int(c) for c in _pi_digit_cache[:n]])


# -- seeded sources ------------------------------------------------------------


def bernoulli_bits(n: int, p_one: float, seed: int) -> BitSequence:
    """``n`` independent bits, each 1 with probability ``p_one``."""
    if not 0.0 <= p_one <= 1.0:
        raise RangeError("p_one must lie in [0, 1]")
    u = rng.unit_open_stream(seed, int(n))
    return BitSequence((u < p_one).astype(np.uint8))


def iid_gaussian_returns(n: int, seed: int) -> ReturnSeries:
    """``n`` i.i.d. standard-normal draws via inverse-CDF of the seeded stream."""
    return ReturnSeries(norm_ppf(rng.unit_open_stream(seed, int(n))))


def uniform_symbols(n: int, width: int, seed: int) -> SymbolSeries:
    """i.i.d. uniform symbols over [0, 2^width - 1] (mask, no rejection)."""
    width = int(width)
    if width < 1 or width > 32:
        raise RangeError("width must be in [1, 32]")
    mask = np.uint64((1 << width) - 1)
    raw = rng.uint64_stream(seed, int(n)) & mask
    return SymbolSeries(raw.astype(np.int64), width)


def embed_low_bit_cycle(symbols: SymbolSeries, cycle_bits: int, phase: int = 0) -> SymbolSeries:
    """Overwrite the low ``cycle_bits`` of position t with (t + phase) mod 2^cycle_bits.

    The upper bits are untouched, so the symbol marginal stays uniform while
    the low bits become a deterministic cycle.
    """
    cycle_bits = int(cycle_bits)
    if not 1 <= cycle_bits < symbols.width:
        raise RangeError(f"cycle_bits must lie in [1, {symbols.width - 1}]")
    period = 1 << cycle_bits
    t = np.arange(len(symbols), dtype=np.int64)
    low = (t + int(phase)) % period
    upper = symbols.symbols & ~np.int64(period - 1)
    return SymbolSeries(upper | low, symbols.width)


def symbols_to_returns(symbols: SymbolSeries, bounds: BoundsTable, seed: int) -> ReturnSeries:
    """Draw one return per symbol, uniformly inside that symbol's bin.

    Bins with an infinite edge are sampled through the normal inverse CDF on
    the matching probability slice, translated so the finite edge lines up
    with the table's bound (for normal-quantile tables the translation is
    zero and the output marginal is exactly piecewise-normal).  Values are
    nudged inside half-open bins where float rounding would spill over, so
    re-discretizing with the same table returns exactly the input symbols.
    """
    if symbols.width != bounds.width:
        raise RangeError(
            f"symbol width {symbols.width} does not match bounds width {bounds.width}"
        )
    k = bounds.n_bins
    b = bounds.bounds
    s = symbols.symbols
    u = rng.unit_open_stream(seed, len(symbols))
    lo = b[s]
    hi = b[s + 1]
    values = np.empty(len(symbols), dtype=np.float64)

    finite = np.isfinite(lo) & np.isfinite(hi)
    values[finite] = lo[finite] + u[finite] * (hi[finite] - lo[finite])

    low_tail = np.isneginf(lo)
    if low_tail.any():
        # symbol is 0 here; align the normal tail's right edge with b[1]
        shift = b[1] - norm_ppf(1.0 / k)
        values[low_tail] = norm_ppf(u[low_tail] / k) + shift

    high_tail = np.isposinf(hi)
    if high_tail.any():
        shift = b[k - 1] - norm_ppf((k - 1.0) / k)
        values[high_tail] = norm_ppf((k - 1.0 + u[high_tail]) / k) + shift

    # Guarantee the exact round-trip: clamp into [lo, hi) at float resolution.
    with np.errstate(invalid="ignore"):
        spill = values >= hi
    if spill.any():
        values[spill] = np.nextafter(hi[spill], -np.inf)
    below = values < lo
    if below.any():
        values[below] = lo[below]
    return ReturnSeries(values)


def toy_price_series(n: int, seed: int) -> PriceSeries:
    """A price walk whose increments hide a duplicated-bit structure.

    Construction (run in reverse by the worked-example pipeline): draw random
    bits, duplicate each bit, group the doubled stream into 6-bit integers in
    [0, 63], subtract 32 to get increments, then cumulative-sum from 1000.
    """
    n = int(n)
    if n < 1:
        raise SizeError("need n >= 1 prices")
    if n == 1:
        return PriceSeries([1000.0])
    source = BitSequence(rng.bit_stream(seed, 3 * (n - 1)))
    doubled = duplicate_each_bit(source, 2)
    symbols = bits_to_symbols(doubled, 6)
    increments = symbols.symbols - 32
    prices = 1000.0 + np.concatenate(([0], np.cumsum(increments))).astype(np.float64)
    if prices.min() <= 0:
        raise DomainError(
            f"price walk went non-positive for seed {seed}; use a shorter n or another seed"
        )
    return PriceSeries(prices)


GENERATOR_KINDS = (
    "thue-morse",
    "champernowne",
    "pi-digits",
    "bernoulli",
    "gaussian",
    "uniform",
    "lowbit-case1",
    "lowbit-case2",
    "toy-e1",
    "pi-returns",
)
