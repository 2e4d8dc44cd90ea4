"""Reversible packing between integer symbols, bit sequences and bytes.

All packing is big-endian within a symbol (the most significant bit comes
first), and every operation here is a bijection on its stated domain; the
coders and pipelines rely on these being exactly invertible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, IntegrityError, RangeError, SizeError

_FILE_MAGIC_NIBBLE = 0xB


@dataclass(frozen=True)
class BitSequence:
    """An ordered sequence of 0/1 digits, not necessarily byte-aligned."""

    bits: np.ndarray

    def __init__(self, bits: Sequence[int]):
        arr = np.asarray(bits, dtype=np.uint8).copy()
        if arr.ndim != 1:
            raise DataError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise RangeError("bit values must be 0 or 1")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __len__(self) -> int:
        return self.bits.size

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from01(cls, text: str) -> "BitSequence":
        cleaned = text.replace(" ", "")
        if set(cleaned) - {"0", "1"}:
            raise RangeError("bit string may contain only 0, 1 and spaces")
        return cls([1 if c == "1" else 0 for c in cleaned])


@dataclass(frozen=True)
class SymbolSeries:
    """Integers over the alphabet {0 .. 2^width - 1}; width is carried along.

    Keeping the width on the series (rather than per call) prevents a
    pipeline from silently re-interpreting symbols under a different
    alphabet, which would bias any downstream coding.
    """

    symbols: np.ndarray
    width: int

    def __init__(self, symbols: Sequence[int], width: int):
        width = int(width)
        if width < 1 or width > 32:
            raise RangeError("symbol width must be in [1, 32]")
        arr = np.asarray(symbols, dtype=np.int64).copy()
        if arr.ndim != 1:
            raise DataError("symbols must be one-dimensional")
        if arr.size:
            lo, hi = int(arr.min()), int(arr.max())
            if lo < 0 or hi >= (1 << width):
                raise RangeError(
                    f"symbol out of range for width {width}: found value {lo if lo < 0 else hi}"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)
        object.__setattr__(self, "width", width)

    def __len__(self) -> int:
        return self.symbols.size

    @property
    def alphabet_size(self) -> int:
        return 1 << self.width


def symbols_to_bits(series: SymbolSeries) -> BitSequence:
    """Concatenate each symbol's big-endian ``width``-bit expansion."""
    w = series.width
    if len(series) == 0:
        return BitSequence([])
    shifts = np.arange(w - 1, -1, -1, dtype=np.int64)
    expanded = (series.symbols[:, None] >> shifts[None, :]) & 1
    return BitSequence(expanded.reshape(-1).astype(np.uint8))


def bits_to_symbols(bits: BitSequence, width: int) -> SymbolSeries:
    """Inverse of :func:`symbols_to_bits`; bit count must divide evenly."""
    width = int(width)
    if width < 1:
        raise RangeError("width must be >= 1")
    n = len(bits)
    if n % width:
        raise SizeError(f"bit length {n} is not divisible by width {width}")
    if n == 0:
        return SymbolSeries([], width)
    grouped = bits.bits.reshape(-1, width).astype(np.int64)
    weights = (1 << np.arange(width - 1, -1, -1, dtype=np.int64))
    return SymbolSeries(grouped @ weights, width)


def decimal_digits_to_nibbles(digits) -> BitSequence:
    """Code each decimal digit 0..9 with exactly 4 bits."""
    values = np.asarray(getattr(digits, "values", digits), dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() > 9):
        raise RangeError("decimal digits must lie in [0, 9]")
    return symbols_to_bits(SymbolSeries(values, 4))


def take_every_kth(bits: BitSequence, k: int, offset: int = 0) -> BitSequence:
    """Keep bits at positions offset, offset+k, offset+2k, ..."""
    k = int(k)
    offset = int(offset)
    if k < 1:
        raise RangeError("k must be >= 1")
    if not 0 <= offset < k:
        raise RangeError("offset must satisfy 0 <= offset < k")
    return BitSequence(bits.bits[offset::k])


def duplicate_each_bit(bits: BitSequence, k: int) -> BitSequence:
    """Repeat every bit ``k`` times; inverse of :func:`take_every_kth`."""
    k = int(k)
    if k < 1:
        raise RangeError("k must be >= 1")
    return BitSequence(np.repeat(bits.bits, k))


def pack_bits_to_bytes(bits: BitSequence) -> tuple[bytes, int]:
    """MSB-first byte packing; returns (payload, zero-pad length)."""
    n = len(bits)
    pad = (-n) % 8
    if n == 0:
        return b"", 0
    padded = np.concatenate([bits.bits, np.zeros(pad, dtype=np.uint8)])
    return np.packbits(padded).tobytes(), pad


def unpack_bytes_to_bits(payload: bytes, n_bits: int) -> BitSequence:
    """Inverse of :func:`pack_bits_to_bytes` given the true bit count."""
    if n_bits < 0 or n_bits > 8 * len(payload):
        raise SizeError("bit count inconsistent with payload size")
    if n_bits == 0:
        return BitSequence([])
    arr = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))[:n_bits]
    return BitSequence(arr)


def symbols_to_packed_bytes(series: SymbolSeries) -> bytes:
    """Canonical byte image of a symbol series (width-8 symbols map 1:1)."""
    if series.width == 8:
        return series.symbols.astype(np.uint8).tobytes()
    payload, _ = pack_bits_to_bytes(symbols_to_bits(series))
    return payload


def write_symbol_file(series: SymbolSeries, path) -> None:
    """Serialize a symbol series.

    Width 8 writes the raw bytes with no header (one symbol per byte).  Any
    other width writes a 2-byte header -- magic nibble + width, then the
    zero-pad length -- followed by the MSB-first packed bits.
    """
    path = Path(path)
    if series.width == 8:
        path.write_bytes(series.symbols.astype(np.uint8).tobytes())
        return
    payload, pad = pack_bits_to_bytes(symbols_to_bits(series))
    header = bytes([(_FILE_MAGIC_NIBBLE << 4) | series.width, pad])
    path.write_bytes(header + payload)


def read_symbol_file(path, width: int = 8) -> SymbolSeries:
    """Read back :func:`write_symbol_file` output.

    ``width=8`` interprets the file as raw bytes; other widths require the
    2-byte header written for non-byte alphabets.
    """
    data = Path(path).read_bytes()
    if width == 8:
        return SymbolSeries(np.frombuffer(data, dtype=np.uint8).astype(np.int64), 8)
    if len(data) < 2:
        raise IntegrityError("symbol file too short for a header")
    magic, stored_width = data[0] >> 4, data[0] & 0x0F
    pad = data[1]
    if magic != _FILE_MAGIC_NIBBLE:
        raise IntegrityError("bad magic nibble in symbol file header")
    if stored_width != width:
        raise IntegrityError(f"file width {stored_width} does not match requested {width}")
    if pad > 7:
        raise IntegrityError("invalid padding length in symbol file header")
    n_bits = 8 * (len(data) - 2) - pad
    if n_bits % stored_width:
        raise IntegrityError("payload length inconsistent with symbol width")
    return bits_to_symbols(unpack_bytes_to_bits(data[2:], n_bits), stored_width)


def write_bit_file(bits: BitSequence, path) -> None:
    """Bit sequences serialize as width-1 symbol files (header + packed bits)."""
    write_symbol_file(bits_to_symbols(bits, 1), path)


def read_bit_file(path) -> BitSequence:
    series = read_symbol_file(path, width=1)
    return symbols_to_bits(series)
