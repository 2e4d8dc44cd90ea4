"""Common framing, outcome records and registry for the lossless coders.

Every compressed blob is self-describing and carries *all* side information
inside its byte count: 4-byte magic, coder id, original bit length, CRC of
the source stream, symbol width, then the coder payload.  Rates are computed
against the full blob size, headers included -- an incompressible input must
therefore come out with a (slightly) negative rate, never a flattering one.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from ..bits import SymbolSeries, symbols_to_packed_bytes
from ..errors import DomainError, IntegrityError, SizeError

MAGIC = b"RPK1"
_HEADER = struct.Struct(">4sBQIB")  # magic, coder id, original bits, crc32, width

CODER_IDS = {"huffman": 1, "rle": 2, "lz": 3, "cm": 4}
CODER_NAMES = {v: k for k, v in CODER_IDS.items()}


@dataclass(frozen=True)
class CompressionOutcome:
    """Sizes and rate for one coder run; compressed size includes all headers."""

    coder_id: str
    original_bits: int
    compressed_bits: int

    @property
    def rate(self) -> float:
        return compression_rate(self.original_bits, self.compressed_bits)


def compression_rate(original_bits: int, compressed_bits: int) -> float:
    """(original - compressed) / original; negative when coding expands."""
    if original_bits <= 0:
        raise DomainError("original size must be positive")
    return (original_bits - compressed_bits) / original_bits


def stream_crc(series: SymbolSeries) -> int:
    return zlib.crc32(symbols_to_packed_bytes(series)) & 0xFFFFFFFF


def frame_blob(coder: str, series: SymbolSeries, payload: bytes) -> bytes:
    header = _HEADER.pack(
        MAGIC, CODER_IDS[coder], len(series) * series.width, stream_crc(series), series.width
    )
    return header + payload


def parse_blob(blob: bytes) -> tuple[str, int, int, int, bytes]:
    """Split a blob into (coder name, symbol count, width, crc, payload)."""
    if len(blob) < _HEADER.size:
        raise IntegrityError("blob shorter than its header")
    magic, coder_id, original_bits, crc, width = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise IntegrityError("bad magic; not a compressed blob")
    if coder_id not in CODER_NAMES:
        raise IntegrityError(f"unknown coder id {coder_id}")
    if width < 1 or width > 32 or original_bits % width:
        raise IntegrityError("header width inconsistent with original bit length")
    return CODER_NAMES[coder_id], original_bits // width, width, crc, blob[_HEADER.size :]


def check_roundtrip_crc(series: SymbolSeries, expected_crc: int) -> SymbolSeries:
    if stream_crc(series) != expected_crc:
        raise IntegrityError("decoded stream fails its checksum; blob is corrupt")
    return series


def require_nonempty(series: SymbolSeries) -> None:
    if len(series) == 0:
        raise SizeError("cannot compress an empty series")


class BitWriter:
    """MSB-first bit packer used by the symbol coders."""

    __slots__ = ("_buf", "_acc", "_nbits")

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, nbits: int) -> None:
        self._acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            self._buf.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def getvalue(self) -> bytes:
        if self._nbits:
            return bytes(self._buf) + bytes([(self._acc << (8 - self._nbits)) & 0xFF])
        return bytes(self._buf)


class BitReader:
    """MSB-first bit reader; raises IntegrityError past the end."""

    __slots__ = ("_data", "_pos", "_nbits")

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0
        self._nbits = 8 * len(data)

    def read(self, nbits: int) -> int:
        if self._pos + nbits > self._nbits:
            raise IntegrityError("bit stream truncated")
        value = 0
        pos = self._pos
        data = self._data
        for _ in range(nbits):
            value = (value << 1) | ((data[pos >> 3] >> (7 - (pos & 7))) & 1)
            pos += 1
        self._pos = pos
        return value

    def read_bit(self) -> int:
        if self._pos >= self._nbits:
            raise IntegrityError("bit stream truncated")
        bit = (self._data[self._pos >> 3] >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit
