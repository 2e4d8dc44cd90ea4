"""Run-length coding: escape-free (symbol, run length) records.

Symbols are stored in as many whole bytes as the alphabet needs and run
lengths as 7-bit varints, so the format is trivially invertible and its
worst case (no runs at all) is an exact, predictable expansion.
"""

from __future__ import annotations

import numpy as np

from ..bits import SymbolSeries
from ..errors import IntegrityError
from .base import (
    CompressionOutcome,
    check_roundtrip_crc,
    frame_blob,
    parse_blob,
    require_nonempty,
)


def _write_varint(buf: bytearray, value: int) -> None:
    while True:
        chunk = value & 0x7F
        value >>= 7
        if value:
            buf.append(chunk | 0x80)
        else:
            buf.append(chunk)
            return


def _read_varint(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise IntegrityError("varint truncated")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7
        if shift > 63:
            raise IntegrityError("varint too long")


def _encode_payload(series: SymbolSeries) -> bytes:
    sym_bytes = (series.width + 7) // 8
    values = series.symbols
    boundaries = np.flatnonzero(np.diff(values) != 0) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [values.size]))
    buf = bytearray()
    for start, end in zip(starts.tolist(), ends.tolist()):
        buf.extend(int(values[start]).to_bytes(sym_bytes, "big"))
        _write_varint(buf, end - start)
    return bytes(buf)


def _decode_payload(payload: bytes, count: int, width: int) -> SymbolSeries:
    sym_bytes = (width + 7) // 8
    symbols: list[int] = []
    runs: list[int] = []
    pos = 0
    total = 0
    while total < count:
        if pos + sym_bytes > len(payload):
            raise IntegrityError("run record truncated")
        symbol = int.from_bytes(payload[pos : pos + sym_bytes], "big")
        pos += sym_bytes
        run, pos = _read_varint(payload, pos)
        if run <= 0:
            raise IntegrityError("non-positive run length")
        symbols.append(symbol)
        runs.append(run)
        total += run
    if total != count:
        raise IntegrityError("run lengths do not add up to the symbol count")
    out = np.repeat(np.array(symbols, dtype=np.int64), np.array(runs, dtype=np.int64))
    if out.size and out.max() >= (1 << width):
        raise IntegrityError("decoded symbol exceeds alphabet")
    return SymbolSeries(out, width)


def rle_compress(series: SymbolSeries) -> tuple[bytes, CompressionOutcome]:
    require_nonempty(series)
    blob = frame_blob("rle", series, _encode_payload(series))
    return blob, CompressionOutcome("rle", len(series) * series.width, 8 * len(blob))


def rle_decompress(blob: bytes) -> SymbolSeries:
    coder, count, width, crc, payload = parse_blob(blob)
    if coder != "rle":
        raise IntegrityError(f"blob was produced by the {coder!r} coder")
    return check_roundtrip_crc(_decode_payload(payload, count, width), crc)
