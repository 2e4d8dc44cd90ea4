"""Sliding-window dictionary coder over the packed byte stream.

Greedy LZSS parse (32 KiB window, matches of 3..258 bytes found through hash
chains) followed by canonical-Huffman coding of the token streams, with
length and distance values binned into code + extra-bits classes.  Literals
on incompressible data therefore cost ~8 bits plus a small table header,
instead of the 9 bits a flag-per-literal scheme would burn.
"""

from __future__ import annotations

import numpy as np

from ..bits import SymbolSeries, bits_to_symbols, symbols_to_packed_bytes, unpack_bytes_to_bits
from ..errors import IntegrityError
from .base import (
    BitReader,
    BitWriter,
    CompressionOutcome,
    check_roundtrip_crc,
    frame_blob,
    parse_blob,
    require_nonempty,
)
from .huffman import (
    CanonicalDecoder,
    build_code_lengths,
    canonical_codes,
    read_length_table,
    write_length_table,
)

WINDOW = 1 << 15
MIN_MATCH = 3
MAX_MATCH = 258
_CHAIN_LIMIT = 64

_EOB = 256
_LITLEN_ALPHABET = 286
_DIST_ALPHABET = 30

_LENGTH_BASE = (
    3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31, 35, 43, 51, 59,
    67, 83, 99, 115, 131, 163, 195, 227, 258,
)
_LENGTH_EXTRA = (
    0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3,
    4, 4, 4, 4, 5, 5, 5, 5, 0,
)
_DIST_BASE = (
    1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193, 257, 385,
    513, 769, 1025, 1537, 2049, 3073, 4097, 6145, 8193, 12289, 16385, 24577,
)
_DIST_EXTRA = (
    0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8,
    9, 9, 10, 10, 11, 11, 12, 12, 13, 13,
)


def _length_code(length: int) -> int:
    for code in range(len(_LENGTH_BASE) - 1, -1, -1):
        if length >= _LENGTH_BASE[code]:
            return code
    raise AssertionError("length below MIN_MATCH")


def _dist_code(dist: int) -> int:
    for code in range(len(_DIST_BASE) - 1, -1, -1):
        if dist >= _DIST_BASE[code]:
            return code
    raise AssertionError("distance below 1")


def _parse(data: bytes) -> list[tuple]:
    """Greedy LZSS parse into ('lit', byte) and ('match', length, dist) tokens."""
    n = len(data)
    tokens: list[tuple] = []
    head = [-1] * 65536
    prev = [-1] * n
    i = 0
    while i < n:
        best_len = 0
        best_dist = 0
        if i + MIN_MATCH <= n:
            h = ((data[i] << 16) | (data[i + 1] << 8) | data[i + 2]) * 2654435761 >> 16 & 0xFFFF
            candidate = head[h]
            chain = 0
            limit = min(MAX_MATCH, n - i)
            while candidate >= 0 and i - candidate <= WINDOW and chain < _CHAIN_LIMIT:
                length = 0
                while length < limit and data[candidate + length] == data[i + length]:
                    length += 1
                if length > best_len:
                    best_len = length
                    best_dist = i - candidate
                    if length == limit:
                        break
                candidate = prev[candidate]
                chain += 1
            prev[i] = head[h]
            head[h] = i
        if best_len >= MIN_MATCH:
            tokens.append(("match", best_len, best_dist))
            # register skipped positions so later matches can reach them
            stop = min(i + best_len, n - MIN_MATCH + 1)
            for j in range(i + 1, stop):
                hj = ((data[j] << 16) | (data[j + 1] << 8) | data[j + 2]) * 2654435761 >> 16 & 0xFFFF
                prev[j] = head[hj]
                head[hj] = j
            i += best_len
        else:
            tokens.append(("lit", data[i]))
            i += 1
    return tokens


_MODE_STORED = 0
_MODE_CODED = 1


def _encode_bytes(data: bytes) -> bytes:
    coded = _encode_tokens(data)
    if len(data) < len(coded):
        return bytes([_MODE_STORED]) + data
    return bytes([_MODE_CODED]) + coded


def _encode_tokens(data: bytes) -> bytes:
    tokens = _parse(data)
    litlen_freq = np.zeros(_LITLEN_ALPHABET, dtype=np.int64)
    dist_freq = np.zeros(_DIST_ALPHABET, dtype=np.int64)
    litlen_freq[_EOB] = 1
    sym_tokens: list[tuple] = []
    for token in tokens:
        if token[0] == "lit":
            litlen_freq[token[1]] += 1
            sym_tokens.append((token[1], None))
        else:
            _, length, dist = token
            lcode = _length_code(length)
            dcode = _dist_code(dist)
            litlen_freq[257 + lcode] += 1
            dist_freq[dcode] += 1
            sym_tokens.append((257 + lcode, (length, lcode, dist, dcode)))

    litlen_lengths = build_code_lengths(litlen_freq)
    dist_lengths = build_code_lengths(dist_freq)
    litlen_code = canonical_codes(litlen_lengths)
    dist_code = canonical_codes(dist_lengths)

    writer = BitWriter()
    write_length_table(writer, litlen_lengths)
    write_length_table(writer, dist_lengths)
    for symbol, extra in sym_tokens:
        writer.write(int(litlen_code[symbol]), int(litlen_lengths[symbol]))
        if extra is not None:
            length, lcode, dist, dcode = extra
            if _LENGTH_EXTRA[lcode]:
                writer.write(length - _LENGTH_BASE[lcode], _LENGTH_EXTRA[lcode])
            writer.write(int(dist_code[dcode]), int(dist_lengths[dcode]))
            if _DIST_EXTRA[dcode]:
                writer.write(dist - _DIST_BASE[dcode], _DIST_EXTRA[dcode])
    writer.write(int(litlen_code[_EOB]), int(litlen_lengths[_EOB]))
    return writer.getvalue()


def _decode_bytes(payload: bytes, n_bytes: int) -> bytes:
    if not payload:
        raise IntegrityError("lz payload missing its mode byte")
    mode, body = payload[0], payload[1:]
    if mode == _MODE_STORED:
        if len(body) != n_bytes:
            raise IntegrityError("stored payload length does not match the stream length")
        return body
    if mode != _MODE_CODED:
        raise IntegrityError(f"unknown lz payload mode {mode}")
    return _decode_tokens(body, n_bytes)


def _decode_tokens(payload: bytes, n_bytes: int) -> bytes:
    reader = BitReader(payload)
    litlen_lengths = read_length_table(reader, _LITLEN_ALPHABET)
    dist_lengths = read_length_table(reader, _DIST_ALPHABET)
    litlen_decoder = CanonicalDecoder(litlen_lengths)
    dist_decoder = CanonicalDecoder(dist_lengths) if dist_lengths.max(initial=0) > 0 else None
    out = bytearray()
    while True:
        symbol = litlen_decoder.decode_one(reader)
        if symbol == _EOB:
            break
        if symbol < 256:
            out.append(symbol)
            continue
        lcode = symbol - 257
        if lcode >= len(_LENGTH_BASE):
            raise IntegrityError("invalid length code")
        length = _LENGTH_BASE[lcode] + (
            reader.read(_LENGTH_EXTRA[lcode]) if _LENGTH_EXTRA[lcode] else 0
        )
        if dist_decoder is None:
            raise IntegrityError("match token but no distance code table")
        dcode = dist_decoder.decode_one(reader)
        dist = _DIST_BASE[dcode] + (reader.read(_DIST_EXTRA[dcode]) if _DIST_EXTRA[dcode] else 0)
        if dist > len(out):
            raise IntegrityError("match distance reaches before the stream start")
        start = len(out) - dist
        for k in range(length):  # overlapping copies must proceed byte-wise
            out.append(out[start + k])
        if len(out) > n_bytes:
            raise IntegrityError("decoded stream longer than declared")
    if len(out) != n_bytes:
        raise IntegrityError("decoded stream shorter than declared")
    return bytes(out)


def _payload_byte_count(count: int, width: int) -> int:
    return count if width == 8 else (count * width + 7) // 8


def lz_compress(series: SymbolSeries) -> tuple[bytes, CompressionOutcome]:
    require_nonempty(series)
    data = symbols_to_packed_bytes(series)
    blob = frame_blob("lz", series, _encode_bytes(data))
    return blob, CompressionOutcome("lz", len(series) * series.width, 8 * len(blob))


def lz_decompress(blob: bytes) -> SymbolSeries:
    coder, count, width, crc, payload = parse_blob(blob)
    if coder != "lz":
        raise IntegrityError(f"blob was produced by the {coder!r} coder")
    raw = _decode_bytes(payload, _payload_byte_count(count, width))
    if width == 8:
        series = SymbolSeries(np.frombuffer(raw, dtype=np.uint8).astype(np.int64), 8)
    else:
        series = bits_to_symbols(unpack_bytes_to_bits(raw, count * width), width)
    return check_roundtrip_crc(series, crc)
