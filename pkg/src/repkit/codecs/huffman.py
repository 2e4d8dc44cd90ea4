"""Canonical static Huffman coding over the symbol alphabet.

The header stores one 5-bit code length per alphabet entry (0 = unused), so
the decoder rebuilds the canonical code without any frequency table.  The
canonical-code helpers here are reused by the dictionary coder for its token
alphabets.
"""

from __future__ import annotations

import heapq

import numpy as np

from ..bits import SymbolSeries, bits_to_symbols, symbols_to_packed_bytes, unpack_bytes_to_bits
from ..errors import IntegrityError, RangeError
from .base import (
    BitReader,
    BitWriter,
    CompressionOutcome,
    check_roundtrip_crc,
    frame_blob,
    parse_blob,
    require_nonempty,
)


def unpack_stored_symbols(body: bytes, count: int, width: int) -> SymbolSeries:
    """Decode a stored-mode body (the packed symbol image) back to symbols."""
    expected = count if width == 8 else (count * width + 7) // 8
    if len(body) != expected:
        raise IntegrityError("stored payload length does not match the symbol count")
    if width == 8:
        return SymbolSeries(np.frombuffer(body, dtype=np.uint8).astype(np.int64), 8)
    return bits_to_symbols(unpack_bytes_to_bits(body, count * width), width)

MAX_CODE_LEN = 31
_LEN_FIELD_BITS = 5


def build_code_lengths(freqs: np.ndarray) -> np.ndarray:
    """Huffman code lengths for the given frequency table (0 for unused symbols).

    Lengths are capped at MAX_CODE_LEN by halving frequencies and rebuilding,
    which keeps the code optimal enough for our purposes and always valid.
    """
    freqs = np.asarray(freqs, dtype=np.int64)
    while True:
        lengths = _tree_lengths(freqs)
        if lengths.max(initial=0) <= MAX_CODE_LEN:
            return lengths
        freqs = np.where(freqs > 0, (freqs + 1) // 2, 0)


def _tree_lengths(freqs: np.ndarray) -> np.ndarray:
    used = np.flatnonzero(freqs > 0)
    lengths = np.zeros(freqs.size, dtype=np.int64)
    if used.size == 0:
        return lengths
    if used.size == 1:
        lengths[used[0]] = 1
        return lengths
    # heap items: (freq, tiebreak, node id); internal nodes get ids >= alphabet
    heap = [(int(freqs[s]), int(s), int(s)) for s in used]
    heapq.heapify(heap)
    parent: dict[int, int] = {}
    next_id = freqs.size
    while len(heap) > 1:
        f1, _, n1 = heapq.heappop(heap)
        f2, _, n2 = heapq.heappop(heap)
        parent[n1] = next_id
        parent[n2] = next_id
        heapq.heappush(heap, (f1 + f2, next_id, next_id))
        next_id += 1
    for s in used:
        depth = 0
        node = int(s)
        while node in parent:
            node = parent[node]
            depth += 1
        lengths[s] = depth
    return lengths


def canonical_codes(lengths: np.ndarray) -> np.ndarray:
    """Assign canonical code values: ordered by (length, symbol)."""
    lengths = np.asarray(lengths, dtype=np.int64)
    codes = np.zeros(lengths.size, dtype=np.int64)
    order = sorted((int(l), s) for s, l in enumerate(lengths) if l > 0)
    code = 0
    prev_len = 0
    for length, symbol in order:
        code <<= length - prev_len
        codes[symbol] = code
        code += 1
        prev_len = length
    return codes


class CanonicalDecoder:
    """Per-length first-code tables for O(1)-per-bit canonical decoding."""

    __slots__ = ("first_code", "first_index", "counts", "symbols", "max_len")

    def __init__(self, lengths: np.ndarray):
        lengths = np.asarray(lengths, dtype=np.int64)
        if not (lengths >= 0).all() or lengths.max(initial=0) > MAX_CODE_LEN:
            raise IntegrityError("invalid code length table")
        used = [(int(l), s) for s, l in enumerate(lengths) if l > 0]
        if not used:
            raise IntegrityError("code length table has no symbols")
        kraft = sum(2 ** (MAX_CODE_LEN - l) for l, _ in used)
        if kraft > 2**MAX_CODE_LEN:
            raise IntegrityError("code length table violates the Kraft inequality")
        used.sort()
        self.max_len = used[-1][0]
        self.symbols = [s for _, s in used]
        self.counts = [0] * (self.max_len + 1)
        for l, _ in used:
            self.counts[l] += 1
        self.first_code = [0] * (self.max_len + 2)
        self.first_index = [0] * (self.max_len + 2)
        code = 0
        index = 0
        for l in range(1, self.max_len + 1):
            self.first_code[l] = code
            self.first_index[l] = index
            code = (code + self.counts[l]) << 1
            index += self.counts[l]

    def decode_one(self, reader: BitReader) -> int:
        value = 0
        for length in range(1, self.max_len + 1):
            value = (value << 1) | reader.read_bit()
            offset = value - self.first_code[length]
            if 0 <= offset < self.counts[length]:
                return self.symbols[self.first_index[length] + offset]
        raise IntegrityError("bit pattern matches no canonical code")


def write_length_table(writer: BitWriter, lengths: np.ndarray) -> None:
    for l in lengths:
        writer.write(int(l), _LEN_FIELD_BITS)


def read_length_table(reader: BitReader, alphabet: int) -> np.ndarray:
    return np.array([reader.read(_LEN_FIELD_BITS) for _ in range(alphabet)], dtype=np.int64)


_MODE_STORED = 0
_MODE_CODED = 1


def _encode_payload(series: SymbolSeries) -> bytes:
    if series.width > 16:
        raise RangeError("huffman coding supports symbol widths up to 16 bits")
    alphabet = series.alphabet_size
    freqs = np.bincount(series.symbols, minlength=alphabet)
    lengths = build_code_lengths(freqs)
    codes = canonical_codes(lengths)
    writer = BitWriter()
    write_length_table(writer, lengths)
    code_list = codes.tolist()
    len_list = lengths.tolist()
    for s in series.symbols.tolist():
        writer.write(code_list[s], len_list[s])
    coded = writer.getvalue()
    # On incompressible data the code table is dead weight; fall back to the
    # packed symbols so expansion is bounded by the frame plus one mode byte.
    stored = symbols_to_packed_bytes(series)
    if len(stored) < len(coded):
        return bytes([_MODE_STORED]) + stored
    return bytes([_MODE_CODED]) + coded


def _decode_payload(payload: bytes, count: int, width: int) -> SymbolSeries:
    if not payload:
        raise IntegrityError("huffman payload missing its mode byte")
    mode, body = payload[0], payload[1:]
    if mode == _MODE_STORED:
        return unpack_stored_symbols(body, count, width)
    if mode != _MODE_CODED:
        raise IntegrityError(f"unknown huffman payload mode {mode}")
    reader = BitReader(body)
    lengths = read_length_table(reader, 1 << width)
    decoder = CanonicalDecoder(lengths)
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        out[i] = decoder.decode_one(reader)
    try:
        return SymbolSeries(out, width)
    except RangeError as exc:  # pragma: no cover - SymbolSeries re-checks range
        raise IntegrityError(str(exc)) from None


def huffman_compress(series: SymbolSeries) -> tuple[bytes, CompressionOutcome]:
    require_nonempty(series)
    blob = frame_blob("huffman", series, _encode_payload(series))
    outcome = CompressionOutcome("huffman", len(series) * series.width, 8 * len(blob))
    return blob, outcome


def huffman_decompress(blob: bytes) -> SymbolSeries:
    coder, count, width, crc, payload = parse_blob(blob)
    if coder != "huffman":
        raise IntegrityError(f"blob was produced by the {coder!r} coder")
    return check_roundtrip_crc(_decode_payload(payload, count, width), crc)
