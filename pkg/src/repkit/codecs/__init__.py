"""Self-contained lossless coders and the compression-rate computation.

Four coders span the classic taxonomy: symbol-frequency coding (huffman),
run-length coding (rle), sliding-window dictionary coding (lz) and adaptive
context-mixing arithmetic coding (cm).  All are exactly invertible and all
report sizes with headers included.
"""

from __future__ import annotations

from ..bits import SymbolSeries
from ..errors import DataError
from .base import (
    CODER_IDS,
    CompressionOutcome,
    compression_rate,
    parse_blob,
)
from .cm import cm_compress, cm_decompress
from .huffman import huffman_compress, huffman_decompress
from .lz import lz_compress, lz_decompress
from .rle import rle_compress, rle_decompress

CODERS = {
    "huffman": (huffman_compress, huffman_decompress),
    "rle": (rle_compress, rle_decompress),
    "lz": (lz_compress, lz_decompress),
    "cm": (cm_compress, cm_decompress),
}

ALL_CODERS = tuple(CODERS)


def compress(series: SymbolSeries, coder: str) -> tuple[bytes, CompressionOutcome]:
    try:
        fn = CODERS[coder][0]
    except KeyError:
        raise DataError(f"unknown coder {coder!r}; choose from {sorted(CODERS)}") from None
    return fn(series)


def decompress(blob: bytes) -> SymbolSeries:
    coder, _, _, _, _ = parse_blob(blob)
    return CODERS[coder][1](blob)


__all__ = [
    "ALL_CODERS",
    "CODERS",
    "CODER_IDS",
    "CompressionOutcome",
    "compress",
    "compression_rate",
    "decompress",
    "cm_compress",
    "cm_decompress",
    "huffman_compress",
    "huffman_decompress",
    "lz_compress",
    "lz_decompress",
    "rle_compress",
    "rle_decompress",
]
