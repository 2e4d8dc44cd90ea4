"""Adaptive context-mixing arithmetic coder (the package's strongest probe).

Bits of the packed byte stream are coded MSB-first by a binary arithmetic
coder driven by a logistic mix of six context models: the previous 0..3
bytes combined with the partial current byte, plus two sparse models keyed
on (bit position, previous byte) and (bit position, low 3 bits of the
previous byte).  The sparse pair is what picks up short periodic structure
in the low bits of a byte stream, which full-byte contexts are too
fragmented to learn from realistic sample sizes.

The model is adaptive and starts from a fixed state, so no model data is
stored in the blob; the decoder replays the identical prediction sequence.
All state arithmetic is integer-only (12-bit probabilities, tabulated
stretch/squash, fixed-point mixer weights), making outputs reproducible
across platforms.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

from ..bits import SymbolSeries, bits_to_symbols, symbols_to_packed_bytes, unpack_bytes_to_bits
from ..errors import IntegrityError, NumericError
from .base import (
    CompressionOutcome,
    check_roundtrip_crc,
    frame_blob,
    parse_blob,
    require_nonempty,
)

N_MODELS = 6
COUNT_CAP = 1022         # adaptive counters converge to a 1/1024 update rate
MIX_LR_SHIFT = 10        # mixer learning-rate shift (pinned)
WEIGHT_CLAMP = 1 << 22
_INIT_WEIGHT = 65536 // N_MODELS

# Integer logistic tables: stretch(p) = round(256*ln(p/(4096-p))), squash its inverse.
_LOGIT = np.arange(-2047, 2048, dtype=np.float64)
SQUASH_T = np.clip(
    np.round(4096.0 / (1.0 + np.exp(-_LOGIT / 256.0))), 1, 4095
).astype(np.int32)
_P = np.arange(4096, dtype=np.float64)
with np.errstate(divide="ignore"):
    _S = 256.0 * np.log(np.where(_P < 1, 1, _P) / np.maximum(4096.0 - _P, 1.0))
STRETCH_T = np.clip(np.round(_S), -2047, 2047).astype(np.int32)
STRETCH_T[0] = -2047


def _hashed_table_bits(n_bytes: int) -> int:
    """Table size for the hashed order-2/3 contexts, deterministic in n."""
    return max(12, min(20, int(n_bytes * 32).bit_length()))


def _table_layout(n_bytes: int) -> tuple[np.ndarray, int]:
    hashed = 1 << _hashed_table_bits(n_bytes)
    sizes = [256, 65536, hashed, hashed, 64, 2048]
    offsets = np.zeros(N_MODELS + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    return offsets, hashed - 1


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, nogil=True)
def _cm_run(decode, src, dst, n_bytes, stretch_t, squash_t, p_all, cnt_all, offs, hmask, w):
    """Shared encode/decode loop; returns bytes written (encode), n (decode), -1 on overflow."""
    GOLD = uint64(0x9E3779B97F4A7C15)
    GOLD2 = uint64(0xC2B2AE3D27D4EB4F)
    MASK32 = uint64(0xFFFFFFFF)
    TOP = uint64(0xFF000000)

    x1 = uint64(0)
    x2 = MASK32
    x = uint64(0)
    src_pos = 0
    dst_pos = 0
    if decode:
        for _ in range(4):
            b = uint64(src[src_pos]) if src_pos < src.size else uint64(0)
            src_pos += 1
            x = ((x << uint64(8)) | b) & MASK32

    sts = np.empty(N_MODELS, dtype=np.int64)
    idxs = np.empty(N_MODELS, dtype=np.int64)
    prev1 = 0
    prev2 = 0
    prev3 = 0

    for i in range(n_bytes):
        byte = 0 if decode else np.int64(src[i])
        h2 = _mix64(uint64(prev1) + (uint64(prev2) << uint64(8)) + uint64(0x2000000000))
        h3 = _mix64(
            uint64(prev1)
            + (uint64(prev2) << uint64(8))
            + (uint64(prev3) << uint64(16))
            + uint64(0x3000000000)
        )
        c0 = 1
        for bit in range(8):
            idxs[0] = c0
            idxs[1] = (prev1 << 8) | c0
            t2 = h2 ^ (uint64(c0) * GOLD)
            t2 ^= t2 >> uint64(29)
            idxs[2] = np.int64(t2 & hmask)
            t3 = h3 ^ (uint64(c0) * GOLD2)
            t3 ^= t3 >> uint64(31)
            idxs[3] = np.int64(t3 & hmask)
            idxs[4] = (bit << 3) | (prev1 & 7)
            idxs[5] = (bit << 8) | prev1

            wbase = bit * N_MODELS
            dot = np.int64(0)
            for k in range(N_MODELS):
                j = offs[k] + idxs[k]
                if cnt_all[j] == 0:
                    sts[k] = 0  # never-seen context: abstain instead of asserting 1/2
                    continue
                p12 = p_all[j] >> 4
                if p12 < 1:
                    p12 = 1
                elif p12 > 4095:
                    p12 = 4095
                st = np.int64(stretch_t[p12])
                sts[k] = st
                dot += w[wbase + k] * st
            logit = dot >> 16
            if logit < -2047:
                logit = -2047
            elif logit > 2047:
                logit = 2047
            p = np.int64(squash_t[logit + 2047])

            # arithmetic-code one bit at probability p/4096 of a 1
            xmid = x1 + ((x2 - x1) >> uint64(12)) * uint64(p)
            if decode:
                y = 1 if x <= xmid else 0
            else:
                y = (byte >> (7 - bit)) & 1
            if y:
                x2 = xmid
            else:
                x1 = xmid + uint64(1)
            while ((x1 ^ x2) & TOP) == uint64(0):
                if not decode:
                    if dst_pos >= dst.size:
                        return -1
                    dst[dst_pos] = np.uint8(x2 >> uint64(24))
                    dst_pos += 1
                x1 = (x1 << uint64(8)) & MASK32
                x2 = ((x2 << uint64(8)) & MASK32) | uint64(0xFF)
                if decode:
                    b = uint64(src[src_pos]) if src_pos < src.size else uint64(0)
                    src_pos += 1
                    x = ((x << uint64(8)) | b) & MASK32

            err = (y << 12) - p
            for k in range(N_MODELS):
                wi = w[wbase + k] + ((sts[k] * err) >> MIX_LR_SHIFT)
                if wi > WEIGHT_CLAMP:
                    wi = WEIGHT_CLAMP
                elif wi < -WEIGHT_CLAMP:
                    wi = -WEIGHT_CLAMP
                w[wbase + k] = wi
                j = offs[k] + idxs[k]
                cnt = np.int64(cnt_all[j])
                p_all[j] += (y * 65535 - p_all[j]) // (cnt + 2)
                if cnt < COUNT_CAP:
                    cnt_all[j] = np.uint16(cnt + 1)

            c0 = (c0 << 1) | y

        if decode:
            byte = c0 - 256
            dst[i] = np.uint8(byte)
        prev3 = prev2
        prev2 = prev1
        prev1 = byte

    if decode:
        return n_bytes
    # flush: emit the low end of the final interval so the decoder lands inside it
    for shift in (24, 16, 8, 0):
        if dst_pos >= dst.size:
            return -1
        dst[dst_pos] = np.uint8((x1 >> uint64(shift)) & uint64(0xFF))
        dst_pos += 1
    return dst_pos


def _fresh_state(n_bytes: int):
    offs, hmask = _table_layout(n_bytes)
    p_all = np.full(int(offs[-1]), 32768, dtype=np.int64)
    cnt_all = np.zeros(int(offs[-1]), dtype=np.uint16)
    weights = np.full(8 * N_MODELS, _INIT_WEIGHT, dtype=np.int64)
    return offs, np.uint64(hmask), p_all, cnt_all, weights


def cm_encode_bytes(data: bytes) -> bytes:
    """Compress a raw byte stream; the blob framing is added by the caller."""
    arr = np.frombuffer(data, dtype=np.uint8)
    capacity = 2 * arr.size + 1024
    for _ in range(2):
        offs, hmask, p_all, cnt_all, weights = _fresh_state(arr.size)
        out = np.empty(capacity, dtype=np.uint8)
        written = _cm_run(
            False, arr, out, arr.size, STRETCH_T, SQUASH_T, p_all, cnt_all, offs, hmask, weights
        )
        if written >= 0:
            return out[:written].tobytes()
        capacity = 16 * arr.size + 65536
    raise NumericError("context-mixing encoder exceeded its worst-case output bound")


def cm_decode_bytes(payload: bytes, n_bytes: int) -> bytes:
    arr = np.frombuffer(payload, dtype=np.uint8)
    offs, hmask, p_all, cnt_all, weights = _fresh_state(n_bytes)
    out = np.empty(n_bytes, dtype=np.uint8)
    _cm_run(True, arr, out, n_bytes, STRETCH_T, SQUASH_T, p_all, cnt_all, offs, hmask, weights)
    return out.tobytes()


def cm_compress(series: SymbolSeries) -> tuple[bytes, CompressionOutcome]:
    require_nonempty(series)
    payload = cm_encode_bytes(symbols_to_packed_bytes(series))
    blob = frame_blob("cm", series, payload)
    return blob, CompressionOutcome("cm", len(series) * series.width, 8 * len(blob))


def cm_decompress(blob: bytes) -> SymbolSeries:
    coder, count, width, crc, payload = parse_blob(blob)
    if coder != "cm":
        raise IntegrityError(f"blob was produced by the {coder!r} coder")
    n_bytes = count if width == 8 else (count * width + 7) // 8
    raw = cm_decode_bytes(payload, n_bytes)
    if width == 8:
        series = SymbolSeries(np.frombuffer(raw, dtype=np.uint8).astype(np.int64), 8)
    else:
        series = bits_to_symbols(unpack_bytes_to_bits(raw, count * width), width)
    return check_roundtrip_crc(series, crc)
