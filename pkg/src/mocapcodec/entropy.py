"""Lossless coding of signed integer sequences.

Layering: signed values are zigzag-mapped to unsigned (0, -1, 1, -2, ...
becomes 0, 1, 2, 3, ...), written as little-endian base-128 varints, and
the resulting byte stream is either stored as-is (``raw`` backend) or
squeezed through an adaptive order-0 arithmetic coder over byte symbols
(``arithmetic`` backend).

The arithmetic coder is a 32-bit renormalizing range coder with an
adaptive frequency model: all 256 byte counts start at 1, the coded
symbol's count is incremented by 32, and every count is halved (floor,
minimum 1) whenever the total reaches 2**16.  Cumulative frequencies live
in a binary-indexed (Fenwick) tree so both the encoder's prefix sums and
the decoder's symbol search are logarithmic.  Every constant here is part
of the stream format: changing one breaks decoding of existing streams.

A coded blob is self-describing:

    backend tag (1 byte) | varint element count
    | raw: varint bytes / arithmetic: varint byte count + coded bytes
    | CRC32 of everything preceding (4 bytes, little-endian)
"""

from __future__ import annotations

import struct
import zlib

import numpy as np
from numba import njit

from .errors import StreamError

BACKENDS = ("raw", "arithmetic")
_TAG = {"raw": 0, "arithmetic": 1}

_MASK = (1 << 32) - 1
_TOP = 1 << 31
_SECOND = 1 << 30
_INCREMENT = 32
_TOTAL_LIMIT = 1 << 16


def zigzag_encode(values: np.ndarray) -> np.ndarray:
    """Map int64 to uint64 with small magnitudes staying small."""
    v = np.ascontiguousarray(values, dtype=np.int64)
    return ((v << 1) ^ (v >> 63)).view(np.uint64)


def zigzag_decode(codes: np.ndarray) -> np.ndarray:
    z = np.ascontiguousarray(codes, dtype=np.uint64)
    return (z >> np.uint64(1)).view(np.int64) ^ -((z & np.uint64(1)).astype(np.int64))


@njit(cache=True)
def _varint_encode(vals):
    out = np.empty(vals.shape[0] * 10, np.uint8)
    p = 0
    for i in range(vals.shape[0]):
        v = vals[i]
        while v >= np.uint64(0x80):
            out[p] = np.uint8((v & np.uint64(0x7F)) | np.uint64(0x80))
            p += 1
            v = v >> np.uint64(7)
        out[p] = np.uint8(v)
        p += 1
    return out[:p].copy()


@njit(cache=True)
def _varint_decode(data, start, count):
    """Returns (values, end). end is -1 on truncation, -2 on a 64-bit overflow."""
    vals = np.empty(count, np.uint64)
    p = start
    nbytes = data.shape[0]
    for i in range(count):
        v = np.uint64(0)
        shift = 0
        while True:
            if p >= nbytes:
                return vals, -1
            if shift >= 64:
                return vals, -2
            b = data[p]
            p += 1
            v = v | (np.uint64(b & 0x7F) << np.uint64(shift))
            if b < 0x80:
                if shift == 63 and (b & 0x7F) > 1:
                    return vals, -2
                break
            shift += 7
        vals[i] = v
    return vals, p


@njit(cache=True)
def _fenwick_build(counts, tree):
    for i in range(tree.shape[0]):
        tree[i] = 0
    for i in range(counts.shape[0]):
        j = i + 1
        tree[j] += counts[i]
        parent = j + (j & (-j))
        if parent < tree.shape[0]:
            tree[parent] += tree[j]


@njit(cache=True)
def _fenwick_prefix(tree, i):
    s = 0
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


@njit(cache=True)
def _fenwick_add(tree, i, delta):
    j = i + 1
    while j < tree.shape[0]:
        tree[j] += delta
        j += j & (-j)


@njit(cache=True)
def _adapt(counts, tree, s, total):
    counts[s] += _INCREMENT
    _fenwick_add(tree, s, _INCREMENT)
    total += _INCREMENT
    if total >= _TOTAL_LIMIT:
        total = 0
        for i in range(256):
            c = counts[i] >> 1
            if c == 0:
                c = 1
            counts[i] = c
            total += c
        _fenwick_build(counts, tree)
    return total


@njit(cache=True)
def _emit_bits(out, st, bit, n_complements):
    """Append `bit` then n_complements of its inverse; st = [byte, nbits, len]."""
    for t in range(n_complements + 1):
        b = bit if t == 0 else bit ^ 1
        st[0] = (st[0] << 1) | b
        st[1] += 1
        if st[1] == 8:
            if st[2] >= out.shape[0]:
                grown = np.empty(out.shape[0] * 2, np.uint8)
                grown[: out.shape[0]] = out
                out = grown
            out[st[2]] = st[0]
            st[2] += 1
            st[0] = 0
            st[1] = 0
    return out


@njit(cache=True)
def _ac_encode(data):
    out = np.empty(64 + 2 * data.shape[0], np.uint8)
    st = np.zeros(3, np.int64)  # current byte, bits in it, bytes written
    counts = np.ones(256, np.int64)
    tree = np.zeros(257, np.int64)
    _fenwick_build(counts, tree)
    total = 256

    low = 0
    high = _MASK
    underflow = 0
    for idx in range(data.shape[0]):
        s = data[idx]
        symlow = _fenwick_prefix(tree, s)
        symhigh = symlow + counts[s]
        rng = high - low + 1
        high = low + symhigh * rng // total - 1
        low = low + symlow * rng // total
        while ((low ^ high) & _TOP) == 0:
            out = _emit_bits(out, st, (low >> 31) & 1, underflow)
            underflow = 0
            low = (low << 1) & _MASK
            high = ((high << 1) & _MASK) | 1
        while (low & ~high & _SECOND) != 0:
            underflow += 1
            low = (low << 1) & (_MASK >> 1)
            high = ((high << 1) & (_MASK >> 1)) | _TOP | 1
        total = _adapt(counts, tree, s, total)

    # One 1-bit pins the final range; the decoder reads zeros past the end.
    out = _emit_bits(out, st, 1, 0)
    while st[1] != 0:
        out = _emit_bits(out, st, 0, 0)
    return out[: st[2]].copy()


@njit(cache=True)
def _ac_decode(coded, n):
    out = np.empty(n, np.uint8)
    counts = np.ones(256, np.int64)
    tree = np.zeros(257, np.int64)
    _fenwick_build(counts, tree)
    total = 256

    nbits = coded.shape[0] * 8
    low = 0
    high = _MASK
    code = 0
    bitpos = 0
    for _ in range(32):
        bit = (coded[bitpos >> 3] >> (7 - (bitpos & 7))) & 1 if bitpos < nbits else 0
        code = (code << 1) | bit
        bitpos += 1

    for idx in range(n):
        rng = high - low + 1
        offset = code - low
        value = ((offset + 1) * total - 1) // rng
        # Binary-indexed descend: largest s with prefix(s) <= value.
        pos = 0
        rem = value
        bitmask = 256
        while bitmask != 0:
            npos = pos + bitmask
            if npos <= 256 and tree[npos] <= rem:
                pos = npos
                rem -= tree[npos]
            bitmask >>= 1
        s = pos
        out[idx] = s
        symlow = value - rem
        symhigh = symlow + counts[s]
        high = low + symhigh * rng // total - 1
        low = low + symlow * rng // total
        while ((low ^ high) & _TOP) == 0:
            bit = (coded[bitpos >> 3] >> (7 - (bitpos & 7))) & 1 if bitpos < nbits else 0
            bitpos += 1
            code = ((code << 1) & _MASK) | bit
            low = (low << 1) & _MASK
            high = ((high << 1) & _MASK) | 1
        while (low & ~high & _SECOND) != 0:
            bit = (coded[bitpos >> 3] >> (7 - (bitpos & 7))) & 1 if bitpos < nbits else 0
            bitpos += 1
            code = (code & _TOP) | ((code << 1) & (_MASK >> 1)) | bit
            low = (low << 1) & (_MASK >> 1)
            high = ((high << 1) & (_MASK >> 1)) | _TOP | 1
        total = _adapt(counts, tree, s, total)
    return out


def _single_varint(value: int) -> bytes:
    return _varint_encode(np.array([value], dtype=np.uint64)).tobytes()


def _read_varint(data: np.ndarray, pos: int) -> tuple[int, int]:
    vals, end = _varint_decode(data, pos, 1)
    if end == -1:
        raise StreamError("entropy stream truncated inside a varint")
    if end == -2:
        raise StreamError("varint exceeds 64 bits")
    return int(vals[0]), int(end)


def entropy_encode(values, backend: str = "arithmetic") -> bytes:
    """Losslessly code a sequence of signed 64-bit integers into a blob."""
    if backend not in _TAG:
        raise ValueError(f"unknown backend {backend!r}, expected one of {BACKENDS}")
    vals = np.ascontiguousarray(values, dtype=np.int64).ravel()
    body = _varint_encode(zigzag_encode(vals))
    parts = [bytes([_TAG[backend]]), _single_varint(vals.size)]
    if backend == "arithmetic":
        parts.append(_single_varint(body.size))
        parts.append(_ac_encode(body).tobytes())
    else:
        parts.append(body.tobytes())
    blob = b"".join(parts)
    return blob + struct.pack("<I", zlib.crc32(blob))


def entropy_decode(blob: bytes) -> np.ndarray:
    """Inverse of :func:`entropy_encode`; raises StreamError on any corruption."""
    if len(blob) < 6:
        raise StreamError("entropy stream too short")
    (stored_crc,) = struct.unpack("<I", blob[-4:])
    if zlib.crc32(blob[:-4]) != stored_crc:
        raise StreamError("entropy stream checksum mismatch")
    data = np.frombuffer(blob[:-4], dtype=np.uint8)
    tag = int(data[0])
    if tag not in (0, 1):
        raise StreamError(f"unknown entropy backend tag {tag}")
    count, pos = _read_varint(data, 1)

    try:
        if tag == 1:
            n_body, pos = _read_varint(data, pos)
            # every value occupies 1..10 varint bytes
            if not count <= n_body <= 10 * count:
                raise StreamError(f"byte count {n_body} impossible for {count} values")
            body = _ac_decode(data[pos:], n_body)
        else:
            body = data[pos:]
            if count > body.shape[0]:
                raise StreamError(f"{count} values cannot fit in {body.shape[0]} bytes")
    except MemoryError:
        raise StreamError("declared sizes exceed available memory") from None
    codes, end = _varint_decode(body, 0, count)
    if end == -1:
        raise StreamError("entropy stream truncated")
    if end == -2:
        raise StreamError("varint exceeds 64 bits")
    if tag == 0 and end != body.shape[0]:
        raise StreamError(f"{body.shape[0] - end} trailing bytes after the last value")
    return zigzag_decode(codes)
