"""Binary container for a compressed sequence.

Layout, all little-endian, in order:

    magic   4s   "MTC1"
    version u8   (currently 1)
    flags   u8   bit0: database mode (K bases), bit1: entropy backend
                 (0 = raw, 1 = arithmetic)
    n       u16  marker count
    f       u32  original frame count (for reporting; f_used frames decode)
    f_used  u32  frames actually coded
    rate    f32  frame rate, 0 when absent
    N       u32  clip count
    K       u16  basis count
    k       u16  retained components per basis
    clip table, N entries of (L_i u32, l_i u16, Q_i u8, basis_index u8)
    basis block: K * (3n * k) i16 values, row-major per basis
    coefficient block: payload byte length u64, then the entropy blob
    crc32   u32  over every preceding byte

The container is self-describing: decoding needs no encoder-side state.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import StreamError

MAGIC = b"MTC1"
VERSION = 1

FLAG_DATABASE = 0x01
FLAG_ARITHMETIC = 0x02

_HEAD = struct.Struct("<4sBBHIIfIHH")
_CLIP = struct.Struct("<IHBB")


@dataclass(frozen=True)
class ClipEntry:
    length: int
    l: int
    Q: int
    basis_index: int


@dataclass(frozen=True)
class ParsedStream:
    version: int
    database_mode: bool
    backend: str
    n: int
    f: int
    f_used: int
    frame_rate: float | None
    k: int
    clips: tuple[ClipEntry, ...]
    bases: tuple[np.ndarray, ...]  # int16 arrays of shape (3n, k)
    payload: bytes

    @property
    def N(self) -> int:
        return len(self.clips)

    @property
    def K(self) -> int:
        return len(self.bases)


def pack_stream(
    *,
    n: int,
    f: int,
    f_used: int,
    frame_rate: float | None,
    k: int,
    clips: list[ClipEntry],
    bases: list[np.ndarray],
    payload: bytes,
    backend: str,
    database_mode: bool,
) -> bytes:
    if not 1 <= n <= 0xFFFF:
        raise ValueError(f"n={n} does not fit the header")
    if not 1 <= k <= 0xFFFF:
        raise ValueError(f"k={k} does not fit the header")
    if not 1 <= len(bases) <= 256:
        raise ValueError(f"K={len(bases)} out of range [1, 256] (clip indices are one byte)")
    flags = (FLAG_DATABASE if database_mode else 0) | (FLAG_ARITHMETIC if backend == "arithmetic" else 0)
    out = [
        _HEAD.pack(
            MAGIC,
            VERSION,
            flags,
            n,
            f,
            f_used,
            float(frame_rate) if frame_rate else 0.0,
            len(clips),
            len(bases),
            k,
        )
    ]
    for c in clips:
        if not 0 <= c.basis_index < len(bases):
            raise ValueError(f"basis index {c.basis_index} out of range")
        out.append(_CLIP.pack(c.length, c.l, c.Q, c.basis_index))
    for B in bases:
        B = np.ascontiguousarray(B, dtype=np.int16)
        if B.shape != (3 * n, k):
            raise ValueError(f"basis shape {B.shape} != ({3 * n}, {k})")
        out.append(B.astype("<i2", copy=False).tobytes())
    out.append(struct.pack("<Q", len(payload)))
    out.append(payload)
    body = b"".join(out)
    return body + struct.pack("<I", zlib.crc32(body))


class _Reader:
    """Bounds-checked cursor over the stream bytes."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, size: int, what: str) -> bytes:
        if size < 0 or self.pos + size > len(self.data):
            raise StreamError(f"stream truncated while reading {what}")
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def unpack(self, fmt: struct.Struct, what: str):
        return fmt.unpack(self.take(fmt.size, what))


def parse_stream(data: bytes) -> ParsedStream:
    """Validate and split a container into header fields and raw blocks."""
    if len(data) < _HEAD.size + 4:
        raise StreamError("stream shorter than the fixed header")
    (stored_crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) != stored_crc:
        raise StreamError("checksum mismatch")

    r = _Reader(data[:-4])
    magic, version, flags, n, f, f_used, rate, N, K, k = r.unpack(_HEAD, "header")
    if magic != MAGIC:
        raise StreamError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise StreamError(f"unsupported version {version}")
    if flags & ~(FLAG_DATABASE | FLAG_ARITHMETIC):
        raise StreamError(f"unknown flag bits 0x{flags:02x}")
    if n < 1 or k < 1 or k > 3 * n or K < 1 or K > 256 or N < 1:
        raise StreamError(f"implausible header (n={n}, k={k}, K={K}, N={N})")
    if f_used > f:
        raise StreamError(f"f_used={f_used} exceeds f={f}")

    clips = []
    total_frames = 0
    for i in range(N):
        length, l, Q, basis_index = r.unpack(_CLIP, f"clip table entry {i}")
        if length < 1 or not 1 <= l <= length:
            raise StreamError(f"clip {i}: bad lengths L={length}, l={l}")
        if basis_index >= K:
            raise StreamError(f"clip {i}: basis index {basis_index} >= K={K}")
        total_frames += length
        clips.append(ClipEntry(length, l, Q, basis_index))
    if total_frames != f_used:
        raise StreamError(f"clip lengths sum to {total_frames}, header says f_used={f_used}")

    bases = []
    for j in range(K):
        raw = r.take(3 * n * k * 2, f"basis {j}")
        bases.append(np.frombuffer(raw, dtype="<i2").reshape(3 * n, k))
    (payload_len,) = r.unpack(struct.Struct("<Q"), "payload length")
    payload = r.take(payload_len, "payload")
    if r.pos != len(r.data):
        raise StreamError(f"{len(r.data) - r.pos} trailing bytes after the payload")

    return ParsedStream(
        version=version,
        database_mode=bool(flags & FLAG_DATABASE),
        backend="arithmetic" if flags & FLAG_ARITHMETIC else "raw",
        n=n,
        f=f,
        f_used=f_used,
        frame_rate=rate if rate > 0 else None,
        k=k,
        clips=tuple(clips),
        bases=tuple(bases),
        payload=payload,
    )
