"""End-to-end encoder/decoder and rate-distortion metrics.

Pipeline: segment the sequence into clips, learn the shared basis (or K
bases via annealing in database mode), project every clip through its
truncated DCT, quantize the basis to 16 bits and the coefficients to a
2**-Q grid, entropy-code the coefficient integers, and pack everything
into a self-describing container.  Decoding reverses the quantization and
transform per clip with no encoder-side state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import container
from .annealing import anneal
from .entropy import BACKENDS, entropy_decode, entropy_encode
from .errors import StreamError
from .quantize import (
    dequantize_basis,
    dequantize_coeffs,
    quantize_basis,
    quantize_coeffs,
    round_half_away,
    QuantizedBasis,
    QuantizedCoeffs,
)
from .sequence import Clip, MocapSequence, segment_by_cuts, segment_equal
from .transform import TruncatedDct, accumulate_C, top_eigenvectors, truncated_dct

ORIGINAL_BYTES_PER_VALUE = 4  # reporting convention: sources are 32-bit floats


def auto_ratio(L: int) -> float:
    """Retained-frequency ratio r = l/k as a function of clip length."""
    if L < 1:
        raise ValueError(f"clip length must be positive, got {L}")
    return -(-L // 50) / 10.0


def auto_quant(k: int) -> int:
    """Fractional bits per coefficient: 0 up to k=30, then ceil((k-30)/10)."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k <= 30:
        return 0
    return -(-(k - 30) // 10)


def derive_l(k: int, L: int) -> int:
    """Per-clip DCT truncation l = clamp(round(r*k), 1, L)."""
    if k < 1 or L < 1:
        raise ValueError(f"k and L must be positive, got k={k}, L={L}")
    l = int(round_half_away(np.float64(auto_ratio(L) * k)))
    return max(1, min(L, l))


@dataclass(frozen=True)
class CodecParams:
    """Everything the encoder needs beyond the sequence itself.

    ``k`` is the rate knob (retained spatial components).  Exactly one of
    ``L`` (equal segmentation) or ``cuts`` (explicit clip ends) must be
    given.  ``l`` and ``Q`` override the automatic per-clip choices when
    set.  ``K`` > 1 selects database mode: K bases are fit by annealing
    (seeded by ``seed``) and each clip commits to its best basis.
    """

    k: int
    L: int | None = None
    cuts: tuple[int, ...] | None = None
    K: int = 1
    l: int | None = None
    Q: int | None = None
    backend: str = "arithmetic"
    seed: int = 0
    anneal_tol: float = 1e-6
    anneal_max_iters: int = 60

    def __post_init__(self):
        if (self.L is None) == (self.cuts is None):
            raise ValueError("exactly one of L or cuts must be given")
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if not 1 <= self.K <= 256:
            raise ValueError(f"K={self.K} out of range [1, 256]")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}, expected one of {BACKENDS}")
        if self.Q is not None and not 0 <= self.Q <= 255:
            raise ValueError(f"Q={self.Q} out of range [0, 255]")
        if self.cuts is not None:
            object.__setattr__(self, "cuts", tuple(int(c) for c in self.cuts))

    @property
    def mode(self) -> str:
        return "database" if self.K > 1 else "single-basis"


def _segment(seq: MocapSequence, params: CodecParams):
    if params.L is not None:
        return segment_equal(seq, params.L)
    return segment_by_cuts(seq, params.cuts)


def _clip_dcts(clips: list[Clip], params: CodecParams) -> list[TruncatedDct]:
    cache: dict[tuple[int, int], TruncatedDct] = {}
    dcts = []
    for clip in clips:
        l = params.l if params.l is not None else derive_l(params.k, clip.length)
        if not 1 <= l <= clip.length:
            raise ValueError(f"l={l} out of range [1, {clip.length}]")
        key = (clip.length, l)
        if key not in cache:
            cache[key] = truncated_dct(clip.length, l)
        dcts.append(cache[key])
    return dcts


def encode_sequence(seq: MocapSequence, params: CodecParams) -> bytes:
    """Compress a sequence into a self-describing byte stream."""
    rows = 3 * seq.n
    if params.k > rows:
        raise ValueError(f"k={params.k} exceeds 3n={rows}")
    seg, clips = _segment(seq, params)
    dcts = _clip_dcts(clips, params)
    Q = params.Q if params.Q is not None else auto_quant(params.k)
    if not 0 <= Q <= 255:
        raise ValueError(f"derived Q={Q} does not fit the clip table")

    if params.K == 1:
        bases = [top_eigenvectors(accumulate_C(clips, dcts), params.k)]
        assignment = [0] * len(clips)
    else:
        result = anneal(
            clips,
            dcts,
            params.K,
            params.k,
            tol=params.anneal_tol,
            max_iters=params.anneal_max_iters,
            seed=params.seed,
        )
        bases = list(result.bases)
        assignment = list(result.hard_assignment)

    quantized_bases = [quantize_basis(b) for b in bases]
    # Coefficients are projected against the exact basis; the decoder's use
    # of the dequantized basis is part of the quoted error bound.
    entries = []
    coeff_ints = []
    for clip, dct, j in zip(clips, dcts, assignment):
        S = bases[j].matrix.T @ clip.data @ dct.matrix
        qc = quantize_coeffs(S, Q)
        coeff_ints.append(qc.values.ravel())
        entries.append(container.ClipEntry(clip.length, dct.l, Q, j))

    payload = entropy_encode(
        np.concatenate(coeff_ints) if coeff_ints else np.empty(0, np.int64),
        params.backend,
    )
    return container.pack_stream(
        n=seq.n,
        f=seq.f,
        f_used=seg.f_used,
        frame_rate=seq.frame_rate,
        k=params.k,
        clips=entries,
        bases=[qb.values for qb in quantized_bases],
        payload=payload,
        backend=params.backend,
        database_mode=params.K > 1,
    )


def decode_sequence(data: bytes) -> MocapSequence:
    """Decompress a stream back to a sequence of f_used frames."""
    try:
        return _decode_sequence(data)
    except MemoryError:
        raise StreamError("declared sizes exceed available memory") from None


def _decode_sequence(data: bytes) -> MocapSequence:
    parsed = container.parse_stream(data)
    bases = [
        dequantize_basis(QuantizedBasis(3 * parsed.n, parsed.k, raw)) for raw in parsed.bases
    ]
    values = entropy_decode(parsed.payload)
    expected = parsed.k * sum(c.l for c in parsed.clips)
    if values.size != expected:
        raise StreamError(
            f"payload holds {values.size} coefficients, clip table implies {expected}"
        )

    cache: dict[tuple[int, int], TruncatedDct] = {}
    blocks = []
    pos = 0
    for entry in parsed.clips:
        count = parsed.k * entry.l
        qc = QuantizedCoeffs(
            parsed.k, entry.l, entry.Q, values[pos : pos + count].reshape(parsed.k, entry.l)
        )
        pos += count
        key = (entry.length, entry.l)
        if key not in cache:
            cache[key] = truncated_dct(entry.length, entry.l)
        dct = cache[key]
        blocks.append(bases[entry.basis_index] @ dequantize_coeffs(qc) @ dct.matrix.T)
    return MocapSequence(
        n=parsed.n,
        f=parsed.f_used,
        data=np.hstack(blocks),
        frame_rate=parsed.frame_rate,
    )


def compression_ratio(original: MocapSequence, stream: bytes) -> float:
    """Original size over compressed size, counting sources at 4 bytes/value."""
    return (3 * original.n * original.f * ORIGINAL_BYTES_PER_VALUE) / len(stream)


def distortion(original: MocapSequence, decoded: MocapSequence) -> float:
    """Mean Euclidean marker displacement (cm) between two equal-shape sequences."""
    if original.data.shape != decoded.data.shape:
        raise ValueError(
            f"shape mismatch {original.data.shape} vs {decoded.data.shape}; "
            "crop the original to f_used frames first"
        )
    n, f = original.n, original.f
    delta = original.data - decoded.data
    per_marker = np.sqrt(delta[:n] ** 2 + delta[n : 2 * n] ** 2 + delta[2 * n :] ** 2)
    return float(per_marker.sum() / (n * f))


def crop_to(seq: MocapSequence, f_used: int) -> MocapSequence:
    """First f_used frames of a sequence (for comparing against a decode)."""
    if not 1 <= f_used <= seq.f:
        raise ValueError(f"f_used={f_used} out of range [1, {seq.f}]")
    return MocapSequence(seq.n, f_used, seq.data[:, :f_used], seq.frame_rate)


@dataclass(frozen=True)
class StreamInfo:
    """Human-readable header summary for the info command."""

    n: int
    f: int
    f_used: int
    frame_rate: float | None
    N: int
    K: int
    k: int
    backend: str
    database_mode: bool
    clip_lengths: tuple[int, ...]
    l_values: tuple[int, ...]
    Q_values: tuple[int, ...]
    basis_indices: tuple[int, ...]
    stream_bytes: int
    nominal_cr: float = field(init=False)

    def __post_init__(self):
        original = 3 * self.n * self.f * ORIGINAL_BYTES_PER_VALUE
        object.__setattr__(self, "nominal_cr", original / self.stream_bytes)


def stream_info(data: bytes) -> StreamInfo:
    parsed = container.parse_stream(data)
    return StreamInfo(
        n=parsed.n,
        f=parsed.f,
        f_used=parsed.f_used,
        frame_rate=parsed.frame_rate,
        N=parsed.N,
        K=parsed.K,
        k=parsed.k,
        backend=parsed.backend,
        database_mode=parsed.database_mode,
        clip_lengths=tuple(c.length for c in parsed.clips),
        l_values=tuple(c.l for c in parsed.clips),
        Q_values=tuple(c.Q for c in parsed.clips),
        basis_indices=tuple(c.basis_index for c in parsed.clips),
        stream_bytes=len(data),
    )
