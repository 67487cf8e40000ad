"""Quantitative characterizations of trajectory matrices.

These measurements capture why the codec works: trajectories vary slowly
over time relative to their overall spread, the trajectory matrix is
approximately low rank, and clips of one sequence are strongly correlated
with each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequence import MocapSequence


@dataclass(frozen=True)
class SpectrumReport:
    """Singular values of a matrix, divided by the largest one.

    ``all_zero`` flags a zero input matrix, whose normalized spectrum is
    undefined; ``normalized_singular_values`` is then all zeros.
    """

    normalized_singular_values: np.ndarray
    subject: str = ""
    all_zero: bool = False

    def __post_init__(self):
        vals = np.asarray(self.normalized_singular_values, dtype=np.float64)
        vals.flags.writeable = False
        object.__setattr__(self, "normalized_singular_values", vals)


def mean_variation(seq: MocapSequence) -> float:
    """Mean absolute frame-to-frame difference over all 3n rows.

    Computed as the entrywise 1-norm of the first-order column differences
    divided by 3*n*f.  Small values relative to :func:`stddev_sum` indicate
    smooth trajectories.
    """
    if seq.f < 2:
        raise ValueError("mean variation needs at least 2 frames")
    diffs = np.abs(np.diff(seq.data, axis=1)).sum()
    return float(diffs / (3 * seq.n * seq.f))


def stddev_sum(seq: MocapSequence) -> float:
    """Sum over rows of the population standard deviation of each row.

    Population convention (divide by f).  The mean across rows is this
    value divided by 3n; the analyze report prints both.
    """
    if seq.f < 2:
        raise ValueError("standard deviation needs at least 2 frames")
    return float(np.std(seq.data, axis=1, ddof=0).sum())


def singular_spectrum(matrix: np.ndarray, subject: str = "") -> SpectrumReport:
    """Normalized singular values of an arbitrary real matrix."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        raise ValueError("matrix must be non-empty")
    svals = np.linalg.svd(matrix, compute_uv=False)
    top = svals[0]
    if top == 0.0:
        return SpectrumReport(np.zeros_like(svals), subject=subject, all_zero=True)
    return SpectrumReport(svals / top, subject=subject)


def clip_correlation_spectrum(seq: MocapSequence, J: int) -> SpectrumReport:
    """Spectrum of the J-by-(3n*f_used/J) matrix of vectorized clips.

    The sequence is cropped so f is a multiple of J, split into J clips of
    equal length, and row j of the unfolded matrix is the row-major
    vectorization of clip j.  A fast-decaying spectrum means the clips are
    nearly linear combinations of each other.
    """
    if not 1 <= J <= seq.f:
        raise ValueError(f"clip count {J} out of range [1, {seq.f}]")
    length = seq.f // J
    f_used = J * length
    rows = seq.data.shape[0]
    # (3n, f_used) -> (3n, J, length) -> (J, 3n, length) -> (J, 3n*length)
    unfolded = (
        seq.data[:, :f_used]
        .reshape(rows, J, length)
        .transpose(1, 0, 2)
        .reshape(J, rows * length)
    )
    return singular_spectrum(unfolded, subject=f"{seq.n} markers, {J} clips")
