"""Trajectory-matrix data model, file I/O, and segmentation.

A motion-capture sequence with n markers and f frames is a dense 3n-by-f
matrix: rows 0..n-1 hold the x coordinate of each marker, rows n..2n-1 the
y coordinate, rows 2n..3n-1 the z coordinate, all in centimeters.  Columns
are frames.  The codec operates on contiguous column slices (clips).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError

FORMATS = ("txt", "csv")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class MocapSequence:
    """A full sequence: 3n-by-f trajectory matrix plus metadata.

    ``frame_rate`` is optional metadata (frames/second) carried through the
    codec but never used in any computation.
    """

    n: int
    f: int
    data: np.ndarray
    frame_rate: float | None = None

    def __post_init__(self):
        if self.n <= 0 or self.f <= 0:
            raise ValueError(f"marker and frame counts must be positive, got n={self.n}, f={self.f}")
        if self.data.shape != (3 * self.n, self.f):
            raise ValueError(f"data shape {self.data.shape} does not match (3n, f)=({3 * self.n}, {self.f})")
        if self.frame_rate is not None and self.frame_rate <= 0:
            raise ValueError(f"frame_rate must be positive, got {self.frame_rate}")
        object.__setattr__(self, "data", _frozen(self.data))

    def marker(self, i: int) -> np.ndarray:
        """3-by-f (x, y, z) trajectory of marker i."""
        n = self.n
        return self.data[[i, n + i, 2 * n + i], :]


@dataclass(frozen=True)
class Clip:
    """A contiguous column slice of a parent sequence."""

    start_frame: int
    length: int
    data: np.ndarray

    def __post_init__(self):
        if self.start_frame < 0 or self.length <= 0:
            raise ValueError("clip must have start_frame >= 0 and positive length")
        if self.data.shape[1] != self.length:
            raise ValueError(f"clip data has {self.data.shape[1]} columns, expected {self.length}")
        object.__setattr__(self, "data", _frozen(self.data))

    @property
    def end_frame(self) -> int:
        return self.start_frame + self.length


@dataclass(frozen=True)
class Segmentation:
    """Clip boundaries: ``cuts[i]`` is the end frame (exclusive) of clip i.

    The cuts are strictly increasing and partition [0, f_used) into
    contiguous non-empty intervals; ``f_used == cuts[-1]`` and trailing
    frames beyond it are dropped from coding.
    """

    cuts: tuple[int, ...]
    f_used: int = field(init=False)

    def __post_init__(self):
        cuts = tuple(int(c) for c in self.cuts)
        if not cuts:
            raise ValueError("segmentation needs at least one cut")
        if cuts[0] <= 0 or any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"cuts must be strictly increasing and positive, got {cuts}")
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "f_used", cuts[-1])

    @property
    def num_clips(self) -> int:
        return len(self.cuts)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip((0,) + self.cuts, self.cuts))


def segment_equal(seq: MocapSequence, length: int) -> tuple[Segmentation, list[Clip]]:
    """Split into floor(f/length) clips of equal length, dropping the remainder.

    The dropped frame count is ``seq.f - segmentation.f_used``.
    """
    if not 1 <= length <= seq.f:
        raise ValueError(f"clip length {length} out of range [1, {seq.f}]")
    n_clips = seq.f // length
    seg = Segmentation(tuple(length * (i + 1) for i in range(n_clips)))
    return seg, _slice_clips(seq, seg)


def segment_by_cuts(seq: MocapSequence, cuts) -> tuple[Segmentation, list[Clip]]:
    """Split at externally supplied cut points (end frame of each clip)."""
    cuts = [int(c) for c in cuts]
    if any(not 0 < c <= seq.f for c in cuts):
        raise ValueError(f"cuts must lie in (0, {seq.f}], got {cuts}")
    seg = Segmentation(tuple(cuts))
    return seg, _slice_clips(seq, seg)


def _slice_clips(seq: MocapSequence, seg: Segmentation) -> list[Clip]:
    clips = []
    start = 0
    for end in seg.cuts:
        clips.append(Clip(start, end - start, seq.data[:, start:end]))
        start = end
    return clips


def concat_clips(clips: list[Clip]) -> np.ndarray:
    """Stitch clip matrices back into one 3n-by-f_used matrix, in clip order."""
    return np.hstack([c.data for c in clips])


# ---------------------------------------------------------------------------
# File formats.
#
# matrix-text: line 1 is "<3n> <f>"; the next 3n lines each hold f
# space-separated decimal reals.  csv: 3n rows of f comma-separated reals,
# no header.  Both are UTF-8 with LF line endings and carry full float64
# round-trip precision.
# ---------------------------------------------------------------------------


def load_sequence(path, fmt: str = "txt", frame_rate: float | None = None) -> MocapSequence:
    """Parse a trajectory matrix from ``path`` in the given format."""
    if fmt not in FORMATS:
        raise ValueError(f"unsupported format {fmt!r}, expected one of {FORMATS}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    if fmt == "txt":
        if not lines:
            raise FormatError("empty file", line=1)
        header = lines[0].split()
        if len(header) != 2:
            raise FormatError(f"header must be '<3n> <f>', got {lines[0]!r}", line=1)
        try:
            rows, f = int(header[0]), int(header[1])
        except ValueError:
            raise FormatError(f"non-integer header {lines[0]!r}", line=1) from None
        body = lines[1:]
        sep = None
        first_data_line = 2
    else:
        body = lines
        if not body:
            raise FormatError("empty file", line=1)
        rows = len(body)
        f = len(body[0].split(","))
        sep = ","
        first_data_line = 1

    if rows <= 0 or rows % 3 != 0:
        raise FormatError(f"row count {rows} is not a positive multiple of 3", line=1)
    if f <= 0:
        raise FormatError(f"frame count {f} must be positive", line=1)
    if len(body) != rows:
        # Point at the first unexpected line, or at EOF when rows are missing.
        lineno = first_data_line + min(len(body), rows)
        raise FormatError(f"expected {rows} data rows, found {len(body)}", line=lineno)

    data = np.empty((rows, f), dtype=np.float64)
    for r, line in enumerate(body):
        cells = line.split(sep)
        lineno = first_data_line + r
        if len(cells) != f:
            raise FormatError(f"expected {f} values, found {len(cells)}", line=lineno)
        try:
            data[r, :] = [float(c) for c in cells]
        except ValueError:
            bad = next(c for c in cells if not _is_float(c))
            raise FormatError(f"non-numeric cell {bad!r}", line=lineno) from None

    return MocapSequence(n=rows // 3, f=f, data=data, frame_rate=frame_rate)


def save_sequence(seq: MocapSequence, path, fmt: str = "txt") -> None:
    """Write ``seq`` so that loading it back is value-exact for float64."""
    if fmt not in FORMATS:
        raise ValueError(f"unsupported format {fmt!r}, expected one of {FORMATS}")
    sep = " " if fmt == "txt" else ","
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "txt":
            fh.write(f"{3 * seq.n} {seq.f}\n")
        for row in seq.data:
            fh.write(sep.join(repr(float(v)) for v in row))
            fh.write("\n")


def format_from_path(path) -> str:
    """Infer 'csv' from a .csv extension, 'txt' otherwise."""
    return "csv" if os.path.splitext(str(path))[1].lower() == ".csv" else "txt"


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False
