"""Two-sided transform: truncated DCT in time, shared learned basis in space.

Each clip M_i (3n-by-L_i) is represented as B S_i D̃_iᵀ where D̃_i is the
first l_i columns of the orthonormal DCT-II basis (data independent, smooth
rows compress well in frequency) and B is a single 3n-by-k orthonormal
matrix shared by every clip (data dependent, rows of different markers are
strongly correlated).  With S_i = Bᵀ M_i D̃_i the total squared residual is

    sum_i ||M_i||_F^2  -  tr(Bᵀ C B),     C = sum_i M_i D̃_i D̃_iᵀ M_iᵀ,

so the best B maximizes tr(Bᵀ C B) over orthonormal matrices, which the
top-k eigenvectors of C achieve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequence import Clip


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DctBasis:
    """L-by-L orthonormal DCT-II basis; column m is frequency m."""

    L: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))


@dataclass(frozen=True)
class TruncatedDct:
    """First l columns of the size-L DCT basis (lowest l frequencies)."""

    L: int
    l: int
    matrix: np.ndarray

    def __post_init__(self):
        if not 1 <= self.l <= self.L:
            raise ValueError(f"truncation {self.l} out of range [1, {self.L}]")
        object.__setattr__(self, "matrix", _frozen(self.matrix))


@dataclass(frozen=True)
class TransformBasis:
    """3n-by-k matrix with orthonormal columns, shared across clips."""

    rows: int
    k: int
    matrix: np.ndarray

    def __post_init__(self):
        if not 1 <= self.k <= self.rows:
            raise ValueError(f"k={self.k} out of range [1, {self.rows}]")
        if self.matrix.shape != (self.rows, self.k):
            raise ValueError(f"basis shape {self.matrix.shape} != ({self.rows}, {self.k})")
        object.__setattr__(self, "matrix", _frozen(self.matrix))


@dataclass(frozen=True)
class ClipCoefficients:
    """Dense k-by-l coefficient block for one clip."""

    k: int
    l: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.k, self.l):
            raise ValueError(f"coefficient shape {self.matrix.shape} != ({self.k}, {self.l})")
        object.__setattr__(self, "matrix", _frozen(self.matrix))


def dct_basis(L: int) -> DctBasis:
    """Orthonormal DCT-II basis: entry (j, m) = c_m cos(pi (2j+1) m / (2L))."""
    if L < 1:
        raise ValueError(f"basis size must be positive, got {L}")
    j = np.arange(L)[:, None]
    m = np.arange(L)[None, :]
    mat = np.cos(np.pi * (2 * j + 1) * m / (2 * L))
    scale = np.full(L, np.sqrt(2.0 / L))
    scale[0] = np.sqrt(1.0 / L)
    return DctBasis(L, mat * scale[None, :])


def truncated_dct(L: int, l: int) -> TruncatedDct:
    return TruncatedDct(L, l, dct_basis(L).matrix[:, :l])


def accumulate_C(clips: list[Clip], dcts: list[TruncatedDct]) -> np.ndarray:
    """C = sum_i (M_i D̃_i)(M_i D̃_i)ᵀ, symmetric PSD, 3n-by-3n."""
    if not clips or len(clips) != len(dcts):
        raise ValueError(f"need equally many clips and DCTs, got {len(clips)} and {len(dcts)}")
    rows = clips[0].data.shape[0]
    C = np.zeros((rows, rows))
    for clip, dct in zip(clips, dcts):
        _check_pair(clip, dct, rows)
        P = clip.data @ dct.matrix
        C += P @ P.T
    return (C + C.T) / 2.0


def top_eigenvectors(C: np.ndarray, k: int) -> TransformBasis:
    """Orthonormal eigenvectors of symmetric C for its k largest eigenvalues.

    Deterministic orientation: eigenvalues sorted descending with
    index-order tie-breaking, and each column flipped so its
    largest-magnitude entry is positive.
    """
    C = np.asarray(C, dtype=np.float64)
    rows = C.shape[0]
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"C must be square, got shape {C.shape}")
    if not np.allclose(C, C.T, rtol=0.0, atol=1e-9 * max(1.0, np.abs(C).max())):
        raise ValueError("C must be symmetric")
    if not 1 <= k <= rows:
        raise ValueError(f"k={k} out of range [1, {rows}]")
    evals, evecs = np.linalg.eigh((C + C.T) / 2.0)
    order = np.argsort(-evals, kind="stable")[:k]
    basis = evecs[:, order]
    flip = basis[np.abs(basis).argmax(axis=0), np.arange(k)] < 0
    basis = basis * np.where(flip, -1.0, 1.0)[None, :]
    return TransformBasis(rows, k, basis)


def project_clip(basis: TransformBasis, clip: Clip, dct: TruncatedDct) -> ClipCoefficients:
    """S_i = Bᵀ M_i D̃_i."""
    _check_pair(clip, dct, basis.rows)
    return ClipCoefficients(basis.k, dct.l, basis.matrix.T @ clip.data @ dct.matrix)


def reconstruct_clip(basis, coeffs, dct: TruncatedDct) -> np.ndarray:
    """Inverse transform B S_i D̃_iᵀ back to a 3n-by-L_i matrix.

    Accepts raw matrices in place of :class:`TransformBasis` /
    :class:`ClipCoefficients` so the decoder can pass dequantized values,
    which are not exactly orthonormal.
    """
    B = getattr(basis, "matrix", basis)
    S = getattr(coeffs, "matrix", coeffs)
    if B.shape[1] != S.shape[0] or S.shape[1] != dct.l:
        raise ValueError(f"incompatible shapes B{B.shape} S{S.shape} D̃({dct.L},{dct.l})")
    return B @ S @ dct.matrix.T


def objective_value(clips: list[Clip], dcts: list[TruncatedDct], basis: TransformBasis) -> float:
    """Total squared residual sum_i ||M_i - B S_i D̃_iᵀ||_F^2 at S_i = BᵀM_iD̃_i."""
    if len(clips) != len(dcts):
        raise ValueError(f"need equally many clips and DCTs, got {len(clips)} and {len(dcts)}")
    total = 0.0
    for clip, dct in zip(clips, dcts):
        _check_pair(clip, dct, basis.rows)
        S = basis.matrix.T @ clip.data @ dct.matrix
        resid = clip.data - basis.matrix @ S @ dct.matrix.T
        total += float(np.sum(resid * resid))
    return total


def storage_cost(k: int, n: int, lengths) -> int:
    """Scalar count of the shared-basis code: k * (3n + sum_i l_i)."""
    lengths = [int(v) for v in lengths]
    if k <= 0 or n <= 0 or any(v <= 0 for v in lengths):
        raise ValueError("all storage-cost arguments must be positive")
    return k * (3 * n + sum(lengths))


def svd_storage_cost(n: int, k_list, L_list) -> int:
    """Scalar count of per-clip SVD coding: 3n*sum k_i + sum (L_i k_i + k_i).

    Per clip this stores U_i (3n-by-k_i), V_i (L_i-by-k_i) and the k_i
    singular values.
    """
    k_list = [int(v) for v in k_list]
    L_list = [int(v) for v in L_list]
    if n <= 0 or len(k_list) != len(L_list) or any(v <= 0 for v in k_list + L_list):
        raise ValueError("all SVD storage-cost arguments must be positive and aligned")
    return 3 * n * sum(k_list) + sum(L * k + k for k, L in zip(k_list, L_list))


@dataclass(frozen=True)
class SvdClipCode:
    """Rank-k truncated SVD of one clip: columns of U and V plus singular values."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values[None, :]) @ self.V.T


def baseline_svd_code(clip: Clip, k_i: int) -> SvdClipCode:
    """Keep the top k_i singular triplets of one clip (per-clip baseline)."""
    rows, L = clip.data.shape
    if not 1 <= k_i <= min(rows, L):
        raise ValueError(f"k_i={k_i} out of range [1, {min(rows, L)}]")
    U, s, Vt = np.linalg.svd(clip.data, full_matrices=False)
    return SvdClipCode(U[:, :k_i].copy(), s[:k_i].copy(), Vt[:k_i, :].T.copy())


@dataclass(frozen=True)
class Dct2dClipCode:
    """Full 2D-DCT coefficients of one clip with all but `keep` entries zeroed."""

    coeffs: np.ndarray
    keep: int

    def reconstruct(self) -> np.ndarray:
        rows, L = self.coeffs.shape
        return dct_basis(rows).matrix @ self.coeffs @ dct_basis(L).matrix.T


def baseline_dct2d_code(clip: Clip, keep: int) -> Dct2dClipCode:
    """2D DCT of one clip keeping the `keep` largest-magnitude coefficients.

    Ties break on the flat row-major index, so the selection is
    deterministic.
    """
    rows, L = clip.data.shape
    if not 1 <= keep <= rows * L:
        raise ValueError(f"keep={keep} out of range [1, {rows * L}]")
    coeffs = dct_basis(rows).matrix.T @ clip.data @ dct_basis(L).matrix
    flat = coeffs.ravel()
    selected = np.argsort(-np.abs(flat), kind="stable")[:keep]
    sparse = np.zeros_like(flat)
    sparse[selected] = flat[selected]
    return Dct2dClipCode(sparse.reshape(rows, L), keep)


def _check_pair(clip: Clip, dct: TruncatedDct, rows: int) -> None:
    if clip.data.shape[0] != rows:
        raise ValueError(f"clip has {clip.data.shape[0]} rows, expected {rows}")
    if clip.length != dct.L:
        raise ValueError(f"clip length {clip.length} != DCT size {dct.L}")
