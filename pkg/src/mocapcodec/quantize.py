"""Uniform quantizers for the basis and the coefficient blocks.

All rounding is half away from zero so that streams are reproducible
across platforms (numpy's default rounding is half-to-even).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BASIS_SCALE = 32767  # basis entries lie in [-1, 1]; 16-bit signed grid
_INT63_LIMIT = float(2**63)  # scaled coefficients must stay in signed 64-bit range


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, halves away from zero; returns int64."""
    x = np.asarray(x, dtype=np.float64)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


@dataclass(frozen=True)
class QuantizedBasis:
    """Basis entries on the 16-bit grid q = round(b * 32767)."""

    rows: int
    k: int
    values: np.ndarray  # int16, shape (rows, k)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.int16)
        if v.shape != (self.rows, self.k):
            raise ValueError(f"values shape {v.shape} != ({self.rows}, {self.k})")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class QuantizedCoeffs:
    """Coefficients on the grid v = round(s * 2**Q); step 2**-Q."""

    k: int
    l: int
    Q: int
    values: np.ndarray  # int64, shape (k, l)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.int64)
        if self.Q < 0:
            raise ValueError(f"Q must be non-negative, got {self.Q}")
        if v.shape != (self.k, self.l):
            raise ValueError(f"values shape {v.shape} != ({self.k}, {self.l})")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


def quantize_basis(basis) -> QuantizedBasis:
    """Quantize an orthonormal basis; round-trip error is at most 1/65534."""
    B = np.asarray(getattr(basis, "matrix", basis), dtype=np.float64)
    if np.abs(B).max() > 1.0 + 1e-9:
        raise ValueError(f"basis entry magnitude {np.abs(B).max()} exceeds 1")
    q = round_half_away(np.clip(B, -1.0, 1.0) * BASIS_SCALE)
    return QuantizedBasis(B.shape[0], B.shape[1], q.astype(np.int16))


def dequantize_basis(qb: QuantizedBasis) -> np.ndarray:
    return qb.values.astype(np.float64) / BASIS_SCALE


def quantize_coeffs(coeffs, Q: int) -> QuantizedCoeffs:
    """Quantize a coefficient block; per-entry error is at most 2**-(Q+1)."""
    S = np.asarray(getattr(coeffs, "matrix", coeffs), dtype=np.float64)
    if Q < 0:
        raise ValueError(f"Q must be non-negative, got {Q}")
    scaled = S * float(2**Q)
    if S.size and np.abs(scaled).max() >= _INT63_LIMIT:
        raise OverflowError(
            f"scaled coefficient magnitude {np.abs(scaled).max():.3g} exceeds the 63-bit range"
        )
    return QuantizedCoeffs(S.shape[0], S.shape[1], Q, round_half_away(scaled))


def dequantize_coeffs(qc: QuantizedCoeffs) -> np.ndarray:
    return qc.values.astype(np.float64) / float(2**qc.Q)
