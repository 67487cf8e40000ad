"""K-basis extension: deterministic annealing over soft clip assignments.

For a database of diverse clips a single shared basis underfits, so K
bases are fit jointly with a soft assignment matrix W (N-by-K, rows sum
to 1).  Each iteration projects every clip on every basis, reweights W by
a softmax of the negative squared residuals at temperature t, rebuilds
each basis from its W-weighted accumulation matrix, then halves t.  As t
cools the rows of W sharpen towards one-hot and the procedure reduces to
hard clustering of clips over subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError
from .transform import TransformBasis, top_eigenvectors


@dataclass(frozen=True)
class AssignmentMatrix:
    """Row-stochastic N-by-K clip-to-basis weights at temperature t."""

    W: np.ndarray
    temperature: float

    def __post_init__(self):
        W = np.ascontiguousarray(self.W, dtype=np.float64)
        if self.temperature <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if W.ndim != 2:
            raise ValueError("W must be a 2-D matrix")
        if np.any(W < 0) or np.any(W > 1) or not np.allclose(W.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("W rows must be distributions over bases")
        W.flags.writeable = False
        object.__setattr__(self, "W", W)


@dataclass(frozen=True)
class AnnealResult:
    bases: tuple[TransformBasis, ...]
    W: AssignmentMatrix
    hard_assignment: tuple[int, ...]
    iterations: int
    final_objective: float
    t0: float
    seed: int
    converged: bool
    # One entry per iteration: temperature, soft objective before/after the
    # basis update at that iteration's W, and the convergence deltas.
    history: tuple[dict, ...] = field(default_factory=tuple, repr=False)


class _Projections:
    """Stacked per-clip time projections P_i = M_i D̃_i and clip energies.

    Identities used throughout: with S_ij = B_jᵀ P_i,

        ||M_i - B_j S_ij D̃_iᵀ||_F^2 = ||M_i||_F^2 - ||S_ij||_F^2
        C_j = sum_i W[i,j] P_i P_iᵀ

    so one gemm against the column-stacked P serves all clips at once.
    """

    def __init__(self, clips, dcts):
        if not clips or len(clips) != len(dcts):
            raise ValueError(f"need equally many clips and DCTs, got {len(clips)} and {len(dcts)}")
        rows = clips[0].data.shape[0]
        for clip, dct in zip(clips, dcts):
            if clip.data.shape[0] != rows:
                raise ValueError("clips disagree on row count")
            if clip.length != dct.L:
                raise ValueError(f"clip length {clip.length} != DCT size {dct.L}")
        self.rows = rows
        self.energies = np.array([float(np.sum(c.data * c.data)) for c in clips])
        self.stacked = np.hstack([c.data @ d.matrix for c, d in zip(clips, dcts)])
        self.col_counts = np.array([d.l for d in dcts])
        self.offsets = np.concatenate(([0], np.cumsum(self.col_counts)[:-1]))

    def residuals(self, basis_matrices) -> np.ndarray:
        """r2[i, j] for every clip i and basis j (clamped at 0)."""
        r2 = np.empty((len(self.energies), len(basis_matrices)))
        for j, B in enumerate(basis_matrices):
            T = B.T @ self.stacked
            per_clip = np.add.reduceat((T * T).sum(axis=0), self.offsets)
            r2[:, j] = self.energies - per_clip
        return np.maximum(r2, 0.0)

    def weighted_accumulation(self, weights: np.ndarray) -> np.ndarray:
        """sum_i weights[i] P_i P_iᵀ via one scaled gemm."""
        scaled = self.stacked * np.repeat(weights, self.col_counts)[None, :]
        C = scaled @ self.stacked.T
        return (C + C.T) / 2.0


def update_weights(clips, dcts, bases, t: float) -> AssignmentMatrix:
    """Softmax of -residual^2/t over bases, one row per clip."""
    if t <= 0:
        raise ValueError(f"temperature must be positive, got {t}")
    proj = _Projections(clips, dcts)
    r2 = proj.residuals([b.matrix for b in bases])
    return AssignmentMatrix(_softmax_rows(r2, t), t)


def accumulate_Cj(clips, dcts, W, j: int) -> np.ndarray:
    """Weighted accumulation sum_i W[i,j] (M_i D̃_i)(M_i D̃_i)ᵀ for basis j."""
    W = np.asarray(getattr(W, "W", W), dtype=np.float64)
    if not 0 <= j < W.shape[1]:
        raise IndexError(f"basis index {j} out of range [0, {W.shape[1]})")
    return _Projections(clips, dcts).weighted_accumulation(W[:, j])


def hard_assign(W) -> list[int]:
    """Per-row argmax, lowest index on exact ties."""
    W = np.asarray(getattr(W, "W", W))
    return [int(j) for j in W.argmax(axis=1)]


def anneal(
    clips,
    dcts,
    K: int,
    k: int,
    *,
    t0: float | None = None,
    tol: float = 1e-6,
    max_iters: int = 60,
    seed: int = 0,
    restarts: int = 8,
) -> AnnealResult:
    """Alternating optimization of K bases and soft assignments with cooling.

    One run starts from seeded random orthonormal bases and W uniform at
    1/K; each iteration recomputes coefficients and W from the current
    bases, rebuilds every basis from its W-weighted accumulation matrix,
    and halves the temperature, until neither W (max entrywise change) nor
    any per-basis objective (relative change) moves by more than ``tol``.

    A single run can freeze near the symmetric saddle where all bases
    coincide, so ``restarts`` independent runs are made (sub-seed
    ``seed + 9973*r``, starting temperature divided by 4**r) and the one
    with the smallest final objective wins.  Everything is deterministic
    given ``seed``.  K=1 has a unique optimum, so no extra restarts run.

    Raises :class:`ConvergenceError` carrying the best last state if no
    run converges within ``max_iters`` iterations.
    """
    N = len(clips)
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if N < K:
        raise ValueError(f"need at least as many clips as bases, got N={N} < K={K}")
    if tol <= 0 or max_iters < 1 or restarts < 1 or (t0 is not None and t0 <= 0):
        raise ValueError("tol, max_iters, restarts and t0 must be positive")
    proj = _Projections(clips, dcts)
    if not 1 <= k <= proj.rows:
        raise ValueError(f"k={k} out of range [1, {proj.rows}]")

    best: AnnealResult | None = None
    best_failed: AnnealResult | None = None
    if K == 1:
        restarts = 1
    for r in range(restarts):
        sub_seed = seed + 9973 * r
        sub_t0 = None if t0 is None else t0 / 4.0**r
        result = _anneal_once(proj, K, k, sub_t0, tol, max_iters, sub_seed, 4.0**r)
        if result.converged:
            if best is None or result.final_objective < best.final_objective:
                best = result
        elif best_failed is None or result.final_objective < best_failed.final_objective:
            best_failed = result
    if best is None:
        raise ConvergenceError(
            f"no restart converged within {max_iters} iterations", result=best_failed
        )
    return best


def _anneal_once(
    proj: _Projections,
    K: int,
    k: int,
    t0: float | None,
    tol: float,
    max_iters: int,
    seed: int,
    t0_divisor: float,
) -> AnnealResult:
    N = len(proj.energies)
    rng = np.random.default_rng(seed)
    bases = [_random_orthonormal(rng, proj.rows, k) for _ in range(K)]
    W = np.full((N, K), 1.0 / K)

    r2 = proj.residuals(bases)
    if t0 is None:
        t0 = float(np.mean(r2[:, 0])) / t0_divisor
        if t0 <= 0.0:
            t0 = 1.0  # all-zero input: any temperature keeps W uniform
    t = t0

    history: list[dict] = []
    prev_obj = None
    converged = False
    iterations = 0

    for iterations in range(1, max_iters + 1):
        W_new = _softmax_rows(r2, t)
        soft_before = float(np.sum(W_new * r2))

        bases = [
            top_eigenvectors(proj.weighted_accumulation(W_new[:, j]), k).matrix for j in range(K)
        ]
        r2 = proj.residuals(bases)
        soft_after = float(np.sum(W_new * r2))
        obj_per_basis = (W_new * r2).sum(axis=0)

        dW = float(np.abs(W_new - W).max())
        if prev_obj is None:
            dobj = np.inf
        else:
            dobj = float(np.max(np.abs(obj_per_basis - prev_obj) / (1.0 + np.abs(obj_per_basis))))
        history.append(
            {"t": t, "soft_before": soft_before, "soft_after": soft_after, "dW": dW, "dobj": dobj}
        )

        W = W_new
        prev_obj = obj_per_basis
        t = t / 2.0
        if max(dW, dobj) < tol:
            converged = True
            break

    return AnnealResult(
        bases=tuple(TransformBasis(proj.rows, k, b) for b in bases),
        W=AssignmentMatrix(W, t * 2.0),
        hard_assignment=tuple(hard_assign(W)),
        iterations=iterations,
        final_objective=float(np.sum(W * r2)),
        t0=t0,
        seed=seed,
        converged=converged,
        history=tuple(history),
    )


def _random_orthonormal(rng: np.random.Generator, rows: int, k: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((rows, k)))
    signs = np.sign(np.diag(r))
    return q * np.where(signs == 0, 1.0, signs)[None, :]


def _softmax_rows(r2: np.ndarray, t: float) -> np.ndarray:
    """Rows of exp(-r2/t) normalized, computed in shifted form to avoid underflow."""
    shifted = r2 - r2.min(axis=1, keepdims=True)
    w = np.exp(-shifted / t)
    return w / w.sum(axis=1, keepdims=True)
