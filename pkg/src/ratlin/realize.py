"""Construction and transformation of minimal state-space realizations.

Covers pole-residue input, exact minimality reduction, the similarity that
reveals symmetry of a symmetric transfer function, the analogous Hermitian
similarity, and the block-Hankel route that builds a structured realization
straight from Markov parameters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import (
    NotHermitianTransfer,
    NotMinimal,
    NotSymmetricTransfer,
    RankMismatch,
    RankZeroResidueWarning,
)
from .ratmodel import (
    HermitianRealization,
    PoleResidue,
    StateSpaceRealization,
    SymmetricRealization,
    controllability_matrix,
    is_minimal,
    numerical_rank,
    observability_matrix,
)

__all__ = [
    "MarkovSequence",
    "from_pole_residue",
    "minimal_reduction",
    "symmetric_similarity",
    "to_symmetric_realization",
    "hermitian_similarity",
    "to_hermitian_realization",
    "symmetric_from_hankel",
    "hermitian_from_hankel",
    "markov_parameters",
]

_SAMPLE_POINTS = (0.83 + 1.31j, -1.27 + 0.44j, 2.05 - 0.37j, -0.58 - 1.72j, 1.49 + 0.91j)


@dataclass(frozen=True)
class MarkovSequence:
    """Laurent coefficients G_1, G_2, ... of a strictly proper matrix at infinity."""

    terms: np.ndarray  # shape (q, m, m)
    n_hint: int

    def __post_init__(self):
        arr = np.asarray(self.terms)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim == 1:
            arr = arr[:, None, None]
        arr = arr if np.iscomplexobj(arr) else arr.astype(float)
        if self.n_hint > 0 and arr.shape[0] < 2 * self.n_hint:
            raise ValueError("need at least 2*n_hint Markov parameters")
        arr.flags.writeable = False
        object.__setattr__(self, "terms", arr)

    @property
    def m(self) -> int:
        return self.terms.shape[1]


def from_pole_residue(pr: PoleResidue, tol: float | None = None) -> StateSpaceRealization:
    """Minimal realization with A block-diagonal over the poles.

    Each residue is rank-factored as R_i = C_i B_i; zero-rank residues are
    dropped with a warning.
    """
    a_blocks, b_blocks, c_blocks = [], [], []
    dtype = np.result_type(pr.poles.dtype, pr.residues.dtype)
    for p, R in zip(pr.poles, pr.residues):
        U, s, Vh = la.svd(R)
        thr = (max(R.shape) * np.finfo(float).eps if tol is None else tol) * (s[0] if s.size else 0.0)
        r = int(np.count_nonzero(s > thr))
        if r == 0:
            warnings.warn(f"residue at pole {p} has rank zero; dropped", RankZeroResidueWarning)
            continue
        root = np.sqrt(s[:r])
        c_blocks.append(U[:, :r] * root)
        b_blocks.append(root[:, None] * Vh[:r])
        a_blocks.append(p * np.eye(r, dtype=dtype))
    if not a_blocks:
        m = pr.m
        return StateSpaceRealization(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((m, 0)))
    return StateSpaceRealization(la.block_diag(*a_blocks), np.vstack(b_blocks), np.hstack(c_blocks))


def _orth_cols(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the column space with a relative rank cut."""
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    U, s, _ = la.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((M.shape[0], 0))
    r = int(np.count_nonzero(s > tol * s[0]))
    return U[:, :r]


def minimal_reduction(R: StateSpaceRealization, tol: float = 1e-10) -> StateSpaceRealization:
    """Project onto the reachable-and-observable subspace; transfer unchanged.

    Idempotent; the output passes :func:`~ratlin.ratmodel.is_minimal`.
    """
    A, B, C = R.A, R.B, R.C
    if R.n == 0:
        return R
    Q = _orth_cols(controllability_matrix(A, B), tol)
    A = Q.conj().T @ A @ Q
    B = Q.conj().T @ B
    C = C @ Q
    if A.shape[0] == 0:
        m = R.m
        return StateSpaceRealization(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((C.shape[0], 0)))
    Q = _orth_cols(observability_matrix(A, C).conj().T, tol)
    A = Q.conj().T @ A @ Q
    B = Q.conj().T @ B
    C = C @ Q
    return StateSpaceRealization(A, B, C)


def _transfer_mismatch(R: StateSpaceRealization, adjoint: str) -> float:
    """Largest relative asymmetry of the transfer function at sample points."""
    worst = 0.0
    for lam in _SAMPLE_POINTS:
        G = R(lam)
        other = R(lam).T if adjoint == "T" else R(np.conj(lam)).conj().T
        scale = max(la.norm(G), 1e-300)
        worst = max(worst, la.norm(G - other) / scale)
    return worst


def symmetric_similarity(R: StateSpaceRealization, tol: float = 1e-8) -> np.ndarray:
    """The unique symmetric S with A^T = S^{-1} A S and C^T = S^{-1} B.

    Requires a minimal realization of a symmetric transfer function;
    computed as pinv(obsv) @ ctrb^T.
    """
    if not is_minimal(R):
        raise NotMinimal("symmetric similarity needs a minimal realization")
    if _transfer_mismatch(R, "T") > tol:
        raise NotSymmetricTransfer("transfer function is not symmetric at sample points")
    S = la.pinv(observability_matrix(R.A, R.C)) @ controllability_matrix(R.A, R.B).T
    asym = la.norm(S - S.T)
    if asym > 1e-10 * max(la.norm(S), 1.0):
        raise NotSymmetricTransfer(f"similarity matrix asymmetry {asym:.2e} above tolerance")
    return (S + S.T) / 2.0


def to_symmetric_realization(R: StateSpaceRealization, tol: float = 1e-8) -> SymmetricRealization:
    """Rewrite C (lam*I - A)^{-1} B as W (lam*S1 - S2)^{-1} W^T."""
    if R.n == 0:
        return SymmetricRealization(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((R.m, 0)))
    S = symmetric_similarity(R, tol)
    S1 = la.inv(S)
    S2 = S1 @ R.A
    S1 = (S1 + S1.T) / 2.0
    S2 = (S2 + S2.T) / 2.0
    return SymmetricRealization(S1, S2, R.C)


def hermitian_similarity(R: StateSpaceRealization, tol: float = 1e-8) -> np.ndarray:
    """The unique Hermitian H with A^* = H^{-1} A H and C^* = H^{-1} B."""
    if not is_minimal(R):
        raise NotMinimal("Hermitian similarity needs a minimal realization")
    if _transfer_mismatch(R, "*") > tol:
        raise NotHermitianTransfer("transfer function is not Hermitian at sample points")
    H = la.pinv(observability_matrix(R.A, R.C)) @ controllability_matrix(R.A, R.B).conj().T
    if la.norm(H - H.conj().T) > 1e-10 * max(la.norm(H), 1.0):
        raise NotHermitianTransfer("similarity matrix is not Hermitian to tolerance")
    return (H + H.conj().T) / 2.0


def to_hermitian_realization(R: StateSpaceRealization, tol: float = 1e-8) -> HermitianRealization:
    """Rewrite C (lam*I - A)^{-1} B as W (lam*H1 - H2)^{-1} W^*."""
    if R.n == 0:
        return HermitianRealization(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((R.m, 0)))
    H = hermitian_similarity(R, tol)
    H1 = la.inv(H)
    H2 = H1 @ R.A
    H1 = (H1 + H1.conj().T) / 2.0
    H2 = (H2 + H2.conj().T) / 2.0
    return HermitianRealization(H1, H2, R.C)


def _block_hankel(terms: np.ndarray, n: int, shift: int) -> np.ndarray:
    m = terms.shape[1]
    H = np.empty((n * m, n * m), dtype=terms.dtype)
    for i in range(n):
        for j in range(n):
            H[i * m : (i + 1) * m, j * m : (j + 1) * m] = terms[i + j + shift]
    return H


def _hankel_realization(mk: MarkovSequence, tol: float, hermitian: bool):
    """Shared eigendecomposition route for the symmetric and Hermitian cases."""
    n = mk.n_hint
    m = mk.m
    if n == 0 or np.all(mk.terms == 0):
        zero = np.zeros((0, 0))
        return zero, zero, np.zeros((m, 0))
    H = _block_hankel(mk.terms, n, 0)
    sym_err = la.norm(H - (H.conj().T if hermitian else H.T))
    if sym_err > 1e-10 * max(la.norm(H), 1.0):
        raise (NotHermitianTransfer if hermitian else NotSymmetricTransfer)(
            f"block Hankel matrix asymmetry {sym_err:.2e}"
        )
    w, P = la.eigh((H + H.conj().T) / 2.0 if hermitian else (H + H.T) / 2.0)
    order = np.argsort(-np.abs(w))
    w, P = w[order], P[:, order]
    rank = int(np.count_nonzero(np.abs(w) > tol * max(np.abs(w[0]), 1e-300)))
    if rank != n:
        raise RankMismatch(rank, n)
    K = w[:n]
    P1 = P[:, :n]
    Rsh = _block_hankel(mk.terms, n, 1)
    Kinv = np.diag(1.0 / K)
    S1 = Kinv
    S2 = Kinv @ (P1.conj().T if hermitian else P1.T) @ Rsh @ P1 @ Kinv
    S2 = (S2 + (S2.conj().T if hermitian else S2.T)) / 2.0
    W = P1[:m, :]
    return S1, S2, W


def symmetric_from_hankel(mk: MarkovSequence, tol: float = 1e-10) -> SymmetricRealization:
    """Symmetric realization straight from the real block Hankel matrix.

    Eigendecompose H_n = P diag(K, 0) P^T with P orthogonal; then
    S1 = K^{-1}, S2 = K^{-1} P1^T R P1 K^{-1} and W is the leading m x n
    block of P1, with R the once-shifted Hankel matrix.
    """
    if np.iscomplexobj(mk.terms) and np.any(mk.terms.imag != 0):
        raise NotSymmetricTransfer("the orthogonal Hankel route needs real data")
    S1, S2, W = _hankel_realization(mk, tol, hermitian=False)
    return SymmetricRealization(S1, S2, W)


def hermitian_from_hankel(mk: MarkovSequence, tol: float = 1e-10) -> HermitianRealization:
    """Hermitian counterpart of :func:`symmetric_from_hankel` (unitary P)."""
    S1, S2, W = _hankel_realization(mk, tol, hermitian=True)
    return HermitianRealization(S1, S2, W)


def markov_parameters(R: StateSpaceRealization, count: int) -> np.ndarray:
    """First ``count`` Laurent coefficients C A^{i-1} B, i = 1..count."""
    out = np.empty((count, R.C.shape[0], R.B.shape[1]), dtype=np.result_type(R.A, R.B, R.C))
    term = R.B
    for i in range(count):
        out[i] = R.C @ term
        term = R.A @ term
    return out
