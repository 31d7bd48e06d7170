"""Rational matrices G(lam) = D(lam) + G_sp(lam) and their system matrices.

The polynomial part lives in a recurrence basis (:mod:`ratlin.basis`), the
strictly proper part in one of three realization forms.  Everything here is
an immutable value; evaluation raises :class:`~ratlin.errors.PoleAt` when the
resolvent solve hits a pole.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .basis import (
    DegreeGradedBasis,
    ThreeTermBasis,
    basis_values,
    monomial_change_matrix,
    standard_basis,
    to_monomial,
)
from .errors import DegenerateABlock, PoleAt, ShapeMismatch

__all__ = [
    "PolyMat",
    "StateSpaceRealization",
    "SymmetricRealization",
    "HermitianRealization",
    "PoleResidue",
    "RationalMatrix",
    "SystemMatrix",
    "MinimalityReport",
    "evaluate",
    "rev_eval",
    "system_matrix",
    "is_minimal",
    "check_least_order",
    "controllability_matrix",
    "observability_matrix",
    "numerical_rank",
]

DEFAULT_RANK_TOL = 1e-10
PIVOT_TOL = 1e-12


def numerical_rank(M: np.ndarray, tol: float | None = None) -> int:
    """Rank by singular values above a relative threshold.

    Default threshold is the usual max(p, q) * eps * sigma_max convention.
    """
    M = np.atleast_2d(M)
    if M.size == 0:
        return 0
    s = la.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    if tol is None:
        tol = max(M.shape) * np.finfo(float).eps
    return int(np.count_nonzero(s > tol * s[0]))


def _pole_guarded_solve(M: np.ndarray, rhs: np.ndarray, lam) -> np.ndarray:
    """Solve M x = rhs, raising PoleAt when an LU pivot collapses."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(M)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_TOL * max(pivots.max(), 1.0):
        raise PoleAt(lam)
    return la.lu_solve((lu, piv), rhs)


def _solve_resolvent(A: np.ndarray, lam, rhs: np.ndarray) -> np.ndarray:
    """Solve (lam*I - A) x = rhs, raising PoleAt when lam is a pole."""
    n = A.shape[0]
    M = lam * np.eye(n, dtype=np.result_type(A.dtype, np.asarray(lam).dtype)) - A
    return _pole_guarded_solve(M, rhs, lam)


@dataclass(frozen=True)
class PolyMat:
    """Matrix polynomial D_0..D_k in a recurrence basis; degree is sharp."""

    basis: object
    coeffs: np.ndarray  # shape (k+1, m, m)

    def __post_init__(self):
        arr = np.array(self.coeffs)
        if arr.ndim == 1:
            arr = arr[:, None, None]
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ShapeMismatch("coeffs must be a (k+1, m, m) stack of square matrices")
        if not np.iscomplexobj(arr):
            arr = arr.astype(float)
        if np.all(arr[-1] == 0):
            raise ValueError("leading coefficient is zero; degree must be sharp")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def k(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def m(self) -> int:
        return self.coeffs.shape[1]

    def __call__(self, lam) -> np.ndarray:
        vals = basis_values(self.basis, self.k + 1, lam)[::-1]  # ascending order
        return np.tensordot(vals, self.coeffs, axes=(0, 0))

    def monomial_coeffs(self) -> np.ndarray:
        return to_monomial(self.basis, self.coeffs)


@dataclass(frozen=True)
class StateSpaceRealization:
    """Strictly proper part as C (lam*I - A)^{-1} B."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A))
        B = np.atleast_2d(np.asarray(self.B))
        C = np.atleast_2d(np.asarray(self.C))
        n = A.shape[0]
        if A.shape != (n, n) or B.shape[0] != n or C.shape[1] != n:
            raise ShapeMismatch("inconsistent realization dimensions")
        for name, val in (("A", A), ("B", B), ("C", C)):
            val = val if np.iscomplexobj(val) else val.astype(float)
            val.flags.writeable = False
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def __call__(self, lam) -> np.ndarray:
        return self.C @ _solve_resolvent(self.A, lam, self.B)

    def to_state_space(self) -> "StateSpaceRealization":
        return self


@dataclass(frozen=True)
class SymmetricRealization:
    """Strictly proper part as W (lam*S1 - S2)^{-1} W^T with S1, S2 symmetric."""

    S1: np.ndarray
    S2: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        for name in ("S1", "S2", "W"):
            val = np.atleast_2d(np.asarray(getattr(self, name)))
            val = val if np.iscomplexobj(val) else val.astype(float)
            val.flags.writeable = False
            object.__setattr__(self, name, val)
        n = self.S1.shape[0]
        if self.S1.shape != (n, n) or self.S2.shape != (n, n) or self.W.shape[1] != n:
            raise ShapeMismatch("inconsistent symmetric realization dimensions")

    @property
    def n(self) -> int:
        return self.S1.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[0]

    def __call__(self, lam) -> np.ndarray:
        return self.W @ _pole_guarded_solve(lam * self.S1 - self.S2, self.W.T, lam)

    def to_state_space(self) -> StateSpaceRealization:
        S1inv = la.inv(self.S1)
        return StateSpaceRealization(S1inv @ self.S2, S1inv @ self.W.T, self.W)


@dataclass(frozen=True)
class HermitianRealization:
    """Strictly proper part as W (lam*H1 - H2)^{-1} W^* with H1, H2 Hermitian."""

    H1: np.ndarray
    H2: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        for name in ("H1", "H2", "W"):
            val = np.atleast_2d(np.asarray(getattr(self, name))).astype(complex)
            val.flags.writeable = False
            object.__setattr__(self, name, val)
        n = self.H1.shape[0]
        if self.H1.shape != (n, n) or self.H2.shape != (n, n) or self.W.shape[1] != n:
            raise ShapeMismatch("inconsistent Hermitian realization dimensions")

    @property
    def n(self) -> int:
        return self.H1.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[0]

    def __call__(self, lam) -> np.ndarray:
        return self.W @ _pole_guarded_solve(lam * self.H1 - self.H2, self.W.conj().T, lam)

    def to_state_space(self) -> StateSpaceRealization:
        H1inv = la.inv(self.H1)
        return StateSpaceRealization(H1inv @ self.H2, H1inv @ self.W.conj().T, self.W)


@dataclass(frozen=True)
class PoleResidue:
    """Strictly proper part as sum_i R_i / (lam - p_i) with distinct poles."""

    poles: np.ndarray
    residues: np.ndarray  # shape (q, m, m)

    def __post_init__(self):
        poles = np.atleast_1d(np.asarray(self.poles))
        residues = np.asarray(self.residues)
        if residues.ndim == 2:
            residues = residues[None]
        if residues.ndim == 0:
            residues = residues.reshape(1, 1, 1)
        if residues.shape[0] != poles.shape[0]:
            raise ShapeMismatch("one residue matrix per pole required")
        if poles.size > 1:
            sep = np.abs(poles[:, None] - poles[None, :])
            np.fill_diagonal(sep, np.inf)
            if sep.min() < 1e-10 * max(1.0, np.abs(poles).max()):
                raise ValueError("poles must be pairwise distinct")
        for name, val in (("poles", poles), ("residues", residues)):
            val = val if np.iscomplexobj(val) else val.astype(float)
            val.flags.writeable = False
            object.__setattr__(self, name, val)

    @property
    def m(self) -> int:
        return self.residues.shape[1]

    def __call__(self, lam) -> np.ndarray:
        d = lam - self.poles
        if np.abs(d).min() < PIVOT_TOL * max(1.0, np.abs(lam)):
            raise PoleAt(lam)
        return np.tensordot(1.0 / d, self.residues, axes=(0, 0))


@dataclass(frozen=True)
class RationalMatrix:
    """G = polynomial part + strictly proper part, with a structure tag."""

    poly: PolyMat | None
    sp: object = None  # realization object with __call__/to_state_space, or None
    structure: str = "general"

    def __post_init__(self):
        if self.poly is None and self.sp is None:
            raise ValueError("G must have a polynomial or strictly proper part")
        if self.poly is not None and self.sp is not None:
            if self.poly.m != self.sp.m:
                raise ShapeMismatch("polynomial and strictly proper sizes differ")
        if self.structure not in ("general", "symmetric", "hermitian"):
            raise ValueError(f"unknown structure tag {self.structure!r}")

    @property
    def m(self) -> int:
        return self.poly.m if self.poly is not None else self.sp.m

    @property
    def k(self) -> int:
        """Degree of the polynomial part (0 when there is none)."""
        return self.poly.k if self.poly is not None else 0

    @property
    def n(self) -> int:
        return 0 if self.sp is None else self.sp.n

    @property
    def basis(self):
        return self.poly.basis if self.poly is not None else None

    def __call__(self, lam) -> np.ndarray:
        return evaluate(self, lam)

    def state_space(self) -> StateSpaceRealization | None:
        return None if self.sp is None else self.sp.to_state_space()

    def leading_monomial_coeff(self) -> np.ndarray:
        """Coefficient of lam**k of the polynomial part in the monomial basis."""
        if self.poly is None:
            return np.zeros((self.m, self.m))
        return self.poly.monomial_coeffs()[-1]


def evaluate(G: RationalMatrix, lam) -> np.ndarray:
    """G(lam), raising PoleAt when lam is numerically a pole."""
    m = G.m
    out = np.zeros((m, m), dtype=complex if np.iscomplexobj(np.asarray(lam)) else float)
    if G.poly is not None:
        out = out + G.poly(lam)
    if G.sp is not None:
        out = out + G.sp(lam)
    return out


def rev_eval(G: RationalMatrix, lam) -> np.ndarray:
    """Reversal lam**d * G(1/lam) with d the polynomial degree (0 if proper).

    At lam = 0 the analytic limit is returned: the degree-d monomial
    coefficient of the polynomial part (the zero matrix for strictly proper G).
    """
    d = G.k if G.poly is not None else 0
    if lam != 0:
        return lam**d * evaluate(G, 1.0 / lam)
    if G.poly is None:
        return np.zeros((G.m, G.m))
    return G.poly.monomial_coeffs()[-1]


@dataclass(frozen=True)
class SystemMatrix:
    """Polynomial system matrix [[A(lam), B(lam)], [-C(lam), D(lam)]].

    ``poly`` holds the assembled coefficients; ``n`` is the state order so
    callers can split vectors conformably.
    """

    poly: PolyMat
    n: int

    def __call__(self, lam) -> np.ndarray:
        return self.poly(lam)

    @property
    def size(self) -> int:
        return self.poly.m

    def a_block(self, lam) -> np.ndarray:
        return self.poly(lam)[: self.n, : self.n]


def system_matrix(G: RationalMatrix) -> SystemMatrix:
    """Assemble [[lam*I - A, B], [-C, D(lam)]] as one PolyMat.

    The Schur complement of the (1,1) block reproduces G at any non-pole point.
    """
    ss = G.state_space()
    n = 0 if ss is None else ss.n
    m = G.m
    if n == 0:
        if G.poly is None:
            raise ValueError("empty rational matrix")
        return SystemMatrix(G.poly, 0)

    if G.poly is not None:
        basis = G.poly.basis
        k = max(G.poly.k, 1)
        dpart = G.poly.coeffs
    else:
        basis = standard_basis("monomial", 1)
        k = 1
        dpart = None

    dtype = complex if (np.iscomplexobj(ss.A) or (dpart is not None and np.iscomplexobj(dpart))) else float
    coeffs = np.zeros((k + 1, n + m, n + m), dtype=dtype)
    # lam expressed in the basis: lam = a*b_1 + b*b_0 with b_j the basis polys
    if isinstance(basis, DegreeGradedBasis):
        lin1, lin0 = 1.0, basis.alpha[0]
    else:
        lin1, lin0 = basis.alpha[0], basis.beta[0]
    coeffs[1, :n, :n] = lin1 * np.eye(n)
    coeffs[0, :n, :n] = lin0 * np.eye(n) - ss.A
    coeffs[0, :n, n:] = ss.B
    coeffs[0, n:, :n] = -ss.C
    if dpart is not None:
        for i in range(dpart.shape[0]):
            coeffs[i, n:, n:] = dpart[i]
    return SystemMatrix(PolyMat(basis, coeffs), n)


def controllability_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """[B, A B, ..., A^{n-1} B]."""
    n = A.shape[0]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks)


def observability_matrix(A: np.ndarray, C: np.ndarray) -> np.ndarray:
    """[C; C A; ...; C A^{n-1}]."""
    n = A.shape[0]
    blocks = [C]
    for _ in range(n - 1):
        blocks.append(blocks[-1] @ A)
    return np.vstack(blocks)


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    rank_controllability: int
    rank_observability: int
    n: int

    def __bool__(self) -> bool:
        return self.minimal


def is_minimal(R: StateSpaceRealization, tol: float | None = None) -> MinimalityReport:
    """Controllability/observability rank test for least order."""
    n = R.n
    if n == 0:
        return MinimalityReport(True, 0, 0, 0)
    rc = numerical_rank(controllability_matrix(R.A, R.B), tol)
    ro = numerical_rank(observability_matrix(R.A, R.C), tol)
    return MinimalityReport(rc == n and ro == n, rc, ro, n)


def check_least_order(L, tol: float = DEFAULT_RANK_TOL) -> bool:
    """Least-order certificate for a pencil's (1,1) state block.

    True iff the leading block A1 is invertible and the tall/wide pencils
    [A; C] and [A, B] keep full rank n at every eigenvalue of the block pencil
    (the only points where the rank can drop).
    """
    n = L.meta.n
    if n == 0:
        return True
    X, Y = L.X, L.Y
    A1, A0 = X[:n, :n], Y[:n, :n]
    B1, B0 = X[:n, n:], Y[:n, n:]
    C1, C0 = -X[n:, :n], -Y[n:, :n]

    rng = np.random.default_rng(0)
    probes = rng.standard_normal(3) + 1.2
    if all(abs(la.det(A1 * t + A0)) < 1e-13 for t in probes):
        raise DegenerateABlock("det of the (1,1) block pencil vanishes identically")

    s = la.svd(A1, compute_uv=False)
    if s[-1] <= tol * s[0]:
        return False
    mus = la.eigvals(-A0, A1)
    for mu in mus:
        if not np.isfinite(mu):
            continue
        col = np.vstack([A1 * mu + A0, C1 * mu + C0])
        row = np.hstack([A1 * mu + A0, B1 * mu + B0])
        if numerical_rank(col, tol) != n or numerical_rank(row, tol) != n:
            return False
    return True
