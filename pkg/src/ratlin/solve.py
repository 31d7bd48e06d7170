"""Generalized eigensolver plus the maps between pencil, transfer-function and
rational-matrix eigenvectors.

Finite eigenvalues come from the QZ backend; eigenvectors are re-extracted
from a rank-revealing factorization of L(lam0) at each clustered eigenvalue so
that multiple eigenvalues yield a full null-space basis.  Recovery of
rational-matrix eigenvectors depends only on the pencil metadata, including
across strict-equivalence transforms.  Left eigenvectors follow the plain
transpose convention y^T L = 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .basis import basis_values
from .errors import (
    BackendFailure,
    NotAnEigenpair,
    PoleAt,
    PoleEigenvalue,
    SingularABlock,
)
from .linearize import M1_LIKE, Pencil, base_vector, build_family
from .ratmodel import RationalMatrix, SystemMatrix, evaluate, numerical_rank

__all__ = [
    "EigenCluster",
    "EigenSolution",
    "RecoveredPair",
    "RepResult",
    "solve_gep",
    "recover_right",
    "recover_left",
    "recover_infinity",
    "lift_right",
    "lift_left",
    "system_recover",
    "system_lift",
    "solve_rep",
]

DEFAULT_EIG_TOL = 1e-8
DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-10
POLE_COINCIDENCE_TOL = 1e-8


@dataclass
class EigenCluster:
    lam: complex
    multiplicity: int  # algebraic, from the backend's eigenvalue count
    right: np.ndarray  # N x t null-space basis of L(lam)
    left: np.ndarray  # N x t basis with y^T L(lam) = 0
    pole_flag: bool
    sigma_min: float


@dataclass
class EigenSolution:
    finite: list
    infinite_right: np.ndarray
    infinite_left: np.ndarray
    infinite_count: int
    pole_eigenvalues: np.ndarray
    raw_eigenvalues: np.ndarray


@dataclass
class RecoveredPair:
    lam: complex | None
    vector: np.ndarray
    side: str  # "right" | "left"
    at_infinity: bool = False
    residual: float | None = None


def _cluster(vals: np.ndarray, rtol: float):
    """Greedy clustering; returns (representatives, counts, members)."""
    reps: list[complex] = []
    members: list[list[complex]] = []
    for lam in vals:
        placed = False
        for idx, rep in enumerate(reps):
            if abs(lam - rep) <= rtol * max(1.0, abs(lam), abs(rep)):
                members[idx].append(lam)
                reps[idx] = np.mean(members[idx])
                placed = True
                break
        if not placed:
            reps.append(lam)
            members.append([lam])
    return reps, [len(ms) for ms in members]


def solve_gep(L: Pencil, tol: float = DEFAULT_RESIDUAL_TOL, *,
              cluster_tol: float = DEFAULT_EIG_TOL,
              rank_tol: float = DEFAULT_RANK_TOL) -> EigenSolution:
    """All finite eigenvalues (clustered) and the infinite part of a pencil.

    Null-space bases satisfy ||L(lam0) z|| <= tol * (|lam0| ||X|| + ||Y||);
    the infinite count is the rank deficiency of the leading matrix.
    """
    X, Y = L.X, L.Y
    N = L.size
    try:
        alpha, beta = la.eig(-Y, X, right=False, homogeneous_eigvals=True)
    except (la.LinAlgError, ValueError) as exc:
        raise BackendFailure(f"generalized eigenvalue backend failed: {exc}")
    finite_mask = np.abs(beta) > 1e-12 * (np.abs(alpha) + np.abs(beta))
    lams = alpha[finite_mask] / beta[finite_mask]

    n = L.meta.n
    pole_eigs = np.array([], dtype=complex)
    if n > 0:
        pa, pb = la.eig(-Y[:n, :n], X[:n, :n], right=False, homogeneous_eigvals=True)
        pmask = np.abs(pb) > 1e-12 * (np.abs(pa) + np.abs(pb))
        pole_eigs = pa[pmask] / pb[pmask]

    norm_x = la.norm(X, 2)
    norm_y = la.norm(Y, 2)
    reps, counts = _cluster(lams, cluster_tol)
    clusters = []
    for rep, count in zip(reps, counts):
        M = L.at(rep)
        U, s, Vh = la.svd(M)
        thr = tol * (abs(rep) * norm_x + norm_y)
        t = int(np.count_nonzero(s <= thr))
        t = max(t, 1)
        right = Vh[-t:].conj().T
        left = U[:, -t:].conj()
        flag = bool(pole_eigs.size) and bool(
            np.any(np.abs(pole_eigs - rep) <= POLE_COINCIDENCE_TOL * np.maximum(1.0, np.maximum(np.abs(pole_eigs), abs(rep))))
        )
        clusters.append(EigenCluster(rep, count, right, left, flag, float(s[-1])))

    Ux, sx, Vhx = la.svd(X)
    rank_x = int(np.count_nonzero(sx > rank_tol * max(sx[0], 1e-300))) if N else 0
    count_inf = N - rank_x
    inf_right = Vhx[rank_x:].conj().T
    inf_left = Ux[:, rank_x:].conj()
    return EigenSolution(clusters, inf_right, inf_left, count_inf, pole_eigs, lams)


def _extract_right(meta, x: np.ndarray) -> np.ndarray:
    k, m = meta.k, meta.m
    fam = meta.family
    if fam in M1_LIKE:
        return x[(k - 1) * m :]
    if fam == "M2":
        w = meta.ansatz
        return np.tensordot(w, x.reshape(k, m), axes=(0, 0))
    if fam == "BK_ODD":
        q = (k - 1) // 2
        return x[q * m : (q + 1) * m]
    raise ValueError(f"no recovery map for family {fam!r}")


def _extract_left(meta, x: np.ndarray) -> np.ndarray:
    k, m = meta.k, meta.m
    fam = meta.family
    if fam in M1_LIKE:
        v = meta.ansatz
        return np.tensordot(v, x.reshape(k, m), axes=(0, 0))
    if fam == "M2":
        return x[(k - 1) * m :]
    if fam == "BK_ODD":
        q = (k - 1) // 2
        return x[q * m : (q + 1) * m]
    raise ValueError(f"no recovery map for family {fam!r}")


def _extract_right_inf(meta, x: np.ndarray) -> np.ndarray:
    if meta.family == "M2":
        return np.tensordot(meta.ansatz, x.reshape(meta.k, meta.m), axes=(0, 0))
    return x[: meta.m]


def _extract_left_inf(meta, x: np.ndarray) -> np.ndarray:
    if meta.family in M1_LIKE:
        return np.tensordot(meta.ansatz, x.reshape(meta.k, meta.m), axes=(0, 0))
    return x[: meta.m]


def _normalized(u: np.ndarray) -> np.ndarray:
    nrm = la.norm(u)
    return u if nrm == 0 else u / nrm


def recover_right(L: Pencil, sol: EigenSolution) -> list:
    """Rational-matrix right eigenvectors from pencil ones; pole-flagged
    eigenvalues are skipped (they need not be eigenvalues of G)."""
    pairs = []
    n = L.meta.n
    for cl in sol.finite:
        if cl.pole_flag:
            continue
        for col in cl.right.T:
            zb = base_vector(L, col, "right")
            u = _extract_right(L.meta, zb[n:])
            pairs.append(RecoveredPair(cl.lam, _normalized(u), "right"))
    return pairs


def recover_left(L: Pencil, sol: EigenSolution) -> list:
    pairs = []
    n = L.meta.n
    for cl in sol.finite:
        if cl.pole_flag:
            continue
        for col in cl.left.T:
            zb = base_vector(L, col, "left")
            u = _extract_left(L.meta, zb[n:])
            pairs.append(RecoveredPair(cl.lam, _normalized(u), "left"))
    return pairs


def recover_infinity(L: Pencil, sol: EigenSolution) -> list:
    """Eigenvectors at infinity: null vectors of the leading coefficient of
    the polynomial part, read off from null vectors of the pencil's X."""
    pairs = []
    n = L.meta.n
    if sol.infinite_count == 0:
        return pairs
    for col in sol.infinite_right.T:
        zb = base_vector(L, col, "right")
        u = _extract_right_inf(L.meta, zb[n:])
        pairs.append(RecoveredPair(None, _normalized(u), "right", at_infinity=True))
    for col in sol.infinite_left.T:
        zb = base_vector(L, col, "left")
        u = _extract_left_inf(L.meta, zb[n:])
        pairs.append(RecoveredPair(None, _normalized(u), "left", at_infinity=True))
    return pairs


def _to_current_right(L: Pencil, z_base: np.ndarray) -> np.ndarray:
    if L.meta.right_trace is None:
        return z_base
    return la.solve(L.meta.right_trace, z_base)


def _to_current_left(L: Pencil, z_base: np.ndarray) -> np.ndarray:
    if L.meta.left_trace is None:
        return z_base
    return la.solve(L.meta.left_trace.T, z_base)


def residual_scale(G: RationalMatrix, lam) -> float:
    """Magnitude of G at lam for relative residuals: coefficient norms weighted
    by basis-polynomial magnitudes plus the resolvent part.

    Dominates ||G(lam)|| and, unlike it, does not collapse when lam is an
    eigenvalue of a 1 x 1 problem.
    """
    scale = 0.0
    if G.poly is not None:
        vals = basis_values(G.poly.basis, G.poly.k + 1, lam)
        norms = np.array([la.norm(C, 2) for C in G.poly.coeffs])
        scale += float(np.abs(vals[::-1]) @ norms)
    ss = G.state_space()
    if ss is not None and ss.n > 0:
        M = lam * np.eye(ss.n) - ss.A
        scale += la.norm(ss.C, 2) * la.norm(la.solve(M, ss.B), 2)
    return max(scale, 1e-300)


def _check_eigpair(G: RationalMatrix, lam, u: np.ndarray, side: str, tol: float) -> np.ndarray:
    try:
        Gl = evaluate(G, lam)
    except PoleAt:
        raise PoleEigenvalue(lam)
    r = Gl @ u if side == "right" else u @ Gl
    if la.norm(r) > tol * residual_scale(G, lam) * la.norm(u):
        raise NotAnEigenpair(f"residual {la.norm(r):.2e} at lambda={lam}")
    return Gl


def _state_y_solve(L: Pencil, lam, u: np.ndarray) -> np.ndarray:
    """y with (lam*I - A) Y y + B u = 0, in the base pencil's coordinates."""
    ss = L.meta.realization
    n = L.meta.n
    M = (lam * np.eye(n) - ss.A) @ L.meta.state_y
    return -la.solve(M, ss.B @ u)


def _null_space_at(L: Pencil, lam, tol: float):
    M = L.at(lam)
    U, s, Vh = la.svd(M)
    thr = tol * (abs(lam) * la.norm(L.X, 2) + la.norm(L.Y, 2))
    t = int(np.count_nonzero(s <= thr))
    if t == 0:
        raise NotAnEigenpair(f"L(lambda) has no null space at lambda={lam}")
    return Vh[-t:].conj().T, U[:, -t:].conj()


def lift_right(G: RationalMatrix, L: Pencil, lam, u: np.ndarray, tol: float = DEFAULT_RESIDUAL_TOL) -> np.ndarray:
    """Pencil right eigenvector from a rational-matrix right eigenpair.

    For the right-ansatz families the polynomial part is the basis vector
    tensored with u and the state part solves the first block row; for the
    left-ansatz family the vector is matched inside the pencil null space.
    """
    u = np.asarray(u).reshape(-1)
    _check_eigpair(G, lam, u, "right", tol)
    meta = L.meta
    n, k, m = meta.n, meta.k, meta.m
    fam = meta.family
    if fam in M1_LIKE:
        x = np.kron(basis_values(meta.basis, k, lam), u)
        parts = [x] if n == 0 else [_state_y_solve(L, lam, u), x]
        return _to_current_right(L, np.concatenate(parts))
    if fam == "BK_ODD":
        q = (k - 1) // 2
        lam_pows = lam ** np.arange(q, -1, -1)
        xm = np.kron(lam_pows, u)
        ss = meta.realization
        rhs_rows = []
        c = G.poly.coeffs
        for i in range(q + 1):
            rhs_rows.append(-(c[k - 2 * i] * lam + c[k - 1 - 2 * i]) @ xm[i * m : (i + 1) * m])
        rhs = np.concatenate(rhs_rows)
        parts = []
        if n > 0:
            y = _state_y_solve(L, lam, u)
            rhs[q * m : (q + 1) * m] -= (ss.C @ meta.state_x.T) @ y
            parts.append(y)
        lq = np.zeros((q, q + 1), dtype=complex)
        for r in range(q):
            lq[r, r] = -1.0
            lq[r, r + 1] = lam
        xl, *_ = np.linalg.lstsq(np.kron(lq.T, np.eye(m)), rhs, rcond=None)
        parts.extend([xm, xl])
        return _to_current_right(L, np.concatenate(parts))
    if fam == "M2":
        right, _ = _null_space_at(L, lam, tol)
        basis_u = np.stack(
            [_extract_right(meta, base_vector(L, col, "right")[n:]) for col in right.T], axis=1
        )
        coeff, res, *_ = np.linalg.lstsq(basis_u, u, rcond=None)
        z = right @ coeff
        if la.norm(basis_u @ coeff - u) > tol * max(1.0, la.norm(u)):
            raise NotAnEigenpair("vector is not reachable from the pencil null space")
        return z
    raise ValueError(f"no lift for family {fam!r}")


def lift_left(G: RationalMatrix, L: Pencil, lam, u: np.ndarray, tol: float = DEFAULT_RESIDUAL_TOL) -> np.ndarray:
    """Pencil left eigenvector (y^T L(lam) = 0 convention) from a rational pair."""
    u = np.asarray(u).reshape(-1)
    _check_eigpair(G, lam, u, "left", tol)
    meta = L.meta
    n, k, m = meta.n, meta.k, meta.m
    fam = meta.family
    if fam == "M2":
        x = np.kron(basis_values(meta.basis, k, lam), u)
        if n == 0:
            return _to_current_left(L, x)
        ss = meta.realization
        M = (meta.state_x @ (lam * np.eye(n) - ss.A)).T
        y = la.solve(M, ss.C.T @ u)
        return _to_current_left(L, np.concatenate([y, x]))
    if fam in M1_LIKE or fam == "BK_ODD":
        _, left = _null_space_at(L, lam, tol)
        basis_u = np.stack(
            [_extract_left(meta, base_vector(L, col, "left")[n:]) for col in left.T], axis=1
        )
        coeff, *_ = np.linalg.lstsq(basis_u, u, rcond=None)
        if la.norm(basis_u @ coeff - u) > tol * max(1.0, la.norm(u)):
            raise NotAnEigenpair("vector is not reachable from the pencil null space")
        return left @ coeff
    raise ValueError(f"no lift for family {fam!r}")


def _system_a_lu(P: SystemMatrix, lam):
    M = P(lam)
    n = P.n
    A = M[:n, :n]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(A)
    pivots = np.abs(np.diag(lu))
    if pivots.size and pivots.min() < 1e-12 * max(pivots.max(), 1.0):
        raise SingularABlock(f"state block singular at lambda={lam}")
    return M, (lu, piv)


def system_recover(P: SystemMatrix, lam, z: np.ndarray, side: str = "right") -> np.ndarray:
    """Truncate a system-matrix null vector [y; x] to the transfer function's x."""
    z = np.asarray(z).reshape(-1)
    _system_a_lu(P, lam)
    return z[P.n :]


def system_lift(P: SystemMatrix, lam, x: np.ndarray, side: str = "right") -> np.ndarray:
    """Extend a transfer-function null vector to the system matrix: solve for y."""
    x = np.asarray(x).reshape(-1)
    M, lu = _system_a_lu(P, lam)
    n = P.n
    if n == 0:
        return x
    if side == "right":
        y = -la.lu_solve(lu, M[:n, n:] @ x)
    else:
        # y^T A(lam) - x^T C(lam) = 0 with C = -M[n:, :n]
        y = la.solve(M[:n, :n].T, -M[n:, :n].T @ x)
    return np.concatenate([y, x])


@dataclass
class RepResult:
    pencil: Pencil
    solution: EigenSolution
    right: list
    left: list
    infinite: list
    pole_candidates: list

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array(sorted({p.lam for p in self.right}, key=lambda z: (z.real, z.imag)))


def _fill_residuals(G: RationalMatrix, pairs: list) -> None:
    dk = G.poly.coeffs[-1] if G.poly is not None else np.zeros((G.m, G.m))
    ndk = la.norm(dk)
    for p in pairs:
        if p.at_infinity:
            r = dk @ p.vector if p.side == "right" else p.vector @ dk
            p.residual = float(la.norm(r) / max(ndk * la.norm(p.vector), 1e-300))
            continue
        try:
            Gl = evaluate(G, p.lam)
        except PoleAt:
            p.residual = np.inf
            continue
        r = Gl @ p.vector if p.side == "right" else p.vector @ Gl
        p.residual = float(la.norm(r) / (residual_scale(G, p.lam) * max(la.norm(p.vector), 1e-300)))


def solve_rep(G: RationalMatrix, family: str = "m1", *, with_left: bool = True,
              tol: float = DEFAULT_RESIDUAL_TOL, rng=None, **build_kw) -> RepResult:
    """Build a pencil of the requested family, solve it, and recover
    eigenpairs of G.  Pole-coincident eigenvalues are reported separately."""
    rng = np.random.default_rng(42) if rng is None else rng
    probe = complex(rng.normal(), rng.normal())
    try:
        if numerical_rank(evaluate(G, probe)) < G.m:
            warnings.warn("G appears rank deficient at a random probe point", UserWarning)
    except PoleAt:
        pass
    pencil = build_family(G, family, **build_kw)
    sol = solve_gep(pencil, tol)
    right = recover_right(pencil, sol)
    left = recover_left(pencil, sol) if with_left else []
    inf_pairs = recover_infinity(pencil, sol)
    _fill_residuals(G, right)
    _fill_residuals(G, left)
    _fill_residuals(G, inf_pairs)
    poles = [cl.lam for cl in sol.finite if cl.pole_flag]
    return RepResult(pencil, sol, right, left, inf_pairs, poles)
