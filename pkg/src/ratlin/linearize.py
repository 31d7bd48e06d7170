"""Pencil constructors: every linearization family and strict equivalence.

All constructors return a :class:`Pencil` L(lam) = lam*X + Y whose metadata
records the block layout (state order n, polynomial degree k, block size m),
the construction family, the ansatz vector and the state transforms.  The
metadata is what makes eigenvector recovery in :mod:`ratlin.solve`
self-contained, including across strict-equivalence transforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as la

from .basis import DegreeGradedBasis, ThreeTermBasis, degree_graded_pencil, m_phi_pencil
from .errors import (
    DegreeTooLow,
    EvenDegree,
    NonRealBasis,
    NonRealMu,
    NotSymmetric,
    NumericallySingularSystem,
    ShapeMismatch,
    SingularAnsatz,
    SingularLeadingCoefficient,
    SingularTransform,
    SingularXY,
    NonMinimalWarning,
)
from .ratmodel import (
    HermitianRealization,
    PolyMat,
    RationalMatrix,
    StateSpaceRealization,
    SymmetricRealization,
    is_minimal,
)
from .realize import to_hermitian_realization, to_symmetric_realization

__all__ = [
    "Pencil",
    "PencilMeta",
    "AnsatzSpec",
    "TransformSpec",
    "FAMILIES",
    "M1_LIKE",
    "build_F",
    "build_m1",
    "build_m2",
    "solve_dm_pencil",
    "build_symmetric",
    "build_hermitian",
    "build_block_kronecker_symmetric_odd",
    "build_degree_graded",
    "build_family",
    "block_transpose",
    "block_transpose_matrix",
    "strict_equiv",
    "transfer_eval",
    "base_transfer_eval",
]

FAMILIES = ("F", "M1", "M2", "DM", "SYM", "HERM", "BK_ODD", "DG")
# families whose pencils satisfy the right-ansatz identity with vector v
M1_LIKE = frozenset({"F", "M1", "DM", "SYM", "HERM", "DG"})

NONSINGULAR_TOL = 1e-10


def _require_nonsingular(M, what: str, exc=SingularTransform, tol: float = NONSINGULAR_TOL):
    M = np.atleast_2d(M)
    if M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"{what} must be square")
    if M.shape[0] == 0:
        return
    s = la.svd(M, compute_uv=False)
    if s[-1] <= tol * max(s[0], 1e-300):
        raise exc(f"{what} is numerically singular")


def _sym_exact(M: np.ndarray) -> np.ndarray:
    return (M + M.T) / 2.0


def _herm_exact(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2.0


def block_transpose_matrix(M: np.ndarray, p: int, q: int, m: int) -> np.ndarray:
    """Transpose the p x q grid of m x m blocks without touching block interiors."""
    if M.shape != (p * m, q * m):
        raise ShapeMismatch(f"matrix is {M.shape}, expected ({p * m}, {q * m})")
    return M.reshape(p, m, q, m).transpose(2, 1, 0, 3).reshape(q * m, p * m)


@dataclass
class PencilMeta:
    """Block layout and construction data carried by every pencil."""

    n: int
    k: int
    m: int
    family: str
    basis: object = None
    ansatz: np.ndarray | None = None  # right ansatz v (M1-like) / left ansatz w (M2)
    state_x: np.ndarray | None = None
    state_y: np.ndarray | None = None
    realization: StateSpaceRealization | None = None
    h_matrix: np.ndarray | None = None  # the H of [v (x) I  H] for DM pencils
    left_trace: np.ndarray | None = None  # accumulated strict-equivalence factors
    right_trace: np.ndarray | None = None
    structured: bool = True  # False once a non-congruent transform is applied


@dataclass
class Pencil:
    """L(lam) = lam*X + Y with recovery metadata."""

    X: np.ndarray
    Y: np.ndarray
    meta: PencilMeta

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X))
        self.Y = np.atleast_2d(np.asarray(self.Y))
        if self.X.shape != self.Y.shape or self.X.shape[0] != self.X.shape[1]:
            raise ShapeMismatch("X and Y must be square and of equal size")

    @property
    def size(self) -> int:
        return self.X.shape[0]

    def at(self, lam) -> np.ndarray:
        return lam * self.X + self.Y

    def __call__(self, lam) -> np.ndarray:
        return self.at(lam)


@dataclass(frozen=True)
class AnsatzSpec:
    """Ansatz vector plus the free factor H of the one-sided families."""

    v: np.ndarray
    H: np.ndarray

    @staticmethod
    def default(k: int, m: int, last: bool = False) -> "AnsatzSpec":
        v = np.zeros(k)
        v[-1 if last else 0] = 1.0
        H = np.vstack([np.zeros((m, (k - 1) * m)), np.eye((k - 1) * m)])
        return AnsatzSpec(v, H)


@dataclass(frozen=True)
class TransformSpec:
    """Factors of the strict equivalence [[Q1,0],[W,Q2]] L [[Q3,Z],[0,Q4]]."""

    Q1: np.ndarray
    Q2: np.ndarray
    Q3: np.ndarray
    Q4: np.ndarray
    W: np.ndarray | None = None
    Z: np.ndarray | None = None

    @staticmethod
    def congruence(Q: np.ndarray, P: np.ndarray, R: np.ndarray | None = None, hermitian: bool = False) -> "TransformSpec":
        """Structured congruence: right factor is the (conjugate) transpose of the left."""
        Q = np.atleast_2d(Q)
        P = np.atleast_2d(P)
        if R is None:
            R = np.zeros((P.shape[0], Q.shape[0]))
        adj = (lambda M: M.conj().T) if hermitian else (lambda M: M.T)
        return TransformSpec(Q1=Q, Q2=P, Q3=adj(Q), Q4=adj(P), W=R, Z=adj(R))


def _f_blocks(D: PolyMat):
    """(X, Y) of the companion-style pencil built on the recurrence pencil.

    Top block row represents the degree-k coefficient folded into the first
    two block columns; the remaining rows are the recurrence pencil kron I.
    """
    k, m = D.k, D.m
    if k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    basis = D.basis
    dtype = np.result_type(D.coeffs.dtype, float)
    X = np.zeros((k * m, k * m), dtype=dtype)
    Y = np.zeros((k * m, k * m), dtype=dtype)
    c = D.coeffs
    if isinstance(basis, DegreeGradedBasis):
        if basis.size < k:
            raise ValueError(f"basis stores {basis.size} coefficients, need {k}")
        X[:m, :m] = c[k]
        Y[:m, :m] = c[k - 1] - basis.alpha[k - 1] * c[k]
        for j in range(1, k):
            Y[:m, j * m : (j + 1) * m] = c[k - 1 - j] + basis.beta(k, k - 1 - j) * c[k]
        MX, MY = degree_graded_pencil(basis, k)
    else:
        if basis.size < k:
            raise ValueError(f"basis stores {basis.size} coefficients, need {k}")
        ak = basis.alpha[k - 1]
        X[:m, :m] = c[k] / ak
        Y[:m, :m] = c[k - 1] - (basis.beta[k - 1] / ak) * c[k]
        Y[:m, m : 2 * m] = c[k - 2] - (basis.gamma[k - 1] / ak) * c[k]
        for j in range(2, k):
            Y[:m, j * m : (j + 1) * m] = c[k - 1 - j]
        MX, MY = m_phi_pencil(basis, k)
    eye = np.eye(m)
    X[m:, :] = np.kron(MX, eye)
    Y[m:, :] = np.kron(MY, eye)
    return X, Y


def build_F(D: PolyMat) -> Pencil:
    """The distinguished right-ansatz pencil of a matrix polynomial.

    For the monomial basis this is exactly the first companion form.
    """
    X, Y = _f_blocks(D)
    meta = PencilMeta(n=0, k=D.k, m=D.m, family="F", basis=D.basis, ansatz=_unit(D.k, 0))
    return Pencil(X, Y, meta)


def _unit(k: int, idx: int) -> np.ndarray:
    v = np.zeros(k)
    v[idx] = 1.0
    return v


def _state_parts(G: RationalMatrix, X, Y):
    """Validated state transforms and the realization actually used."""
    ss = G.state_space()
    n = 0 if ss is None else ss.n
    if n == 0:
        return None, None, None
    X = np.eye(n) if X is None else np.atleast_2d(np.asarray(X))
    Y = np.eye(n) if Y is None else np.atleast_2d(np.asarray(Y))
    if X.shape != (n, n) or Y.shape != (n, n):
        raise ShapeMismatch("state transforms must be n x n")
    _require_nonsingular(X, "state transform X", SingularXY)
    _require_nonsingular(Y, "state transform Y", SingularXY)
    if not is_minimal(ss):
        warnings.warn("state-space realization is not minimal", NonMinimalWarning)
    return ss, X, Y


def _assemble_rational(G, Lx, Ly, ansatz, Xs, Ys, family, side, ss, hmat=None):
    """Wrap a polynomial-part pencil with the state coupling blocks."""
    k, m = G.k, G.m
    n = 0 if ss is None else ss.n
    N = n + k * m
    dtype = np.result_type(Lx.dtype, Ly.dtype, complex if ss is not None and np.iscomplexobj(ss.A) else float)
    PX = np.zeros((N, N), dtype=dtype)
    PY = np.zeros((N, N), dtype=dtype)
    PX[n:, n:] = Lx
    PY[n:, n:] = Ly
    if n > 0:
        XY = Xs @ Ys
        PX[:n, :n] = XY
        PY[:n, :n] = -(Xs @ ss.A @ Ys)
        XB = Xs @ ss.B
        CY = ss.C @ Ys
        if side == "m1":
            PY[:n, n + (k - 1) * m :] = XB
            PY[n:, :n] = -np.kron(ansatz[:, None], CY)
        else:  # m2
            PY[:n, n:] = np.kron(ansatz[None, :], XB)
            PY[N - m :, :n] = -CY
    meta = PencilMeta(
        n=n,
        k=k,
        m=m,
        family=family,
        basis=G.basis,
        ansatz=np.asarray(ansatz, dtype=complex if np.iscomplexobj(np.asarray(ansatz)) else float),
        state_x=Xs,
        state_y=Ys,
        realization=ss,
        h_matrix=hmat,
    )
    return Pencil(PX, PY, meta)


def build_m1(G: RationalMatrix, spec: AnsatzSpec | None = None, X=None, Y=None) -> Pencil:
    """Right-ansatz linearization of G from L = [v (x) I  H] applied to the
    companion-style pencil of the polynomial part.

    Defaults v = e_1, H = [0; I], X = Y = I give the basic construction whose
    polynomial block is the companion-style pencil itself.
    """
    if G.poly is None or G.k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    k, m = G.k, G.m
    if spec is None:
        spec = AnsatzSpec.default(k, m)
    v = np.asarray(spec.v).reshape(-1)
    if v.shape[0] != k or spec.H.shape != (k * m, (k - 1) * m):
        raise ShapeMismatch("ansatz dimensions do not match (k, m)")
    K = np.hstack([np.kron(v[:, None], np.eye(m)), spec.H])
    _require_nonsingular(K, "[v (x) I  H]", SingularAnsatz)
    Fx, Fy = _f_blocks(G.poly)
    ss, Xs, Ys = _state_parts(G, X, Y)
    return _assemble_rational(G, K @ Fx, K @ Fy, v, Xs, Ys, "M1", "m1", ss)


def build_m2(G: RationalMatrix, spec: AnsatzSpec | None = None, X=None, Y=None) -> Pencil:
    """Left-ansatz linearization: polynomial block F^B [w^T (x) I; H^B]."""
    if G.poly is None or G.k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    k, m = G.k, G.m
    if spec is None:
        spec = AnsatzSpec.default(k, m)
    w = np.asarray(spec.v).reshape(-1)
    if w.shape[0] != k or spec.H.shape != (k * m, (k - 1) * m):
        raise ShapeMismatch("ansatz dimensions do not match (k, m)")
    K = np.vstack([np.kron(w[None, :], np.eye(m)), block_transpose_matrix(spec.H, k, k - 1, m)])
    _require_nonsingular(K, "[w^T (x) I; H^B]", SingularAnsatz)
    Fx, Fy = _f_blocks(G.poly)
    FxB = block_transpose_matrix(Fx, k, k, m)
    FyB = block_transpose_matrix(Fy, k, k, m)
    ss, Xs, Ys = _state_parts(G, X, Y)
    return _assemble_rational(G, FxB @ K, FyB @ K, w, Xs, Ys, "M2", "m2", ss)


def solve_dm_pencil(D: PolyMat, v) -> Pencil:
    """The unique block-symmetric right-ansatz pencil with ansatz vector v.

    Solves the linear system in the 2*(k*m)^2 entries of (X, Y) given by
    coefficient-matching the ansatz identity in the basis together with block
    symmetry of X and Y.  Uniqueness makes least squares exact here.
    """
    basis = D.basis
    if not isinstance(basis, ThreeTermBasis):
        raise ValueError("the double-ansatz construction needs a three-term basis")
    k, m = D.k, D.m
    if k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    if basis.size < k:
        raise ValueError(f"basis stores {basis.size} coefficients, need {k}")
    v = np.asarray(v).reshape(-1)
    if v.shape[0] != k:
        raise ShapeMismatch("ansatz vector must have length k")
    N = k * m
    nun = N * N
    rows_eq = (k + 1) * N * m
    dtype = np.result_type(D.coeffs.dtype, v.dtype, float)
    A = np.zeros((rows_eq + 2 * nun, 2 * nun), dtype=dtype)
    b = np.zeros(rows_eq + 2 * nun, dtype=dtype)

    rr = np.arange(N)[:, None] * m + np.arange(m)[None, :]
    cc = np.arange(N)[:, None] * N + np.arange(m)[None, :]

    def add(s, j, coeff, which):
        A[s * N * m + rr, which * nun + j * m + cc] += coeff

    alpha, beta, gamma = basis.alpha, basis.beta, basis.gamma
    for s in range(k + 1):
        if s >= 1:
            add(s, k - s, alpha[s - 1], 0)
        if s <= k - 1:
            add(s, k - 1 - s, beta[s], 0)
            add(s, k - 1 - s, 1.0, 1)
        if s <= k - 2:
            add(s, k - 2 - s, gamma[s + 1], 0)
        b[s * N * m : (s + 1) * N * m] = np.kron(v[:, None], D.coeffs[s]).ravel()

    perm = np.arange(nun).reshape(k, m, k, m).transpose(2, 1, 0, 3).ravel()
    idx = np.arange(nun)
    for which in range(2):
        off = rows_eq + which * nun
        A[off + idx, which * nun + idx] += 1.0
        A[off + idx, which * nun + perm] -= 1.0

    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    scale = max(np.abs(D.coeffs).max(), 1.0)
    resid = la.norm(A @ sol - b)
    if resid > 1e-6 * scale * N:
        raise NumericallySingularSystem(f"ansatz system residual {resid:.2e}")

    X = sol[:nun].reshape(N, N)
    Y = sol[nun:].reshape(N, N)
    X = (X + block_transpose_matrix(X, k, k, m)) / 2.0
    Y = (Y + block_transpose_matrix(Y, k, k, m)) / 2.0
    H = X[:, m:].copy()  # X = [alpha_{k-1}^{-1} (v (x) D_k) | H]
    meta = PencilMeta(n=0, k=k, m=m, family="DM", basis=basis, ansatz=v.copy(), h_matrix=H)
    return Pencil(X, Y, meta)


def _symmetric_parts(G: RationalMatrix):
    """Symmetric realization of the strictly proper part (converting if needed)."""
    if G.sp is None:
        return None
    if isinstance(G.sp, SymmetricRealization):
        return G.sp
    if isinstance(G.sp, HermitianRealization):
        raise NotSymmetric("strictly proper part is stored in Hermitian form")
    return to_symmetric_realization(G.sp.to_state_space())


def _check_leading(D: PolyMat):
    s = la.svd(D.coeffs[-1], compute_uv=False)
    if s[-1] <= NONSINGULAR_TOL * max(s[0], 1e-300):
        raise SingularLeadingCoefficient("leading coefficient of the polynomial part is singular")


def build_symmetric(G: RationalMatrix, mu: float = 1.0, Z=None) -> Pencil:
    """Symmetric linearization of a symmetric G with nonsingular leading coefficient.

    The polynomial block is mu times the block-symmetric pencil with ansatz
    e_k; the state block is mu * Z (S2 - lam*S1) Z^T.  Symmetry of X and Y is
    exact by assembly.
    """
    if G.structure != "symmetric":
        raise NotSymmetric("G must be tagged symmetric")
    if G.poly is None or G.k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    if mu == 0:
        raise ValueError("mu must be nonzero")
    _check_leading(G.poly)
    k, m = G.k, G.m
    sym = _symmetric_parts(G)
    n = 0 if sym is None else sym.n
    dm = solve_dm_pencil(G.poly, _unit(k, k - 1))
    Lx = _sym_exact(mu * dm.X)
    Ly = _sym_exact(mu * dm.Y)
    N = n + k * m
    dtype = np.result_type(Lx.dtype, float if sym is None else sym.S1.dtype)
    PX = np.zeros((N, N), dtype=dtype)
    PY = np.zeros((N, N), dtype=dtype)
    PX[n:, n:] = Lx
    PY[n:, n:] = Ly
    state_x = state_y = None
    ss = None
    if n > 0:
        Z = np.eye(n) if Z is None else np.atleast_2d(np.asarray(Z))
        _require_nonsingular(Z, "Z", SingularXY)
        PX[:n, :n] = _sym_exact(-mu * (Z @ sym.S1 @ Z.T))
        PY[:n, :n] = _sym_exact(mu * (Z @ sym.S2 @ Z.T))
        E = mu * (Z @ sym.W.T)
        PY[:n, N - m :] = E
        PY[N - m :, :n] = E.T
        ss = sym.to_state_space()
        state_x = mu * (Z @ sym.S1)
        state_y = -Z.T
    meta = PencilMeta(
        n=n, k=k, m=m, family="SYM", basis=G.basis, ansatz=mu * _unit(k, k - 1),
        state_x=state_x, state_y=state_y, realization=ss, h_matrix=dm.meta.h_matrix,
    )
    return Pencil(PX, PY, meta)


def build_hermitian(G: RationalMatrix, mu: float = 1.0, Z=None) -> Pencil:
    """Hermitian linearization of a Hermitian G; mirror of :func:`build_symmetric`."""
    if G.structure != "hermitian":
        raise NotSymmetric("G must be tagged hermitian")
    if G.poly is None or G.k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    if np.iscomplexobj(np.asarray(mu)) and np.imag(mu) != 0:
        raise NonRealMu("mu must be real")
    mu = float(np.real(mu))
    if mu == 0:
        raise ValueError("mu must be nonzero")
    if G.basis is not None and not G.basis.is_real:
        raise NonRealBasis("Hermitian constructions need real recurrence coefficients")
    _check_leading(G.poly)
    k, m = G.k, G.m
    if G.sp is None:
        herm = None
    elif isinstance(G.sp, HermitianRealization):
        herm = G.sp
    elif isinstance(G.sp, SymmetricRealization):
        raise NotSymmetric("strictly proper part is stored in symmetric form")
    else:
        herm = to_hermitian_realization(G.sp.to_state_space())
    n = 0 if herm is None else herm.n
    dm = solve_dm_pencil(G.poly, _unit(k, k - 1))
    Lx = _herm_exact(mu * dm.X.astype(complex))
    Ly = _herm_exact(mu * dm.Y.astype(complex))
    N = n + k * m
    PX = np.zeros((N, N), dtype=complex)
    PY = np.zeros((N, N), dtype=complex)
    PX[n:, n:] = Lx
    PY[n:, n:] = Ly
    state_x = state_y = None
    ss = None
    if n > 0:
        Z = np.eye(n) if Z is None else np.atleast_2d(np.asarray(Z))
        _require_nonsingular(Z, "Z", SingularXY)
        Zh = Z.conj().T
        PX[:n, :n] = _herm_exact(-mu * (Z @ herm.H1 @ Zh))
        PY[:n, :n] = _herm_exact(mu * (Z @ herm.H2 @ Zh))
        E = mu * (Z @ herm.W.conj().T)
        PY[:n, N - m :] = E
        PY[N - m :, :n] = E.conj().T
        ss = herm.to_state_space()
        state_x = mu * (Z @ herm.H1)
        state_y = -Zh
    meta = PencilMeta(
        n=n, k=k, m=m, family="HERM", basis=G.basis, ansatz=mu * _unit(k, k - 1),
        state_x=state_x, state_y=state_y, realization=ss, h_matrix=dm.meta.h_matrix,
    )
    return Pencil(PX, PY, meta)


def _is_monomial(basis) -> bool:
    return (
        isinstance(basis, ThreeTermBasis)
        and np.all(basis.alpha == 1.0)
        and np.all(basis.beta == 0.0)
        and np.all(basis.gamma == 0.0)
    )


def build_block_kronecker_symmetric_odd(G: RationalMatrix, X=None) -> Pencil:
    """Bordered block Kronecker pencil for symmetric G of odd monomial degree.

    The polynomial block pairs consecutive coefficients on the diagonal and
    borders them with the shift pencil; the state block couples in through
    the last diagonal position.  Exactly symmetric by assembly.
    """
    if G.structure != "symmetric":
        raise NotSymmetric("G must be tagged symmetric")
    if G.poly is None or G.k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    if not _is_monomial(G.poly.basis):
        raise ValueError("this construction is defined for the monomial basis")
    k, m = G.k, G.m
    if k % 2 == 0:
        raise EvenDegree("polynomial degree must be odd")
    q = (k - 1) // 2
    sym = _symmetric_parts(G)
    n = 0 if sym is None else sym.n
    N = n + k * m
    c = G.poly.coeffs
    dtype = np.result_type(c.dtype, float if sym is None else sym.S1.dtype)
    PX = np.zeros((N, N), dtype=dtype)
    PY = np.zeros((N, N), dtype=dtype)
    eye = np.eye(m, dtype=dtype)
    for i in range(q + 1):
        sl = slice(n + i * m, n + (i + 1) * m)
        PX[sl, sl] = _sym_exact(c[k - 2 * i])
        PY[sl, sl] = _sym_exact(c[k - 1 - 2 * i])
    r0 = n + (q + 1) * m
    for r in range(q):
        rows = slice(r0 + r * m, r0 + (r + 1) * m)
        nxt = slice(n + (r + 1) * m, n + (r + 2) * m)
        cur = slice(n + r * m, n + (r + 1) * m)
        PX[rows, nxt] = eye
        PX[nxt, rows] = eye
        PY[rows, cur] = -eye
        PY[cur, rows] = -eye
    state_x = state_y = None
    ss = None
    if n > 0:
        X = np.eye(n) if X is None else np.atleast_2d(np.asarray(X))
        _require_nonsingular(X, "state transform X", SingularXY)
        PX[:n, :n] = _sym_exact(-(X @ sym.S1 @ X.T))
        PY[:n, :n] = _sym_exact(X @ sym.S2 @ X.T)
        E = X @ sym.W.T
        last = slice(n + q * m, n + (q + 1) * m)
        PY[:n, last] = E
        PY[last, :n] = E.T
        ss = sym.to_state_space()
        state_x = X
        state_y = -(sym.S1 @ X.T)
    meta = PencilMeta(
        n=n, k=k, m=m, family="BK_ODD", basis=G.basis, ansatz=None,
        state_x=state_x, state_y=state_y, realization=ss,
    )
    return Pencil(PX, PY, meta)


def build_degree_graded(G: RationalMatrix, spec: AnsatzSpec | None = None, X=None, Y=None) -> Pencil:
    """Right-ansatz linearization when the polynomial part uses a degree-graded basis."""
    if G.poly is None or G.k < 2:
        raise DegreeTooLow("polynomial part must have degree >= 2")
    if not isinstance(G.poly.basis, DegreeGradedBasis):
        raise ValueError("polynomial part is not expressed in a degree-graded basis")
    k, m = G.k, G.m
    if spec is None:
        spec = AnsatzSpec.default(k, m)
    v = np.asarray(spec.v).reshape(-1)
    if v.shape[0] != k or spec.H.shape != (k * m, (k - 1) * m):
        raise ShapeMismatch("ansatz dimensions do not match (k, m)")
    K = np.hstack([np.kron(v[:, None], np.eye(m)), spec.H])
    _require_nonsingular(K, "[v (x) I  H]", SingularAnsatz)
    Fx, Fy = _f_blocks(G.poly)
    ss, Xs, Ys = _state_parts(G, X, Y)
    pencil = _assemble_rational(G, K @ Fx, K @ Fy, v, Xs, Ys, "DG", "m1", ss)
    return pencil


def block_transpose(L: Pencil) -> Pencil:
    """Block transpose of a polynomial-part pencil (state rows excluded)."""
    if L.meta.n != 0:
        raise ShapeMismatch("block transpose is defined on the k x k polynomial grid only")
    k, m = L.meta.k, L.meta.m
    X = block_transpose_matrix(L.X, k, k, m)
    Y = block_transpose_matrix(L.Y, k, k, m)
    fam = {"M1": "M2", "M2": "M1", "F": "M2"}.get(L.meta.family, L.meta.family)
    return Pencil(X, Y, replace(L.meta, family=fam))


def strict_equiv(L: Pencil, T: TransformSpec) -> Pencil:
    """Apply [[Q1,0],[W,Q2]] L(lam) [[Q3,Z],[0,Q4]].

    Eigenvalues are preserved; the transform is recorded in the metadata so
    recovery keeps working.  Symmetric/Hermitian structure survives exactly
    when the right factor is the (conjugate) transpose of the left.
    """
    n = L.meta.n
    km = L.size - n
    for name, M, sz in (("Q1", T.Q1, n), ("Q2", T.Q2, km), ("Q3", T.Q3, n), ("Q4", T.Q4, km)):
        M = np.atleast_2d(M)
        if M.shape != (sz, sz):
            raise ShapeMismatch(f"{name} must be {sz} x {sz}")
        _require_nonsingular(M, name, SingularTransform)
    W = np.zeros((km, n)) if T.W is None else np.atleast_2d(T.W)
    Z = np.zeros((n, km)) if T.Z is None else np.atleast_2d(T.Z)
    if W.shape != (km, n) or Z.shape != (n, km):
        raise ShapeMismatch("W must be km x n and Z must be n x km")

    EL = np.block([[T.Q1, np.zeros((n, km))], [W, T.Q2]]) if n else np.asarray(T.Q2)
    ER = np.block([[T.Q3, Z], [np.zeros((km, n)), T.Q4]]) if n else np.asarray(T.Q4)
    X2 = EL @ L.X @ ER
    Y2 = EL @ L.Y @ ER

    herm = np.iscomplexobj(EL) or np.iscomplexobj(ER)
    congruent = np.array_equal(ER, EL.conj().T if herm else EL.T)
    if congruent and L.meta.family in ("SYM", "BK_ODD", "DM") and not herm:
        X2, Y2 = _sym_exact(X2), _sym_exact(Y2)
    elif congruent and L.meta.family == "HERM":
        X2, Y2 = _herm_exact(X2), _herm_exact(Y2)

    meta = replace(
        L.meta,
        left_trace=EL if L.meta.left_trace is None else EL @ L.meta.left_trace,
        right_trace=ER if L.meta.right_trace is None else L.meta.right_trace @ ER,
        structured=L.meta.structured and congruent,
    )
    return Pencil(X2, Y2, meta)


def transfer_eval(L: Pencil, lam) -> np.ndarray:
    """Transfer function of the pencil seen as a system matrix (Schur complement)."""
    n = L.meta.n
    M = L.at(lam)
    if n == 0:
        return M
    return M[n:, n:] - M[n:, :n] @ la.solve(M[:n, :n], M[:n, n:])


def base_transfer_eval(L: Pencil, lam) -> np.ndarray:
    """Transfer function of the pencil the transform trace started from."""
    G2 = transfer_eval(L, lam)
    if L.meta.left_trace is None:
        return G2
    n = L.meta.n
    Q2 = L.meta.left_trace[n:, n:]
    Q4 = L.meta.right_trace[n:, n:]
    return la.solve(Q2, la.solve(Q4.T, G2.T).T)


def base_vector(L: Pencil, z: np.ndarray, side: str = "right") -> np.ndarray:
    """Map an eigenvector of the transformed pencil back to the base pencil."""
    if side == "right":
        return z if L.meta.right_trace is None else L.meta.right_trace @ z
    return z if L.meta.left_trace is None else L.meta.left_trace.T @ z


def build_family(G: RationalMatrix, family: str, *, spec: AnsatzSpec | None = None,
                 v=None, H=None, X=None, Y=None, mu: float = 1.0, Z=None) -> Pencil:
    """Dispatch a family name (as used by the CLI) to its constructor."""
    fam = family.strip().lower().replace("-", "_")
    k, m = G.k, G.m
    if spec is None and v is not None:
        v = np.asarray(v, dtype=complex if np.iscomplexobj(np.asarray(v)) else float).reshape(-1)
        Hm = AnsatzSpec.default(k, m).H if H is None else np.atleast_2d(H)
        spec = AnsatzSpec(v, Hm)
    if fam == "f":
        pencil = build_m1(G, AnsatzSpec.default(k, m), X=X, Y=Y)
        pencil.meta.family = "F"
        return pencil
    if fam == "m1":
        return build_m1(G, spec, X=X, Y=Y)
    if fam == "m2":
        return build_m2(G, spec, X=X, Y=Y)
    if fam == "dm":
        vv = _unit(k, k - 1) if spec is None else spec.v
        dm = solve_dm_pencil(G.poly, vv)
        if G.sp is None:
            return dm
        ss, Xs, Ys = _state_parts(G, X, Y)
        out = _assemble_rational(G, dm.X, dm.Y, np.asarray(vv).reshape(-1), Xs, Ys, "DM", "m1", ss, hmat=dm.meta.h_matrix)
        return out
    if fam == "sym":
        return build_symmetric(G, mu=mu, Z=Z)
    if fam == "herm":
        return build_hermitian(G, mu=mu, Z=Z)
    if fam == "bk_odd":
        return build_block_kronecker_symmetric_odd(G, X=X)
    if fam == "dg":
        return build_degree_graded(G, spec, X=X, Y=Y)
    raise ValueError(f"unknown family {family!r}")
