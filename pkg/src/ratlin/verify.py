"""Independent oracles and structural certificates.

The eigenvalue oracle never touches the pencil constructions: it interpolates
the determinant of the polynomial system matrix on a scaled circle, takes
polynomial roots, and removes pole locations.  The remaining checks certify
minimal-basis structure, the defining ansatz identities, least order, and
family-specific matrix structure.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .basis import monomial_change_matrix
from .errors import IllConditionedInterpolationWarning, NonRegular
from .linearize import M1_LIKE, Pencil, base_transfer_eval, block_transpose_matrix
from .ratmodel import (
    RationalMatrix,
    check_least_order,
    evaluate,
    numerical_rank,
    rev_eval,
    system_matrix,
)
from .solve import solve_gep

__all__ = [
    "VerifyCheck",
    "VerifyReport",
    "det_poly",
    "poly_roots",
    "oracle_eigenvalues",
    "check_minimal_basis",
    "check_dual_bases",
    "check_structure",
    "check_strong_linearization",
    "match_point_sets",
]


@dataclass
class VerifyCheck:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    eigen_compare: list = field(default_factory=list)

    def add(self, name: str, passed: bool, value: float, tol: float, detail: str = "") -> None:
        self.checks.append(VerifyCheck(name, bool(passed), float(value), float(tol), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]


def det_poly(P, degree_bound: int, radius: float = 1.0) -> np.ndarray:
    """Monomial coefficients (ascending) of det P by evaluation-interpolation.

    ``P`` is a callable lam -> matrix.  Nodes are scaled roots of unity; the
    result is cross-checked at fresh points and refined once with more nodes
    if the check fails.
    """
    if degree_bound < 0:
        raise ValueError("degree_bound must be >= 0")

    def interpolate(dbound):
        count = dbound + 1
        nodes = radius * np.exp(2j * np.pi * np.arange(count) / count)
        vals = np.array([la.det(np.atleast_2d(P(z))) for z in nodes])
        coeffs = np.fft.fft(vals) / count
        return coeffs / radius ** np.arange(count)

    coeffs = interpolate(degree_bound)
    rng = np.random.default_rng(7)
    test = radius * np.exp(2j * np.pi * rng.random(3))
    scale = max(np.abs(coeffs).sum(), 1e-300)

    def check(c):
        err = 0.0
        for z in test:
            approx = np.polyval(c[::-1], z)
            err = max(err, abs(approx - la.det(np.atleast_2d(P(z)))))
        return err

    if check(coeffs) > 1e-8 * scale * max(radius, 1.0) ** degree_bound:
        warnings.warn(
            "determinant interpolation failed its cross-check; doubling nodes",
            IllConditionedInterpolationWarning,
        )
        padded = interpolate(2 * degree_bound + 1)
        coeffs = padded[: degree_bound + 1]
    return coeffs


def poly_roots(coeffs: np.ndarray, trim: float = 1e-10) -> np.ndarray:
    """Roots of an ascending coefficient list, trimming tiny leading terms."""
    c = np.asarray(coeffs)
    scale = np.abs(c).max()
    if scale == 0:
        return np.array([], dtype=complex)
    top = len(c)
    while top > 1 and abs(c[top - 1]) <= trim * scale:
        top -= 1
    c = c[:top]
    if len(c) <= 1:
        return np.array([], dtype=complex)
    return np.roots(c[::-1])


def match_point_sets(a, b, rtol: float):
    """Greedy nearest-pair matching of two point multisets.

    Returns (pairs, unmatched_a, unmatched_b); a bijection exists iff both
    leftover lists are empty.
    """
    a = list(a)
    b = list(b)
    pairs = []
    unmatched_a = []
    for x in a:
        if not b:
            unmatched_a.append(x)
            continue
        dists = [abs(x - y) for y in b]
        j = int(np.argmin(dists))
        if dists[j] <= rtol * max(1.0, abs(x), abs(b[j])):
            pairs.append((x, b.pop(j)))
        else:
            unmatched_a.append(x)
    return pairs, unmatched_a, b


@dataclass
class OracleEigenvalues:
    finite: np.ndarray
    infinite_count: int
    poles: np.ndarray


def _scale_radius(G: RationalMatrix) -> float:
    worst = 0.0
    if G.poly is not None:
        worst = max(worst, np.abs(G.poly.monomial_coeffs()).max())
    ss = G.state_space()
    if ss is not None and ss.n > 0:
        worst = max(worst, np.abs(ss.A).max(), np.abs(ss.B).max(), np.abs(ss.C).max())
    return 1.0 + worst


def oracle_eigenvalues(G: RationalMatrix, tol: float = 1e-8) -> OracleEigenvalues:
    """Finite eigenvalues by brute force: roots of det of the system matrix
    with pole locations removed, plus the count of eigenvectors at infinity."""
    P = system_matrix(G)
    ss = G.state_space()
    n = 0 if ss is None else ss.n
    bound = n + (G.poly.k * G.m if G.poly is not None else 0)
    if bound == 0:
        raise NonRegular("constant rational matrix has no eigenvalues to find")
    coeffs = det_poly(lambda z: P(z), bound, radius=_scale_radius(G))
    if np.abs(coeffs).max() < 1e-13:
        raise NonRegular("det of the system matrix is numerically zero")
    roots = poly_roots(coeffs)
    poles = la.eigvals(ss.A) if n > 0 else np.array([], dtype=complex)
    finite = [
        r for r in roots
        if poles.size == 0 or np.min(np.abs(r - poles)) > tol * max(1.0, abs(r))
    ]
    infinite = G.m - numerical_rank(rev_eval(G, 0.0))
    return OracleEigenvalues(np.array(finite), int(infinite), poles)


def _as_coeff_list(K) -> np.ndarray:
    """Normalize pencil pairs (X, Y) or coefficient stacks to ascending coeffs."""
    if isinstance(K, tuple) and len(K) == 2:
        X, Y = (np.atleast_2d(M) for M in K)
        return np.array([Y, X])
    arr = np.asarray(K)
    if arr.ndim != 3:
        raise ValueError("expected a pencil pair (X, Y) or an ascending coefficient stack")
    return arr


def _poly_eval_coeffs(coeffs: np.ndarray, lam) -> np.ndarray:
    out = np.zeros(coeffs.shape[1:], dtype=np.result_type(coeffs.dtype, np.asarray(lam).dtype, float))
    for c in coeffs[::-1]:
        out = out * lam + c
    return out


def check_minimal_basis(K, tol: float = 1e-10, rng=None) -> bool:
    """Minimal-basis certificate for a wide polynomial matrix.

    ``K`` is a pencil pair (X, Y) or an ascending stack of coefficients.
    Checks row-reducedness (full rank of the highest-row-degree coefficient
    matrix) and full row rank at the finite rank-drop candidates of a random
    square completion, plus random sample points.
    """
    coeffs = _as_coeff_list(K)
    d = coeffs.shape[0] - 1
    p, q = coeffs.shape[1:]
    if p >= q:
        raise ValueError("minimal-basis check expects a wide matrix (p < q)")
    rng = np.random.default_rng(11) if rng is None else rng

    scale = np.abs(coeffs).max()
    hrd = np.zeros((p, q), dtype=coeffs.dtype)
    for r in range(p):
        row_degrees = [i for i in range(d + 1) if np.abs(coeffs[i, r]).max() > 1e-14 * scale]
        hrd[r] = coeffs[max(row_degrees), r] if row_degrees else 0.0
    if numerical_rank(hrd, tol) != p:
        return False

    comp = rng.standard_normal((q - p, q))

    def completed(lam):
        return np.vstack([_poly_eval_coeffs(coeffs, lam), comp])

    det_coeffs = det_poly(completed, p * d, radius=1.0 + scale)
    candidates = list(poly_roots(det_coeffs))
    candidates.extend(rng.standard_normal(10) + 1j * rng.standard_normal(10))
    for lam in candidates:
        s = la.svd(_poly_eval_coeffs(coeffs, lam), compute_uv=False)
        # threshold against the polynomial's own scale: a uniformly tiny row
        # is a rank drop, not a small full-rank matrix
        thr = tol * scale * max(1.0, abs(lam)) ** d
        if np.count_nonzero(s > thr) != p:
            return False
    return True


def check_dual_bases(K, N, tol: float = 1e-11) -> bool:
    """True iff K(lam) @ N(lam)^T == 0 coefficientwise (monomial expansion).

    Both arguments are pencil pairs (X, Y) or ascending monomial coefficient
    stacks; the product is expanded by convolution.
    """
    kc = _as_coeff_list(K)
    nc = _as_coeff_list(N)
    if kc.shape[1] + nc.shape[1] != kc.shape[2] or kc.shape[2] != nc.shape[2]:
        raise ValueError("row counts must sum to the (shared) column count")
    scale = max(np.abs(kc).max(), 1.0) * max(np.abs(nc).max(), 1.0)
    deg = (kc.shape[0] - 1) + (nc.shape[0] - 1)
    worst = 0.0
    for s in range(deg + 1):
        acc = np.zeros((kc.shape[1], nc.shape[1]), dtype=np.result_type(kc.dtype, nc.dtype))
        for i in range(max(0, s - nc.shape[0] + 1), min(s, kc.shape[0] - 1) + 1):
            acc = acc + kc[i] @ nc[s - i].T
        worst = max(worst, np.abs(acc).max())
    return worst <= tol * scale


def phi_row_monomial_coeffs(basis, k: int, m: int) -> np.ndarray:
    """Monomial coefficients of the row [phi_{k-1} I, ..., phi_0 I]."""
    T = monomial_change_matrix(basis, k - 1)
    out = np.zeros((k, m, k * m))
    eye = np.eye(m)
    for i in range(k):  # power of lam
        for j in range(k):  # block position, holding phi_{k-1-j}
            out[i][:, j * m : (j + 1) * m] = T[k - 1 - j, i] * eye
    return out


def check_structure(L: Pencil, tol: float = 1e-13) -> bool:
    """Does the pencil carry the matrix structure its family promises?

    SYM and BK_ODD must be symmetric, HERM Hermitian, DM block-symmetric;
    remaining families are tested for plain symmetry (usually false).
    """
    fam = L.meta.family
    scale = max(la.norm(L.X), la.norm(L.Y), 1.0)
    if fam == "HERM":
        err = max(la.norm(L.X - L.X.conj().T), la.norm(L.Y - L.Y.conj().T))
        return err <= tol * scale
    if fam == "DM":
        n, k, m = L.meta.n, L.meta.k, L.meta.m
        Xp, Yp = L.X[n:, n:], L.Y[n:, n:]
        err = max(
            la.norm(Xp - block_transpose_matrix(Xp, k, k, m)),
            la.norm(Yp - block_transpose_matrix(Yp, k, k, m)),
        )
        return err <= tol * scale
    err = max(la.norm(L.X - L.X.T), la.norm(L.Y - L.Y.T))
    return err <= tol * scale


def _ansatz_residual(L: Pencil, G: RationalMatrix, points) -> float:
    """Worst relative residual of the defining ansatz identity at the points."""
    from .basis import basis_values

    meta = L.meta
    worst = 0.0
    eye = np.eye(meta.m)
    for lam in points:
        gh = base_transfer_eval(L, lam)
        gl = evaluate(G, lam)
        phi = basis_values(meta.basis, meta.k, lam)
        if meta.family == "M2":
            lhs = np.kron(phi[None, :], eye) @ gh
            rhs = np.kron(meta.ansatz[None, :], gl)
        else:
            lhs = gh @ np.kron(phi[:, None], eye)
            rhs = np.kron(meta.ansatz[:, None], gl)
        scale = max(la.norm(lhs), la.norm(rhs), 1.0)
        worst = max(worst, la.norm(lhs - rhs) / scale)
    return worst


def _bk_identity_residual(L: Pencil, G: RationalMatrix, points) -> float:
    """Residual of D(lam) = (Lambda^T (x) I) M(lam) (Lambda (x) I) for the
    bordered block Kronecker family."""
    meta = L.meta
    n, k, m = meta.n, meta.k, meta.m
    q = (k - 1) // 2
    worst = 0.0
    for lam in points:
        Mlam = L.at(lam)[n : n + (q + 1) * m, n : n + (q + 1) * m]
        lam_pows = lam ** np.arange(q, -1, -1)
        lv = np.kron(lam_pows[:, None], np.eye(m))
        lhs = lv.T @ Mlam @ lv
        rhs = G.poly(lam)
        scale = max(la.norm(rhs), 1.0)
        worst = max(worst, la.norm(lhs - rhs) / scale)
    return worst


def _sample_points(G: RationalMatrix, count: int, rng) -> list:
    ss = G.state_space()
    poles = la.eigvals(ss.A) if (ss is not None and ss.n > 0) else np.array([])
    pts = []
    while len(pts) < count:
        z = complex(rng.normal(scale=1.5), rng.normal(scale=1.5))
        if poles.size and np.min(np.abs(z - poles)) < 1e-3:
            continue
        pts.append(z)
    return pts


def check_strong_linearization(L: Pencil, G: RationalMatrix, tol: float = 1e-6,
                               sample_points: int = 20, seed: int = 42) -> VerifyReport:
    """Full report: eigenvalue sets against the brute-force oracle, infinite
    counts, ansatz identity, least order of the state block, and structure."""
    report = VerifyReport()
    rng = np.random.default_rng(seed)

    oracle = oracle_eigenvalues(G, tol=1e-8)
    sol = solve_gep(L)
    pencil_eigs = []
    for cl in sol.finite:
        if not cl.pole_flag:
            pencil_eigs.extend([cl.lam] * cl.multiplicity)
    pairs, left_a, left_b = match_point_sets(pencil_eigs, list(oracle.finite), max(tol, 1e-6))
    worst = max((abs(x - y) / max(1.0, abs(x)) for x, y in pairs), default=0.0)
    report.add(
        "finite_eigenvalues_match_oracle",
        not left_a and not left_b,
        worst,
        max(tol, 1e-6),
        f"{len(pairs)} matched, {len(left_a)} pencil-only, {len(left_b)} oracle-only",
    )
    report.eigen_compare = pairs

    report.add(
        "infinite_count_matches_oracle",
        sol.infinite_count == oracle.infinite_count,
        float(sol.infinite_count - oracle.infinite_count),
        0.0,
        f"pencil {sol.infinite_count}, oracle {oracle.infinite_count}",
    )

    pts = _sample_points(G, sample_points, rng)
    if L.meta.family == "BK_ODD":
        res = _bk_identity_residual(L, G, pts)
        report.add("block_kronecker_identity", res <= 1e-9, res, 1e-9)
    elif L.meta.ansatz is not None:
        res = _ansatz_residual(L, G, pts)
        report.add("ansatz_identity", res <= 1e-9, res, 1e-9)

    if L.meta.n > 0:
        ok = check_least_order(L)
        report.add("state_block_least_order", ok, 0.0 if ok else 1.0, 0.0)

    if L.meta.family in ("SYM", "HERM", "DM", "BK_ODD") and L.meta.structured:
        ok = check_structure(L)
        report.add("family_structure", ok, 0.0 if ok else 1.0, 1e-13)

    return report
