"""Shared random-instance generators for the test suite.

Everything is seeded; generators resample until the instance is comfortably
well conditioned (leading coefficient far from singular, poles separated)
so tolerance checks measure the library, not the luck of the draw.
"""

import numpy as np
import pytest

from ratlin import (
    PoleResidue,
    PolyMat,
    RationalMatrix,
    StateSpaceRealization,
    from_pole_residue,
    standard_basis,
)


def well_conditioned_matrix(rng, m, symmetric=False, hermitian=False, min_ratio=0.15):
    """Random matrix whose smallest singular value is a decent fraction of the largest."""
    while True:
        M = rng.standard_normal((m, m))
        if hermitian:
            M = M + 1j * rng.standard_normal((m, m))
            M = (M + M.conj().T) / 2
        elif symmetric:
            M = (M + M.T) / 2
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] > min_ratio * s[0]:
            return M


def random_poly(rng, m, k, kind="monomial", symmetric=False, hermitian=False):
    basis = standard_basis(kind, k)
    coeffs = []
    for i in range(k + 1):
        if hermitian:
            M = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            M = (M + M.conj().T) / 2
        else:
            M = rng.standard_normal((m, m))
            if symmetric:
                M = (M + M.T) / 2
        coeffs.append(M)
    coeffs[-1] = well_conditioned_matrix(rng, m, symmetric=symmetric, hermitian=hermitian)
    if hermitian:
        coeffs = [c.astype(complex) for c in coeffs]
    return PolyMat(basis, np.array(coeffs))


def random_poles(rng, count, spread=1.6):
    """Distinct real poles, kept away from each other."""
    while True:
        poles = np.sort(rng.uniform(-spread, spread, size=count))
        if count < 2 or np.min(np.diff(poles)) > 0.25:
            return poles


def random_sp(rng, m, n, symmetric=False, hermitian=False):
    """Strictly proper part of exact least order n from rank-one residues."""
    if n == 0:
        return None
    poles = random_poles(rng, n)
    residues = []
    for _ in range(n):
        b = rng.standard_normal(m)
        if hermitian:
            b = b + 1j * rng.standard_normal(m)
            R = np.sign(rng.standard_normal()) * np.outer(b, b.conj())
        elif symmetric:
            R = np.sign(rng.standard_normal()) * np.outer(b, b)
        else:
            c = rng.standard_normal(m)
            R = np.outer(b, c)
        residues.append(R)
    return from_pole_residue(PoleResidue(poles, np.array(residues)))


def random_rational(rng, m, k, n, kind="monomial", symmetric=False, hermitian=False):
    poly = random_poly(rng, m, k, kind, symmetric=symmetric, hermitian=hermitian)
    sp = random_sp(rng, m, n, symmetric=symmetric, hermitian=hermitian)
    structure = "hermitian" if hermitian else ("symmetric" if symmetric else "general")
    return RationalMatrix(poly, sp, structure)


def scalar_example():
    """G = lam^2 - 1 + 1/lam, the running scalar instance."""
    mono = standard_basis("monomial", 2)
    D = PolyMat(mono, np.array([-1.0, 0.0, 1.0]))
    sp = StateSpaceRealization([[0.0]], [[1.0]], [[1.0]])
    return RationalMatrix(D, sp)


def assert_eigs_match(got, expected, rtol=1e-8):
    """Multiset equality of eigenvalue lists up to a relative tolerance."""
    from ratlin.verify import match_point_sets

    pairs, only_got, only_expected = match_point_sets(list(got), list(expected), rtol)
    assert not only_got and not only_expected, (
        f"unmatched eigenvalues: got-only {only_got}, expected-only {only_expected}"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
