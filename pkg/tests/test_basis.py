import numpy as np
import pytest

from ratlin.basis import (
    DegreeGradedBasis,
    ThreeTermBasis,
    degree_graded_pencil,
    eval_phi,
    eval_psi,
    m_phi_pencil,
    monomial_change_matrix,
    rev_phi_at_zero,
    standard_basis,
    to_monomial,
)


def pencil_at(XY, lam):
    X, Y = XY
    return lam * X + Y


def random_three_term(rng, size):
    alpha = rng.uniform(0.5, 2.0, size)
    return ThreeTermBasis(alpha, rng.normal(size=size), rng.normal(size=size))


class TestStandardBasis:
    def test_monomial(self):
        b = standard_basis("monomial", 3)
        assert np.array_equal(b.alpha, np.ones(3))
        assert np.array_equal(b.beta, np.zeros(3))
        assert np.array_equal(b.gamma, np.zeros(3))

    def test_chebyshev1(self):
        b = standard_basis("chebyshev1", 3)
        assert np.array_equal(b.alpha, [1.0, 0.5, 0.5])
        assert np.array_equal(b.beta, np.zeros(3))
        assert np.array_equal(b.gamma[1:], [0.5, 0.5])  # gamma[0] is never used

    def test_chebyshev2(self):
        b = standard_basis("chebyshev2", 2)
        assert np.array_equal(b.alpha, [0.5, 0.5])
        assert np.array_equal(b.beta, np.zeros(2))
        assert b.gamma[1] == 0.5

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            standard_basis("legendre", 3)

    def test_zero_alpha_rejected(self):
        with pytest.raises(ValueError):
            ThreeTermBasis([1.0, 0.0], [0.0, 0.0], [0.0, 0.0])


class TestEvalPhi:
    def test_chebyshev1_against_cosine_oracle(self):
        # T_j(x) = cos(j arccos x) on [-1, 1], independent of the recurrence
        b = standard_basis("chebyshev1", 6)
        for x in (-0.9, -0.3, 0.5, 0.77):
            got = eval_phi(b, 6, x)
            expected = np.array([np.cos(j * np.arccos(x)) for j in range(5, -1, -1)])
            assert np.allclose(got, expected, atol=1e-14)

    def test_spec_point(self):
        assert np.allclose(eval_phi(standard_basis("chebyshev1", 3), 3, 0.5), [-0.5, 0.5, 1.0])

    def test_monomial_powers(self):
        assert np.array_equal(eval_phi(standard_basis("monomial", 4), 4, 2.0), [8.0, 4.0, 2.0, 1.0])

    def test_last_entry_exactly_one(self, rng):
        b = random_three_term(rng, 5)
        for lam in rng.normal(size=4):
            assert eval_phi(b, 5, lam)[-1] == 1.0


class TestRevPhiAtZero:
    @staticmethod
    def numeric_limit(basis, k):
        # Richardson extrapolation of t^{k-1} Phi_k(1/t) from t = 1e-3, 1e-4
        f1 = 1e-3 ** (k - 1) * eval_phi(basis, k, 1e3)
        f2 = 1e-4 ** (k - 1) * eval_phi(basis, k, 1e4)
        return f2 + (f2 - f1) * (1e-4 / (1e-3 - 1e-4))

    def test_chebyshev1(self):
        b = standard_basis("chebyshev1", 3)
        got = rev_phi_at_zero(b, 3)
        assert np.allclose(got, [2.0, 0.0, 0.0])
        assert np.allclose(got, self.numeric_limit(b, 3), rtol=1e-6, atol=1e-6)

    def test_chebyshev2(self):
        assert np.allclose(rev_phi_at_zero(standard_basis("chebyshev2", 3), 3), [4.0, 0.0, 0.0])

    def test_monomial_is_e1(self):
        assert np.array_equal(rev_phi_at_zero(standard_basis("monomial", 5), 5), np.eye(5)[0])

    def test_limit_matches_random_basis(self, rng):
        b = random_three_term(rng, 6)
        got = rev_phi_at_zero(b, 6)
        lim = self.numeric_limit(b, 6)
        assert np.allclose(got, lim, rtol=1e-6, atol=1e-6 * np.abs(got).max())


class TestMPhiPencil:
    def test_monomial_k3(self):
        X, Y = m_phi_pencil(standard_basis("monomial", 3), 3)
        assert np.array_equal(X, [[0, 1, 0], [0, 0, 1]])
        assert np.array_equal(Y, [[-1, 0, 0], [0, -1, 0]])

    def test_chebyshev1_k3(self):
        X, Y = m_phi_pencil(standard_basis("chebyshev1", 3), 3)
        assert np.array_equal(pencil_at((X, Y), 2.0), [[-0.5, 2.0, -0.5], [0.0, -1.0, 2.0]])

    @pytest.mark.parametrize("kind", ["monomial", "chebyshev1", "chebyshev2"])
    @pytest.mark.parametrize("k", [2, 3, 5, 6])
    def test_annihilates_basis_vector(self, kind, k, rng):
        b = standard_basis(kind, k)
        XY = m_phi_pencil(b, k)
        for lam in rng.normal(scale=2.0, size=10):
            res = pencil_at(XY, lam) @ eval_phi(b, k, lam)
            scale = max(1.0, np.abs(eval_phi(b, k, lam)).max())
            assert np.abs(res).max() <= 1e-13 * scale

    def test_annihilates_random_basis(self, rng):
        b = random_three_term(rng, 6)
        XY = m_phi_pencil(b, 6)
        for lam in rng.normal(size=10):
            phi = eval_phi(b, 6, lam)
            assert np.abs(pencil_at(XY, lam) @ phi).max() <= 1e-12 * max(1.0, np.abs(phi).max())

    def test_highest_row_degree_coefficient_full_rank(self):
        for k in range(2, 7):
            X, _ = m_phi_pencil(standard_basis("chebyshev1", k), k)
            assert np.linalg.matrix_rank(X) == k - 1

    def test_degree_one_rejected(self):
        with pytest.raises(ValueError):
            m_phi_pencil(standard_basis("monomial", 1), 1)


class TestToMonomial:
    def test_chebyshev_t2(self):
        b = standard_basis("chebyshev1", 2)
        D = np.array([np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2)])
        mono = to_monomial(b, D)
        assert np.allclose(mono[0], -np.eye(2))
        assert np.allclose(mono[1], np.zeros((2, 2)))
        assert np.allclose(mono[2], 2 * np.eye(2))

    def test_monomial_identity(self, rng):
        b = standard_basis("monomial", 3)
        D = rng.normal(size=(4, 2, 2))
        assert np.allclose(to_monomial(b, D), D)

    def test_constant(self):
        b = standard_basis("chebyshev2", 1)
        assert np.allclose(to_monomial(b, np.array([[[3.0]]])), [[[3.0]]])

    def test_round_trip_evaluation(self, rng):
        b = standard_basis("chebyshev1", 4)
        D = rng.normal(size=(5, 3, 3))
        mono = to_monomial(b, D)
        for lam in rng.normal(scale=1.5, size=20):
            phi = eval_phi(b, 5, lam)[::-1]
            direct = np.tensordot(phi, D, axes=(0, 0))
            powers = lam ** np.arange(5)
            converted = np.tensordot(powers, mono, axes=(0, 0))
            assert np.linalg.norm(direct - converted) <= 1e-12 * max(1.0, np.linalg.norm(converted))


def random_degree_graded(rng, size):
    alpha = rng.normal(size=size)
    rows = tuple(rng.normal(size=j - 1) for j in range(2, size + 1))
    return DegreeGradedBasis(alpha, rows)


class TestDegreeGraded:
    def test_degenerate_equals_monomial(self):
        b = DegreeGradedBasis(np.zeros(3), (np.zeros(1), np.zeros(2)))
        X, Y = degree_graded_pencil(b, 3)
        MX, MY = m_phi_pencil(standard_basis("monomial", 3), 3)
        assert np.array_equal(X, MX)
        assert np.array_equal(Y, MY)

    def test_k3_display(self):
        a1, a2, a3, bb = 0.3, -1.1, 0.7, 2.5
        b = DegreeGradedBasis(np.array([a1, a2, a3]), (np.array([bb]), np.array([0.0, 0.0])))
        X, Y = degree_graded_pencil(b, 3)
        lam = 1.7
        expected = np.array([[-1.0, lam - a2, bb], [0.0, -1.0, lam - a1]])
        assert np.allclose(pencil_at((X, Y), lam), expected)

    def test_annihilates_basis_vector(self, rng):
        b = random_degree_graded(rng, 5)
        XY = degree_graded_pencil(b, 5)
        for lam in rng.normal(size=10):
            psi = eval_psi(b, 5, lam)
            assert np.abs(pencil_at(XY, lam) @ psi).max() <= 1e-12 * max(1.0, np.abs(psi).max())

    def test_eval_psi_against_poly_arithmetic(self, rng):
        # rebuild psi_j coefficient lists with numpy polynomial ops only
        b = random_degree_graded(rng, 4)
        polys = [np.array([1.0])]
        for j in range(1, 5):
            p = np.convolve(polys[j - 1], np.array([-b.alpha[j - 1], 1.0]))
            for i in range(j - 1):
                q = b.beta(j, i) * polys[i]
                p[: len(q)] += q
            polys.append(p)
        for lam in rng.normal(size=5):
            expected = np.array([np.polyval(p[::-1], lam) for p in reversed(polys[:4])])
            assert np.allclose(eval_psi(b, 4, lam), expected)

    def test_monomial_change(self, rng):
        b = random_degree_graded(rng, 4)
        T = monomial_change_matrix(b, 4)
        # monic, degree-graded: unit diagonal
        assert np.allclose(np.diag(T), np.ones(5))
        for lam in rng.normal(size=4):
            powers = lam ** np.arange(5)
            assert np.allclose(T @ powers, eval_psi(b, 5, lam)[::-1])
