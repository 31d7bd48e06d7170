import numpy as np
import pytest

from conftest import assert_eigs_match, random_rational, scalar_example

from ratlin import (
    PolyMat,
    RationalMatrix,
    StateSpaceRealization,
    build_family,
    build_m1,
    build_m2,
    build_symmetric,
    evaluate,
    lift_left,
    lift_right,
    recover_infinity,
    recover_left,
    recover_right,
    solve_gep,
    solve_rep,
    standard_basis,
    system_lift,
    system_matrix,
    system_recover,
)
from ratlin.errors import NotAnEigenpair, SingularABlock
from ratlin.solve import residual_scale


class TestSolveGep:
    def test_diagonal(self):
        from ratlin.linearize import Pencil, PencilMeta

        L = Pencil(np.eye(2), -np.diag([1.0, 2.0]), PencilMeta(0, 2, 1, "M1"))
        sol = solve_gep(L)
        lams = sorted(cl.lam.real for cl in sol.finite)
        assert np.allclose(lams, [1.0, 2.0])
        for cl in sol.finite:
            idx = 0 if abs(cl.lam - 1.0) < 1e-8 else 1
            v = cl.right[:, 0]
            assert abs(abs(v[idx]) - 1.0) < 1e-12

    def test_scalar_example_against_companion_oracle(self):
        G = scalar_example()
        sol = solve_gep(build_m1(G))
        assert_eigs_match([cl.lam for cl in sol.finite], np.roots([1.0, 0.0, -1.0, 1.0]))

    def test_singular_leading_coefficient_gives_infinite_eigenvalue(self):
        D = PolyMat(
            standard_basis("monomial", 2),
            np.array([np.eye(2), np.zeros((2, 2)), np.diag([1.0, 0.0])]),
        )
        L = build_m1(RationalMatrix(D, None))
        sol = solve_gep(L)
        assert sol.infinite_count == 1

    def test_residual_contract(self, rng):
        G = random_rational(rng, 3, 3, 2, kind="chebyshev1")
        L = build_m1(G)
        sol = solve_gep(L)
        nx, ny = np.linalg.norm(L.X, 2), np.linalg.norm(L.Y, 2)
        for cl in sol.finite:
            for z in cl.right.T:
                res = np.linalg.norm(L.at(cl.lam) @ z)
                assert res <= 1e-8 * (abs(cl.lam) * nx + ny)
            for y in cl.left.T:
                res = np.linalg.norm(y @ L.at(cl.lam))
                assert res <= 1e-8 * (abs(cl.lam) * nx + ny)


class TestRecovery:
    def test_scalar_right_and_left(self):
        G = scalar_example()
        L = build_m1(G)
        sol = solve_gep(L)
        rights = recover_right(L, sol)
        lefts = recover_left(L, sol)
        assert len(rights) == 3 and len(lefts) == 3
        for p in rights:
            assert abs(evaluate(G, p.lam) @ p.vector) <= 1e-9
        for p in lefts:
            assert abs(p.vector @ evaluate(G, p.lam)) <= 1e-9

    def test_semisimple_double_eigenvalue(self):
        # diag((lam-1)^2, (lam-1)^2): eigenvalue 1 with a two-dimensional null space
        D = PolyMat(
            standard_basis("monomial", 2),
            np.array([np.eye(2), -2 * np.eye(2), np.eye(2)]),
        )
        G = RationalMatrix(D, None)
        L = build_m1(G)
        sol = solve_gep(L)
        ones = [cl for cl in sol.finite if abs(cl.lam - 1.0) < 1e-6]
        assert len(ones) == 1
        assert ones[0].multiplicity == 4  # algebraic: double root in each entry
        assert ones[0].right.shape[1] >= 2
        rights = [p for p in recover_right(L, sol) if abs(p.lam - 1.0) < 1e-6]
        U = np.stack([p.vector for p in rights], axis=1)
        assert np.linalg.matrix_rank(U, tol=1e-8) == 2

    def test_m2_maps(self, rng):
        G = random_rational(rng, 2, 3, 2, kind="chebyshev2")
        L = build_m2(G)
        sol = solve_gep(L)
        for p in recover_right(L, sol):
            r = evaluate(G, p.lam) @ p.vector
            assert np.linalg.norm(r) <= 1e-8 * residual_scale(G, p.lam)
        for p in recover_left(L, sol):
            r = p.vector @ evaluate(G, p.lam)
            assert np.linalg.norm(r) <= 1e-8 * residual_scale(G, p.lam)

    def test_symmetric_left_equals_right_spans(self, rng):
        G = random_rational(rng, 2, 2, 2, symmetric=True)
        L = build_symmetric(G)
        sol = solve_gep(L)
        rights = recover_right(L, sol)
        lefts = recover_left(L, sol)
        by_lam = {}
        for p in rights:
            by_lam.setdefault(round(p.lam.real, 8) + 1j * round(p.lam.imag, 8), [None, None])[0] = p.vector
        for p in lefts:
            by_lam[round(p.lam.real, 8) + 1j * round(p.lam.imag, 8)][1] = p.vector
        for r, l in by_lam.values():
            # same one-dimensional span up to scale
            assert np.linalg.matrix_rank(np.stack([r, l]), tol=1e-8) == 1


class TestInfinity:
    def infinite_instance(self):
        D = PolyMat(
            standard_basis("monomial", 2),
            np.array([np.zeros((2, 2)), np.diag([0.0, 1.0]), np.diag([1.0, 0.0])]),
        )
        sp = StateSpaceRealization([[0.3]], [[0.5, 0.5]], [[1.0], [0.0]])
        return RationalMatrix(D, sp)

    def test_m1_recovery(self):
        G = self.infinite_instance()
        L = build_m1(G)
        sol = solve_gep(L)
        assert sol.infinite_count == 1
        pairs = recover_infinity(L, sol)
        dk = G.poly.coeffs[-1]
        for p in pairs:
            r = dk @ p.vector if p.side == "right" else p.vector @ dk
            assert np.linalg.norm(r) <= 1e-9 * np.linalg.norm(dk)
        # the right eigenvector is e2, the null vector of diag(1, 0)
        right = [p for p in pairs if p.side == "right"][0]
        assert abs(abs(right.vector[1]) - 1.0) <= 1e-12

    def test_m2_recovery(self):
        G = self.infinite_instance()
        L = build_m2(G)
        sol = solve_gep(L)
        pairs = recover_infinity(L, sol)
        dk = G.poly.coeffs[-1]
        assert pairs
        for p in pairs:
            r = dk @ p.vector if p.side == "right" else p.vector @ dk
            assert np.linalg.norm(r) <= 1e-9 * np.linalg.norm(dk)

    def test_nonsingular_leading_gives_empty(self, rng):
        G = random_rational(rng, 2, 2, 1)
        L = build_m1(G)
        sol = solve_gep(L)
        assert recover_infinity(L, sol) == []

    def test_chebyshev_null_vector_match(self, rng):
        # singular leading coefficient in a Chebyshev basis
        dk = np.outer([1.0, 2.0], [1.0, 2.0])  # rank one
        coeffs = rng.normal(size=(3, 2, 2))
        coeffs[-1] = dk
        G = RationalMatrix(PolyMat(standard_basis("chebyshev1", 2), coeffs), None)
        L = build_m1(G)
        sol = solve_gep(L)
        pairs = [p for p in recover_infinity(L, sol) if p.side == "right"]
        assert len(pairs) == 1
        null_dir = np.array([2.0, -1.0]) / np.sqrt(5.0)
        overlap = abs(null_dir @ pairs[0].vector)
        assert abs(overlap - 1.0) <= 1e-9


class TestLifts:
    def test_round_trip_m1(self, rng):
        G = random_rational(rng, 2, 3, 2, kind="chebyshev1")
        L = build_m1(G)
        sol = solve_gep(L)
        pairs = recover_right(L, sol)
        p = pairs[0]
        z = lift_right(G, L, p.lam, p.vector)
        assert np.linalg.norm(L.at(p.lam) @ z) <= 1e-8 * np.linalg.norm(z) * np.linalg.norm(L.at(p.lam))
        # recover back: last block recovers u up to scale
        u2 = z[L.meta.n + (L.meta.k - 1) * L.meta.m :]
        cos = abs(np.vdot(u2, p.vector)) / (np.linalg.norm(u2) * np.linalg.norm(p.vector))
        assert abs(cos - 1.0) <= 1e-9

    def test_lift_left_m1(self, rng):
        G = random_rational(rng, 2, 3, 2)
        L = build_m1(G)
        sol = solve_gep(L)
        p = recover_left(L, sol)[0]
        y = lift_left(G, L, p.lam, p.vector)
        assert np.linalg.norm(y @ L.at(p.lam)) <= 1e-8 * np.linalg.norm(y) * np.linalg.norm(L.at(p.lam))

    def test_lift_m2_both_sides(self, rng):
        G = random_rational(rng, 2, 3, 2)
        L = build_m2(G)
        sol = solve_gep(L)
        pr = recover_right(L, sol)[0]
        z = lift_right(G, L, pr.lam, pr.vector)
        assert np.linalg.norm(L.at(pr.lam) @ z) <= 1e-8 * np.linalg.norm(z) * np.linalg.norm(L.at(pr.lam))
        pl = recover_left(L, sol)[0]
        y = lift_left(G, L, pl.lam, pl.vector)
        assert np.linalg.norm(y @ L.at(pl.lam)) <= 1e-8 * np.linalg.norm(y) * np.linalg.norm(L.at(pl.lam))

    def test_no_state_part(self, rng):
        G = RationalMatrix(scalar_example().poly, None)
        L = build_m1(G)
        lam = 1.0  # root of lam^2 - 1
        z = lift_right(G, L, lam, np.array([1.0]))
        assert np.allclose(z, [1.0, 1.0])  # Phi_2(1) = [1, 1]

    def test_rejects_non_eigenpair(self, rng):
        G = random_rational(rng, 2, 2, 1)
        L = build_m1(G)
        with pytest.raises(NotAnEigenpair):
            lift_right(G, L, 0.123, np.array([1.0, 0.0]))


class TestSystemMaps:
    def test_scalar_example(self):
        G = scalar_example()
        P = system_matrix(G)
        lam = np.roots([1.0, 0.0, -1.0, 1.0])[0]
        z = system_lift(P, lam, np.array([1.0]))
        assert np.allclose(z[0], -1.0 / lam)  # y = -x/lam from lam*y + x = 0
        assert np.linalg.norm(P(lam) @ z) <= 1e-10
        x = system_recover(P, lam, z)
        assert np.allclose(x, [1.0])

    def test_left_lift(self):
        G = scalar_example()
        P = system_matrix(G)
        lam = np.roots([1.0, 0.0, -1.0, 1.0])[0]
        z = system_lift(P, lam, np.array([1.0]), side="left")
        assert np.linalg.norm(z @ P(lam)) <= 1e-10

    def test_dimension_equality(self, rng):
        # dim of the system matrix null space equals that of G at the eigenvalue
        G = random_rational(rng, 2, 2, 2)
        P = system_matrix(G)
        from ratlin.verify import oracle_eigenvalues

        lam = oracle_eigenvalues(G).finite[0]
        sP = np.linalg.svd(P(lam), compute_uv=False)
        sG = np.linalg.svd(evaluate(G, lam), compute_uv=False)
        dim_p = int(np.count_nonzero(sP <= 1e-8 * sP[0]))
        dim_g = int(np.count_nonzero(sG <= 1e-8 * max(sG[0], 1.0)))
        assert dim_p == dim_g == 1

    def test_singular_a_block(self):
        G = scalar_example()
        P = system_matrix(G)
        with pytest.raises(SingularABlock):
            system_lift(P, 0.0, np.array([1.0]))  # lam = 0 is the pole


class TestSolveRep:
    def test_scalar_pipeline(self):
        G = scalar_example()
        result = solve_rep(G, "m1")
        assert_eigs_match(result.eigenvalues, np.roots([1.0, 0.0, -1.0, 1.0]))
        assert all(p.residual <= 1e-8 for p in result.right + result.left)

    def test_polynomial_only(self):
        D = PolyMat(standard_basis("monomial", 2), np.array([-4.0, 0.0, 1.0]))
        result = solve_rep(RationalMatrix(D, None), "m1")
        assert np.allclose(np.sort(result.eigenvalues.real), [-2.0, 2.0], atol=1e-9)

    def test_pole_zero_coincidence_flagged(self):
        # G = diag(lam^2 + 1/(lam-1), (lam-1)(lam-2)): det of the system matrix
        # has a root at the pole lam = 1, which must be flagged, not reported
        D = PolyMat(
            standard_basis("monomial", 2),
            np.array([np.diag([0.0, 2.0]), np.diag([0.0, -3.0]), np.eye(2)]),
        )
        sp = StateSpaceRealization([[1.0]], [[1.0, 0.0]], [[1.0], [0.0]])
        G = RationalMatrix(D, sp)
        result = solve_rep(G, "m1")
        assert len(result.pole_candidates) == 1
        assert abs(result.pole_candidates[0] - 1.0) <= 1e-7
        assert all(abs(lam - 1.0) > 1e-6 for lam in result.eigenvalues)
        from ratlin.verify import oracle_eigenvalues

        assert_eigs_match(result.eigenvalues, oracle_eigenvalues(G).finite, rtol=1e-6)

    def test_symmetric_family(self, rng):
        G = random_rational(rng, 2, 2, 2, symmetric=True)
        result = solve_rep(G, "sym")
        from ratlin.verify import oracle_eigenvalues

        assert_eigs_match(result.eigenvalues, oracle_eigenvalues(G).finite, rtol=1e-6)
        assert all(p.residual <= 1e-8 for p in result.right)
