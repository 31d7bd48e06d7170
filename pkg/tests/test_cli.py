import json

import numpy as np
import pytest

from conftest import scalar_example

from ratlin import PolyMat, RationalMatrix, standard_basis
from ratlin import jsonio
from ratlin.cli import Config, main


@pytest.fixture
def g_file(tmp_path):
    path = tmp_path / "g.json"
    jsonio.dump_json(jsonio.rational_to_json(scalar_example()), path)
    return path


@pytest.fixture
def chebyshev_file(tmp_path, rng):
    coeffs = rng.normal(size=(3, 2, 2))
    coeffs = np.array([(c + c.T) / 2 for c in coeffs])
    coeffs[-1] += 2 * np.eye(2)
    D = PolyMat(standard_basis("chebyshev1", 2), coeffs)
    G = RationalMatrix(D, None, structure="symmetric")
    path = tmp_path / "cheb.json"
    jsonio.dump_json(jsonio.rational_to_json(G), path)
    return path, coeffs


class TestConfig:
    def test_defaults(self):
        cfg = Config()
        assert (cfg.tol_rank, cfg.tol_eig, cfg.tol_residual) == (1e-10, 1e-8, 1e-8)
        assert (cfg.sample_points, cfg.seed) == (20, 42)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Config(tol_rank=0.0)


class TestBuild:
    def test_dm_reproduces_closed_form(self, chebyshev_file, tmp_path):
        path, coeffs = chebyshev_file
        out = tmp_path / "pencil.json"
        assert main(["build", "--family", "dm", "--input", str(path), "--out", str(out)]) == 0
        L = jsonio.pencil_from_json(jsonio.load_json(out))
        D0, D1, D2 = coeffs
        lam = 0.45
        expected = np.block(
            [[-2 * D2, 2 * lam * D2], [2 * lam * D2, lam * D1 + D0 - D2]]
        )
        assert np.allclose(L.at(lam), expected, atol=1e-12)

    def test_invalid_ansatz_exits_2(self, g_file, tmp_path):
        out = tmp_path / "pencil.json"
        code = main(["build", "--family", "m1", "--input", str(g_file), "--out", str(out), "--v", "0,0"])
        assert code == 2

    def test_polynomial_only_input(self, chebyshev_file, tmp_path):
        path, coeffs = chebyshev_file
        out = tmp_path / "pencil.json"
        assert main(["build", "--family", "m1", "--input", str(path), "--out", str(out)]) == 0
        L = jsonio.pencil_from_json(jsonio.load_json(out))
        assert L.size == 4  # k*m with no state part


class TestSolve:
    def test_scalar_fixture(self, g_file, tmp_path, capsys):
        out = tmp_path / "res.json"
        assert main(["solve", "--input", str(g_file), "--family", "m1", "--json-out", str(out)]) == 0
        res = jsonio.load_json(out)
        lams = [complex(e["lambda"][0], e["lambda"][1]) for e in res["eigenvalues"]]
        assert any(abs(lam - (-1.32471795724475)) < 1e-8 for lam in lams)

    def test_left_flag(self, g_file, tmp_path):
        out = tmp_path / "res.json"
        assert main(["solve", "--input", str(g_file), "--left", "--json-out", str(out)]) == 0
        res = jsonio.load_json(out)
        assert "left_eigenvectors" in res and len(res["left_eigenvectors"]) == 3

    def test_polynomial_roots(self, tmp_path):
        D = PolyMat(standard_basis("monomial", 2), np.array([-4.0, 0.0, 1.0]))
        path = tmp_path / "poly.json"
        jsonio.dump_json(jsonio.rational_to_json(RationalMatrix(D, None)), path)
        out = tmp_path / "res.json"
        assert main(["solve", "--input", str(path), "--json-out", str(out)]) == 0
        res = jsonio.load_json(out)
        lams = sorted(e["lambda"][0] for e in res["eigenvalues"])
        assert np.allclose(lams, [-2.0, 2.0], atol=1e-9)

    def test_deterministic_output(self, g_file, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        main(["solve", "--input", str(g_file), "--json-out", str(out1), "--seed", "7"])
        main(["solve", "--input", str(g_file), "--json-out", str(out2), "--seed", "7"])
        assert out1.read_bytes() == out2.read_bytes()


class TestVerify:
    def test_pass_and_report(self, g_file, tmp_path):
        pencil = tmp_path / "p.json"
        report = tmp_path / "rep.json"
        main(["build", "--family", "m1", "--input", str(g_file), "--out", str(pencil)])
        assert main(["verify", "--pencil", str(pencil), "--g", str(g_file), "--report", str(report)]) == 0
        rep = jsonio.load_json(report)
        assert rep["passed"] and all(c["pass"] for c in rep["checks"])

    def test_corrupted_pencil_exits_1(self, g_file, tmp_path):
        pencil = tmp_path / "p.json"
        main(["build", "--family", "m1", "--input", str(g_file), "--out", str(pencil)])
        obj = jsonio.load_json(pencil)
        obj["Y"][0][1] = [1.0, 0.0]
        jsonio.dump_json(obj, pencil)
        assert main(["verify", "--pencil", str(pencil), "--g", str(g_file)]) == 1

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["verify", "--pencil", str(tmp_path / "nope.json"), "--g", str(tmp_path / "also-nope.json")]) == 2


class TestRealize:
    def test_markov_fixture(self, tmp_path):
        path = tmp_path / "markov.json"
        jsonio.dump_json({"markov": [[[1.0]], [[1.0]]], "n": 1}, path)
        out = tmp_path / "real.json"
        assert main(["realize", "--input", str(path), "--out", str(out)]) == 0
        real = jsonio.load_json(out)
        assert real["form"] == "symmetric"
        assert np.allclose(jsonio.decode_matrix(real["S1"]), [[1.0]])
        assert np.allclose(jsonio.decode_matrix(real["S2"]), [[1.0]])
        assert np.allclose(jsonio.decode_matrix(real["W"]), [[1.0]])

    def test_pole_residue_fixture(self, tmp_path):
        path = tmp_path / "pr.json"
        jsonio.dump_json(
            {"form": "pole_residue", "poles": [[0.5, 0.0]], "residues": [[[[2.0, 0.0]]]]}, path
        )
        out = tmp_path / "real.json"
        assert main(["realize", "--input", str(path), "--out", str(out), "--form", "state-space"]) == 0
        real = jsonio.load_json(out)
        assert real["form"] == "state_space" and real["n"] == 1

    def test_empty_markov(self, tmp_path):
        path = tmp_path / "markov.json"
        jsonio.dump_json({"markov": [[[0.0]], [[0.0]]], "n": 0}, path)
        out = tmp_path / "real.json"
        assert main(["realize", "--input", str(path), "--out", str(out)]) == 0
        assert jsonio.load_json(out)["n"] == 0


class TestOracleCommand:
    def test_scalar(self, g_file, tmp_path):
        out = tmp_path / "eigs.json"
        assert main(["oracle", "--input", str(g_file), "--json-out", str(out)]) == 0
        res = jsonio.load_json(out)
        assert len(res["finite"]) == 3
        assert res["infinite_count"] == 0
        assert np.allclose([res["poles"][0][0], res["poles"][0][1]], [0.0, 0.0], atol=1e-12)


class TestRoundTrip:
    @pytest.mark.parametrize("family", ["f", "m1", "m2", "dm"])
    def test_build_load_verify(self, g_file, tmp_path, family):
        pencil = tmp_path / f"{family}.json"
        assert main(["build", "--family", family, "--input", str(g_file), "--out", str(pencil)]) == 0
        assert main(["verify", "--pencil", str(pencil), "--g", str(g_file)]) == 0

    def test_sym_family_round_trip(self, tmp_path, rng):
        from conftest import random_rational

        G = random_rational(rng, 2, 2, 2, symmetric=True)
        gpath = tmp_path / "gs.json"
        jsonio.dump_json(jsonio.rational_to_json(G), gpath)
        pencil = tmp_path / "sym.json"
        assert main(["build", "--family", "sym", "--input", str(gpath), "--out", str(pencil)]) == 0
        assert main(["verify", "--pencil", str(pencil), "--g", str(gpath)]) == 0
