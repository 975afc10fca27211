"""End-to-end tests of the command-line interface and the JSON schemas."""
import json
import numpy as np
import pytest
from fractions import Fraction

from ncspaces.cli import EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK, main
from ncspaces.finite_reps import clock_shift
from ncspaces.gridfn import GridFunction, read_gridfn, write_gridfn
from ncspaces.serialize import (
    matrix_from_json,
    matrix_to_json,
    poly_from_json,
    poly_to_json,
    theta_from_json,
    theta_to_json,
    tuple_from_json,
    tuple_to_json,
)
from ncspaces.skew import SkewMatrix
from ncspaces.twisted_algebra import NCPolynomial, poly_mul


class TestSerialization:
    def test_theta_rational_roundtrip(self):
        theta = SkewMatrix.from_upper(3, {(0, 1): Fraction(1, 3), (1, 2): Fraction(-2, 7)})
        back = theta_from_json(theta_to_json(theta))
        assert back == theta
        assert back.is_rational

    def test_poly_roundtrip(self):
        theta = SkewMatrix.from_upper(2, {(0, 1): Fraction(1, 4)})
        a = NCPolynomial(theta, {(1, 0): 1.5 - 2j, (0, -2): 0.25j})
        back = poly_from_json(poly_to_json(a))
        assert back.allclose(a, 1e-15)

    def test_matrix_roundtrip(self):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        back = matrix_from_json(matrix_to_json(m))
        assert np.abs(back - m).max() <= 1e-15

    def test_tuple_roundtrip(self):
        t = clock_shift(1, 3)
        back = tuple_from_json(tuple_to_json(t))
        assert np.abs(back.sigma - t.sigma).max() <= 1e-15
        for a, b in zip(back.matrices, t.matrices):
            assert np.abs(a - b).max() <= 1e-15


class TestCliBasics:
    def test_audit_reference_point(self, capsys):
        assert main(["audit", "--k", "8100", "--target", "2500"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "slack: 26.0" in out

    def test_audit_failing_k(self, capsys):
        assert main(["audit", "--k", "100", "--target", "2500"]) == EXIT_CHECK_FAILED

    def test_butterfly_rejects_qmax_zero(self):
        assert main(["butterfly", "--qmax", "0"]) == EXIT_INVALID

    def test_relations_identity_pairs(self, capsys):
        assert main(["relations", "--theta", "identity-pairs", "--d", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        residual = float(out.split("commutation residual: ")[1].splitlines()[0])
        assert residual <= 1e-13

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert main(["audit", "--config", str(cfg)]) == EXIT_INVALID
        assert "unknown config key" in capsys.readouterr().err

    def test_malformed_config_line_diagnostic(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{\n  "k": 8100,\n  bad\n}')
        assert main(["audit", "--config", str(cfg)]) == EXIT_INVALID
        err = capsys.readouterr().err
        assert ":3:" in err  # line number of the defect

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k": 100, "target": 2500}))
        assert main(["audit", "--config", str(cfg), "--k", "8100"]) == EXIT_OK


class TestCliPipelines:
    def test_butterfly_deterministic_bytes(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for out in (out1, out2):
            assert main(["butterfly", "--qmax", "3", "--resolution", "24",
                         "--out", str(out), "--jobs", "2"]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()
        header = out1.read_text().splitlines()[0]
        assert header == "p,q,band_index,a,b"

    def test_holder_csv(self, tmp_path):
        out = tmp_path / "scan.csv"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "base": "0", "offsets": ["1/4", "1/8", "1/16"], "resolution": 32,
        }))
        code = main(["holder", "--config", str(cfg), "--out", str(out)])
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "delta,distance"
        assert any(line.startswith("# fitted_exponent") for line in lines)

    def test_symplectic_json(self, capsys):
        assert main(["symplectic", "--theta", "canonical", "--d", "4"]) == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["residual"] <= 1e-10

    def test_symplectic_csv_input(self, tmp_path, capsys):
        path = tmp_path / "theta.csv"
        path.write_text("0,2.0\n-2.0,0\n")
        assert main(["symplectic", "--theta", str(path)]) == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["residual"] <= 1e-12

    def test_algebra_roundtrip(self, tmp_path):
        theta = SkewMatrix.from_upper(2, {(0, 1): Fraction(1, 4)})
        a = NCPolynomial.monomial(theta, (0, 1))
        b = NCPolynomial.monomial(theta, (1, 0))
        src = tmp_path / "input.json"
        src.write_text(json.dumps({
            "a": poly_to_json(a), "b": poly_to_json(b), "axis": 0,
        }))
        out = tmp_path / "result.json"
        assert main(["algebra", "--input", str(src), "--out", str(out)]) == EXIT_OK
        res = json.loads(out.read_text())
        prod = poly_from_json(res["product_ab"])
        assert prod.allclose(poly_mul(a, b), 1e-14)
        # a b = v u carries the phase exp(-2 pi i / 4) = -i; b a = u v does not
        assert prod.coefficient((1, 1)) == pytest.approx(-1j, abs=1e-14)
        prod_ba = poly_from_json(res["product_ba"])
        assert prod_ba.coefficient((1, 1)) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.filterwarnings("ignore::UserWarning")  # products spread past the demo box
    def test_moyal_demo_writes_gridfn(self, tmp_path):
        out = tmp_path / "star.gridfn"
        assert main(["moyal", "--grid", "16,6.0", "--theta", "1", "--method",
                     "fourier", "--out", str(out)]) == EXIT_OK
        g = read_gridfn(out)
        assert g.dim == 2 and g.points == 16

    @pytest.mark.filterwarnings("ignore::UserWarning")  # products spread past the demo box
    def test_moyal_file_inputs(self, tmp_path):
        f = GridFunction.gaussian(2, 6.0, 16, sigma=1.0)
        g = GridFunction.gaussian(2, 6.0, 16, sigma=1.2)
        fp, gp = tmp_path / "f.gridfn", tmp_path / "g.gridfn"
        write_gridfn(f, fp)
        write_gridfn(g, gp)
        out = tmp_path / "prod.gridfn"
        assert main(["moyal", "--f", str(fp), "--g", str(gp), "--theta", "1",
                     "--method", "direct", "--out", str(out)]) == EXIT_OK
        prod = read_gridfn(out)
        assert np.isfinite(prod.values).all()

    def test_weyl_scan_csv(self, tmp_path):
        out = tmp_path / "weyl.csv"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"grids": [32, 64], "s": [0.37], "t": [0.37]}))
        assert main(["weyl", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0].startswith("M,L,theta,s,t,residual")
        assert len(lines) == 3

    def test_all_checks_smoke(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "algebra_triples": 5, "tensor_max_d": 3, "symplectic_cases": 5,
            "metric_pairs": 5, "hermitian_pairs": 5, "moyal_points": 16,
            "holder_resolution": 24, "holder_max_k": 4,
        }))
        code = main(["all-checks", "--config", str(cfg), "--jobs", "2"])
        out = capsys.readouterr().out
        assert code == EXIT_OK, out
        assert "PASS" in out and "FAIL" not in out
