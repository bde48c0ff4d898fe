"""End-to-end tests of the command-line interface."""

import json

import numpy as np
import pytest

from ricciflow.cli import main
from ricciflow.lie import StructureConstants, write_constants


def run(args):
    return main(args)


class TestPresetsCommand:
    def test_lists_presets(self, capsys):
        assert run(["presets"]) == 0
        out = capsys.readouterr().out
        for name in ("so3", "heisenberg", "e2", "e11", "sl2r", "abelian"):
            assert name in out


class TestRicciCommand:
    def test_so3(self, tmp_path, capsys):
        out = tmp_path / "ricci_so3"
        assert run(["ricci", "--preset", "so3", "--out", str(out)]) == 0
        payload = json.loads((tmp_path / "ricci_so3.json").read_text())
        assert payload["scalar"] == 1.5
        assert np.allclose(payload["total"], 0.5 * np.eye(3), atol=0)
        assert "scalar = 1.5" in capsys.readouterr().out

    def test_abelian_zero(self, tmp_path):
        out = tmp_path / "r"
        assert run(["ricci", "--preset", "abelian", "--out", str(out)]) == 0
        payload = json.loads((tmp_path / "r.json").read_text())
        for key in ("r1", "r2", "r3", "r4", "total"):
            assert np.array_equal(payload[key], np.zeros((3, 3)))

    def test_inline_params(self, tmp_path):
        out = tmp_path / "r"
        assert run(["ricci", "--params", "1,0,0,0,0,0", "--out", str(out)]) == 0
        payload = json.loads((tmp_path / "r.json").read_text())
        assert np.allclose(payload["total"], np.diag([0.5, -0.5, -0.5]), atol=1e-15)

    def test_algebra_file(self, tmp_path):
        path = tmp_path / "alg.json"
        write_constants(path, StructureConstants.from_entries(3, {(0, 1, 2): 1.0}))
        out = tmp_path / "r"
        assert run(["ricci", "--algebra", str(path), "--out", str(out)]) == 0
        payload = json.loads((tmp_path / "r.json").read_text())
        assert np.allclose(payload["total"], np.diag([0.5, -0.5, -0.5]), atol=1e-15)

    def test_b0_frame(self, tmp_path):
        b0 = tmp_path / "b0.json"
        b0.write_text(json.dumps(np.diag([2.0, 1.0, 1.0]).tolist()))
        out = tmp_path / "r"
        assert run(["ricci", "--preset", "heisenberg", "--b0", str(b0), "--out", str(out)]) == 0
        payload = json.loads((tmp_path / "r.json").read_text())
        # bracket coefficient scales to gh/f = 1/2, curvature to u^2/2 = 1/8
        assert np.allclose(payload["total"], np.diag([0.125, -0.125, -0.125]), atol=1e-14)

    def test_singular_b0_exit_3(self, tmp_path):
        b0 = tmp_path / "b0.json"
        b0.write_text(json.dumps(np.zeros((3, 3)).tolist()))
        assert run(["ricci", "--preset", "so3", "--b0", str(b0)]) == 3


class TestFlowCommand:
    def test_abelian_completed(self, tmp_path, capsys):
        out = tmp_path / "flat"
        code = run(["flow", "--preset", "abelian", "--t-end", "1", "--out", str(out)])
        assert code == 0
        assert "termination: completed" in capsys.readouterr().out
        csv_lines = (tmp_path / "flat.csv").read_text().strip().split("\n")
        assert csv_lines[0].startswith("t,b_11,")
        for line in csv_lines[1:]:
            vals = line.split(",")
            assert float(vals[1]) == 1.0 and float(vals[2]) == 0.0

    def test_so3_collapse_defaults(self, tmp_path, capsys):
        out = tmp_path / "sphere"
        code = run(["flow", "--preset", "so3", "--t-end", "2", "--out", str(out)])
        assert code == 0
        assert "termination: collapsed" in capsys.readouterr().out
        payload = json.loads((tmp_path / "sphere.json").read_text())
        assert payload["termination"] == "collapsed"
        assert abs(payload["collapse_time_estimate"] - 1.0) <= 1e-3

    def test_normalized_einstein(self, tmp_path):
        out = tmp_path / "norm"
        code = run(["flow", "--preset", "so3", "--normalized", "--t-end", "10",
                    "--out", str(out), "--format", "json"])
        assert code == 0
        payload = json.loads((tmp_path / "norm.json").read_text())
        assert payload["termination"] == "completed"
        for s in payload["samples"]:
            assert np.max(np.abs(np.array(s["b"]) - np.eye(3))) <= 1e-10

    def test_underflow_exit_4(self, capsys):
        # unattainable tolerances reject every step while the frame stays
        # bounded: the controller stalls and the blow-up probe finds nothing
        code = run(["flow", "--preset", "heisenberg", "--t-end", "1",
                    "--rel-tol", "1e-300", "--abs-tol", "1e-300"])
        assert code == 4
        assert "step_underflow" in capsys.readouterr().out

    def test_singular_initial_frame_exit_3(self, tmp_path):
        b0 = tmp_path / "degenerate.json"
        b0.write_text(json.dumps([[1.0, 0.0, 0.0], [0.0, 1e-13, 0.0], [0.0, 0.0, 1.0]]))
        assert run(["flow", "--preset", "so3", "--t-end", "1", "--b0", str(b0)]) == 3

    def test_format_selection(self, tmp_path):
        out = tmp_path / "both"
        assert run(["flow", "--preset", "abelian", "--t-end", "0.5", "--out", str(out)]) == 0
        assert (tmp_path / "both.csv").exists() and (tmp_path / "both.json").exists()
        out2 = tmp_path / "csvonly"
        assert run(["flow", "--preset", "abelian", "--t-end", "0.5", "--out", str(out2),
                    "--format", "csv"]) == 0
        assert (tmp_path / "csvonly.csv").exists()
        assert not (tmp_path / "csvonly.json").exists()

    def test_csv_deterministic(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        args = ["flow", "--preset", "heisenberg", "--t-end", "1", "--format", "csv"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_b0_file(self, tmp_path):
        b0 = tmp_path / "b0.json"
        b0.write_text(json.dumps([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        out = tmp_path / "h"
        assert run(["flow", "--preset", "abelian", "--t-end", "0.5", "--b0", str(b0),
                    "--out", str(out), "--format", "csv"]) == 0
        lines = (tmp_path / "h.csv").read_text().strip().split("\n")
        assert float(lines[1].split(",")[1]) == 2.0

    def test_non_triangular_b0_exit_2(self, tmp_path):
        b0 = tmp_path / "b0.json"
        b0.write_text(json.dumps(np.ones((3, 3)).tolist()))
        assert run(["flow", "--preset", "so3", "--b0", str(b0)]) == 2


class TestClassifyCommand:
    def test_case1(self, capsys):
        assert run(["classify", "--params", "1,1,1,0,0,0"]) == 0
        assert "CaseI" in capsys.readouterr().out

    def test_case2(self, capsys):
        assert run(["classify", "--params", "1,0,1,2,0,0"]) == 0
        assert "CaseII" in capsys.readouterr().out

    def test_case3_with_solve_a(self, tmp_path, capsys):
        out = tmp_path / "c3"
        assert run(["classify", "--params", "0,0,0,1,1,1", "--solve-a", "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "CaseIII" in stdout
        payload = json.loads((tmp_path / "c3.json").read_text())
        assert payload["label"] == "CaseIII"
        assert payload["params"][:3] == [1.0, 1.0, 1.0]
        entries = payload["reduced_constants"]["entries"]
        # one dominant bracket coefficient; the rest is roundoff residue
        large = [e for e in entries if abs(e["value"]) > 1e-10]
        assert len(large) == 1
        assert large[0]["k"] == 1 and large[0]["i"] == 2 and large[0]["j"] == 3
        assert large[0]["value"] == pytest.approx(3.0, rel=1e-12)

    def test_non_diagonal_emits_rotation(self, tmp_path, capsys):
        out = tmp_path / "nd"
        assert run(["classify", "--params", "1,1,1,1,1,0", "--out", str(out)]) == 0
        assert "NonDiagonalR1" in capsys.readouterr().out
        payload = json.loads((tmp_path / "nd.json").read_text())
        rot = np.array(payload["rotation"])
        assert np.max(np.abs(rot.T @ rot - np.eye(3))) <= 1e-12

    def test_solve_a_domain_error_exit_5(self):
        assert run(["classify", "--params", "0,0,0,1,0,1", "--solve-a"]) == 5

    def test_preset_input(self, capsys):
        assert run(["classify", "--preset", "so3"]) == 0
        assert "CaseI" in capsys.readouterr().out


class TestCheckCommand:
    def test_so3_passes(self, capsys):
        assert run(["check", "--preset", "so3"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "jacobi_identity" in out

    def test_heisenberg_notes_unimodular(self, capsys):
        assert run(["check", "--preset", "heisenberg"]) == 0
        assert "R2 = 0 (unimodular)" in capsys.readouterr().out

    def test_jacobi_failure_exit_6(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        write_constants(path, StructureConstants.from_entries(
            3, {(0, 0, 1): 1.0, (1, 0, 2): 1.0}))
        assert run(["check", "--algebra", str(path)]) == 6
        out = capsys.readouterr().out
        assert "FAIL jacobi_identity" in out

    def test_deterministic_output(self, capsys):
        assert run(["check", "--preset", "sl2r", "--seed", "7"]) == 0
        first = capsys.readouterr().out
        assert run(["check", "--preset", "sl2r", "--seed", "7"]) == 0
        assert capsys.readouterr().out == first

    def test_check_json_payload(self, tmp_path):
        out = tmp_path / "chk"
        assert run(["check", "--preset", "so3", "--out", str(out)]) == 0
        payload = json.loads((tmp_path / "chk.json").read_text())
        assert all(entry["pass"] for entry in payload["checks"])


class TestBadInput:
    def test_unknown_preset_exit_2(self):
        assert run(["ricci", "--preset", "nope"]) == 2

    def test_malformed_params_exit_2(self):
        assert run(["ricci", "--params", "1,2"]) == 2
        assert run(["classify", "--params", "a,b,c,d,e,f"]) == 2

    def test_missing_algebra_file_exit_2(self, tmp_path):
        assert run(["ricci", "--algebra", str(tmp_path / "missing.json")]) == 2

    def test_mutually_exclusive_sources(self):
        with pytest.raises(SystemExit) as exc:
            run(["ricci", "--preset", "so3", "--params", "1,1,1,0,0,0"])
        assert exc.value.code == 2

    def test_no_source(self):
        with pytest.raises(SystemExit) as exc:
            run(["ricci"])
        assert exc.value.code == 2

    def test_bad_flow_config_exit_2(self):
        assert run(["flow", "--preset", "so3", "--t-end", "-1"]) == 2
