import json
import subprocess
import sys

import pytest

from akweyl import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_text_and_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--entry", "cp2_fs", "--resolutions", "4,6")
    assert code == 0
    assert out.strip().endswith("RESULT: PASS")


def test_verify_json_is_deterministic(capsys, tmp_path):
    argv = ["verify", "--entry", "s2xs2", "--param", "a=1", "--param", "b=2", "--resolutions", "4,6",
            "--format", "json", "--out", str(tmp_path)]
    code, first, _ = run(capsys, *argv)
    code2, second, _ = run(capsys, *argv)
    assert code == code2 == 0
    assert first == second
    d = json.loads(first)
    assert d["params"] == {"a": 1.0, "b": 2.0}
    assert (tmp_path / "s2xs2.json").exists() and (tmp_path / "s2xs2.csv").exists()


def test_verify_fails_under_tight_tolerance(capsys):
    code, out, _ = run(capsys, "verify", "--entry", "s4_round", "--resolutions", "4,5", "--sections", "integral",
                       "--tol", "topology_chart=1e-14")
    assert code == 1
    assert "RESULT: FAIL" in out


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"entry": "s4_round", "param": {"r": 2.0}, "resolutions": [6, 8],
                               "format": "text", "sections": ["integral"]}))
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["entry"] == "s4_round" and d["params"] == {"r": 2.0} and d["resolutions"] == [6, 8]


def test_decompose_csv(capsys):
    code, out, _ = run(capsys, "decompose", "--entry", "cp2_fs", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("x0,")
    assert len(lines) == 5
    assert float(lines[1].split(",")[4]) == pytest.approx(24.0)


def test_converge_text(capsys):
    code, out, _ = run(capsys, "converge", "--entry", "t4_flat", "--param", "form=constant", "--resolutions", "8,9,10")
    assert code == 0
    assert "fitted order: exact" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--entry", "s4_round", "--param", "r=-1"],
    ["verify", "--entry", "s4_round", "--param", "r"],
    ["verify", "--entry", "t4_flat", "--resolutions", "a,b"],
    ["verify", "--entry", "t4_flat", "--sections", "everything"],
    ["verify", "--entry", "t4_flat", "--tol", "wplus_identity=-1"],
    ["verify", "--entry", "t4_flat", "--tol", "nonsense=1e-3"],
    ["converge", "--entry", "t4_flat", "--resolutions", "8,12"],
    ["converge", "--entry", "t4_flat", "--resolutions", "4,5,6"],
    ["converge", "--entry", "cp2_fs", "--resolutions", "8,9,10"],
    ["verify", "--config", "/nonexistent/cfg.json"],
    ["verify"],
])
def test_errors_exit_nonzero(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "akweyl", "verify", "--entry", "nope"], capture_output=True, text=True)
    assert proc.returncode != 0
