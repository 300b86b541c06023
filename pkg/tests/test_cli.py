import json
import subprocess
import sys

import pytest

from autoconv.cli import RunConfig, main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_json(capsys):
    code, out, _ = _run(capsys, "bound", "--delta", "0.13", "--n", "22", "--grid", "100000")
    assert code == 0
    d = json.loads(out)
    assert d["bound"] > 1.262
    for key, value in d.items():
        if isinstance(value, float) and not key.endswith(("_err", "error_budget")):
            assert f"{key}_err" in d, key


def test_bound_simple_text(capsys):
    code, out, _ = _run(capsys, "bound", "--delta", "0.1184", "--simple", "--format", "text")
    assert code == 0
    assert out.startswith("delta      = 0.1184")
    assert "bound      = 1.25087" in out


def test_output_is_byte_identical(capsys):
    args = ("verify", "--count", "5", "--seed", "7", "--grid", "10000")
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args)
    assert a == b
    assert json.loads(a)["passed"] == 5


def test_poly(capsys):
    code, out, _ = _run(capsys, "poly", "--coeffs", "1,1,0,1")
    assert code == 0
    d = json.loads(out)
    assert d["ratio_R"] == pytest.approx(8 / 9)
    assert d["holds"] is True


def test_bset_and_sym(capsys):
    code, out, _ = _run(capsys, "bset", "--set", "1,2,4,8", "--n", "8")
    assert code == 0 and json.loads(out)["g"] == 2
    code, out, _ = _run(capsys, "sym", "--intervals", "0:0.5")
    assert code == 0 and json.loads(out)["symmetric_measure"] == 0.5


def test_extremal_csv(capsys):
    code, out, _ = _run(capsys, "extremal", "--probe", "1", "--levels", "4,5", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("probe,")
    assert len(lines) == 3


def test_sweep_csv(capsys):
    code, out, _ = _run(capsys, "sweep", "--delta-min", "0.12", "--delta-max", "0.13",
                        "--delta-step", "0.01", "--n-min", "21", "--n-max", "22",
                        "--grid", "10000", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "delta,u,n,kss_l2sq,min_g,L,R,bound,error_budget,mode"
    assert len(lines) == 5


def test_invalid_input_exit_codes(capsys):
    assert _run(capsys, "poly", "--coeffs", "xyz")[0] == 2
    assert _run(capsys, "bound", "--delta", "0.3")[0] == 2
    assert _run(capsys, "bound", "--tol", "-1")[0] == 2
    assert _run(capsys, "bset", "--set", "0,3", "--n", "5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bound", "--delta", "abc"])
    assert exc.value.code == 2


def test_failed_check_exit_code(capsys, monkeypatch):
    import autoconv.cli as cli
    from autoconv.lemmas import SuiteSummary

    monkeypatch.setattr(cli.lemmas, "run_lemma_suite",
                        lambda *a, **k: SuiteSummary(2, 0, 1, 1.5, [(1, ["theorem"])], 1.262))
    code, out, _ = _run(capsys, "verify", "--count", "2", "--format", "text")
    assert code == 1
    assert "instance 1: failed theorem" in out


def test_output_dir_from_environment(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("AUTOCONV_OUTPUT_DIR", str(tmp_path))
    code, out, _ = _run(capsys, "poly", "--coeffs", "111")
    assert code == 0 and out == ""
    assert json.loads((tmp_path / "poly.json").read_text())["ratio_R"] == 1.0
    explicit = tmp_path / "sub" / "x.txt"
    _run(capsys, "poly", "--coeffs", "111", "--format", "text", "--output", str(explicit))
    assert "R(p) = 1.0" in explicit.read_text()


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("bound", grid=1)
    with pytest.raises(ValueError):
        RunConfig("bound", output_format="xml")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "autoconv", "poly", "--coeffs", "11"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["height_p2"] == 2
