import json
import shutil
import subprocess
import sys

import pytest

from curvsym import goldens
from curvsym.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_lemma_single_dimension(capsys):
    code, out, _ = run(["verify-lemma", "--dims", "2"], capsys)
    report = json.loads(out)
    assert code == EXIT_OK and report["ok"]
    assert report["schema_version"] == 1
    assert {r["dim"] for r in report["reports"]} == {2, None}
    assert {r["check"] for r in report["reports"]} == {
        "left_inverse", "phi_kernel", "quintic_kernel", "eq2_kernel", "rederive_psi"}


def test_injected_typo_fails_with_witness(capsys):
    code, out, _ = run(["verify-lemma", "--dims", "2", "--inject-psi-typo"], capsys)
    report = json.loads(out)
    assert code == EXIT_FAIL and not report["ok"]
    (failed,) = [r for r in report["reports"] if r["check"] == "left_inverse"]
    assert failed["status"] == "exact-fail"
    assert failed["witness"]["component"] and failed["witness"]["expected"] != failed["witness"]["got"]
    solved = [r for r in report["reports"] if r["check"] == "solve_left_inverse"]
    assert solved and solved[0]["derived"]["corrected_passes"] is True


def test_dims_table(capsys):
    code, out, _ = run(["dims", "--dims", "2,3"], capsys)
    assert code == EXIT_OK
    pinned = goldens.load(goldens.DIMS_FILE)["dims"]
    for r in json.loads(out)["reports"]:
        d = r["derived"]
        assert d["constraint_nullspace"] == d["projector_image"] == d["golden"] == pinned[str(r["dim"])]


def test_tampered_golden(tmp_path, monkeypatch, capsys):
    shutil.copytree(goldens.goldens_dir(), tmp_path, dirs_exist_ok=True)
    path = tmp_path / goldens.DIMS_FILE
    data = json.loads(path.read_text())
    data["dims"]["2"] += 1
    path.write_text(json.dumps(data))
    monkeypatch.setenv("CURVSYM_GOLDENS", str(tmp_path))
    code, out, _ = run(["dims", "--dims", "2"], capsys)
    assert code == EXIT_FAIL
    assert json.loads(out)["reports"][0]["witness"]["reason"] == "dimension mismatch"


def test_missing_golden_is_io_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("CURVSYM_GOLDENS", str(tmp_path))
    code, _, err = run(["dims", "--dims", "2"], capsys)
    assert code == EXIT_IO and "not found" in err


def test_polarize_constant(capsys):
    code, out, _ = run(["polarize", "--dims", "2,3", "--trials", "5"], capsys)
    report = json.loads(out)
    assert code == EXIT_OK and report["constant"] == "2" and report["consistent_across_dims"]
    code, out, _ = run(["polarize", "--dims", "2", "--trials", "1", "--seed", "99"], capsys)
    assert code == EXIT_OK and json.loads(out)["constant"] == "2"


def test_curvature_sphere(capsys):
    code, out, _ = run(["curvature", "--metric", "sphere", "--params", "radius=1"], capsys)
    report = json.loads(out)
    assert code == EXIT_OK
    d = report["reports"][0]["derived"]
    assert d["verdict"] == "locally symmetric within tol" and len(d["points"]) == 5


def test_curvature_perturbed_is_expected_failure(capsys):
    code, out, _ = run(["curvature", "--metric", "perturbed-flat", "--params", "eps=0.1", "--points", "0.5,0,0"], capsys)
    report = json.loads(out)
    assert code == EXIT_OK and report["matches_expected"]
    (p,) = report["reports"][0]["derived"]["points"]
    assert p["phi_nabla_R_norm"] > 0


def test_curvature_tolerance_too_tight(capsys):
    code, out, err = run(["curvature", "--metric", "hyperbolic", "--params", "radius=1", "--tol", "1e-12"], capsys)
    assert code == EXIT_FAIL
    assert "tolerance too tight for FD" in err
    assert "tolerance too tight for FD" in json.loads(out)["message"]


@pytest.mark.parametrize("argv", [
    ["curvature", "--metric", "torus"],
    ["curvature", "--metric", "sphere", "--params", "radius=-1"],
    ["curvature", "--metric", "sphere", "--points", "0,0,0"],
    ["curvature", "--metric", "sphere", "--points", "a,b"],
])
def test_curvature_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == EXIT_USAGE


def test_argparse_usage_errors(capsys):
    for argv in (["dims", "--dims", "9"], ["polarize", "--trials", "0"], ["nonsense"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_USAGE
    capsys.readouterr()


def test_reports_are_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["polarize", "--dims", "2", "--trials", "5", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_text_format(capsys):
    code, out, _ = run(["dims", "--dims", "2", "--format", "text"], capsys)
    assert code == EXIT_OK and out.startswith("class_dimension")


def test_tensor_round_trip(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text('{"dim": 2, "rank": 1, "kind": "rational", "entries": ["2/4", "3"]}')
    code, out, _ = run(["tensor", str(path)], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["entries"] == ["1/2", "3"]


def test_tensor_errors(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text('{"dim": 2, "rank": 1, "kind": "rational", "entries": ["1",')
    code, _, err = run(["tensor", str(path)], capsys)
    assert code == EXIT_IO and "line 1" in err
    assert run(["tensor", str(tmp_path / "missing.json")], capsys)[0] == EXIT_IO


def test_unwritable_output(tmp_path, capsys):
    code, _, _ = run(["dims", "--dims", "2", "--out", str(tmp_path / "no" / "such" / "dir.json")], capsys)
    assert code == EXIT_IO


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "curvsym", "dims", "--dims", "2"], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["ok"] is True
