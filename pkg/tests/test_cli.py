import json
import subprocess
import sys

import pytest

from osva.cli import REPORT_DIR_ENV, ReportBundle, RunConfig, UsageError, emit_report, load_report, main
from osva.report import CheckReport


def run_cli(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--output", str(out)])
    return code, out


def test_validate_builtin(tmp_path):
    code, out = run_cli(tmp_path, "validate", "--builtin", "ising")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["overall_pass"] is True
    assert doc["config"]["command"] == "validate"
    assert "wall_time_s" not in doc


def test_validate_bad_data_exit_1(tmp_path):
    from osva.fusion import dump_fusion_data, ising_builtin

    doc = json.loads(dump_fusion_data(ising_builtin()))
    doc["fusion"] = [f for f in doc["fusion"] if f[:3] != ["2", "2", "0"]]
    path = tmp_path / "flipped.json"
    path.write_text(json.dumps(doc))
    code, out = run_cli(tmp_path, "validate", "--data", str(path))
    assert code == 1
    assert json.loads(out.read_text())["overall_pass"] is False


def test_missing_file_exit_2(tmp_path):
    code, _ = run_cli(tmp_path, "validate", "--data", str(tmp_path / "nope.json"))
    assert code == 2


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["axioms", "--radii", "1.0,0.4"])
    assert exc.value.code == 2
    assert main(["axioms", "--tol", "0", "--output", str(tmp_path / "x")]) == 2
    assert main(["solve", "--builtin", "ising", "--dims", "1,1"]) == 2
    assert main(["axioms", "--instance", "nope"]) == 2


def test_solve_verify_round_trip(tmp_path):
    sols = tmp_path / "sols.json"
    code, out = run_cli(tmp_path, "solve", "--builtin", "ising", "--dims", "1,1,0", "--solutions", str(sols))
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["solutions"]) == 2
    code, out = run_cli(tmp_path, "verify", "--builtin", "ising", "--solutions", str(sols), name="v.json")
    assert code == 0
    assert [r["name"] for r in json.loads(out.read_text())["reports"]] == ["verify solution 0", "verify solution 1"]


def test_verify_tampered_exit_1(tmp_path):
    sols = tmp_path / "sols.json"
    run_cli(tmp_path, "solve", "--builtin", "ising", "--dims", "1,1,0", "--solutions", str(sols))
    text = sols.read_text()
    doc = json.loads(text)
    doc["solutions"][0]["unit"] = [{"a": "2", "b": "0"}]
    sols.write_text(json.dumps(doc))
    code, _ = run_cli(tmp_path, "verify", "--builtin", "ising", "--solutions", str(sols))
    assert code == 1


def test_axioms_assoc_exit_0(tmp_path):
    code, out = run_cli(tmp_path, "axioms", "--instance", "assoc:m2")
    assert code == 0
    names = [r["name"] for r in json.loads(out.read_text())["reports"]]
    assert "associativity" in names


def test_axioms_heisenberg_reports_truncation(tmp_path):
    # the truncated associativity residual is far above 1e-4 at small cutoffs
    code, out = run_cli(tmp_path, "axioms", "--instance", "heisenberg", "--cutoff", "4", "--samples", "2")
    assert code == 1
    reports = {r["name"]: r for r in json.loads(out.read_text())["reports"]}
    assert not reports["associativity"]["passed"]
    assert all(r["passed"] for n, r in reports.items() if n != "associativity")


def test_geometry_exit_0(tmp_path):
    code, out = run_cli(tmp_path, "geometry", "--instance", "heisenberg", "--cutoff", "6")
    assert code == 0
    names = [r["name"] for r in json.loads(out.read_text())["reports"]]
    assert len(names) == 4


def test_geometry_assoc_vacuum(tmp_path):
    code, _ = run_cli(tmp_path, "geometry", "--instance", "assoc:m2", "--check", "vacuum")
    assert code == 0


def test_deterministic_output(tmp_path):
    args = ["geometry", "--instance", "heisenberg", "--cutoff", "6", "--seed", "7"]
    _, a = run_cli(tmp_path, *args, name="a.json")
    _, b = run_cli(tmp_path, *args, name="b.json")
    assert a.read_bytes() == b.read_bytes()
    _, c = run_cli(tmp_path, *args[:-1], "8", name="c.json")
    assert a.read_bytes() != c.read_bytes()


def test_timings_opt_in(tmp_path):
    code, out = run_cli(tmp_path, "validate", "--builtin", "ising", "--timings")
    assert code == 0
    assert "wall_time_s" in json.loads(out.read_text())


def test_text_format(tmp_path):
    code, out = run_cli(tmp_path, "validate", "--builtin", "ising", "--format", "text", name="o.txt")
    text = out.read_text()
    assert code == 0 and text.splitlines()[-1] == "overall: PASS"


def test_report_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(REPORT_DIR_ENV, str(tmp_path / "reports"))
    assert main(["validate", "--builtin", "ising"]) == 0
    assert json.loads((tmp_path / "reports" / "validate.json").read_text())["overall_pass"]


def test_stdout_default(capsys, monkeypatch):
    monkeypatch.delenv(REPORT_DIR_ENV, raising=False)
    assert main(["validate", "--builtin", "ising"]) == 0
    assert json.loads(capsys.readouterr().out)["overall_pass"]


def test_emit_empty_bundle(tmp_path):
    bundle = ReportBundle("0", {"command": "none"})
    text = emit_report(bundle, "structured", tmp_path / "e.json")
    assert json.loads(text)["overall_pass"] is True


def test_emit_failure_round_trip(tmp_path):
    rep = CheckReport("thing", tolerance=1e-4)
    rep.fail("x", 1, 2, 0.5)
    bundle = ReportBundle("0", {"command": "none"}, [rep, CheckReport("ok")])
    text = emit_report(bundle, "structured", tmp_path / "f.json")
    back = load_report(text)
    assert not back.passed
    assert [r.name for r in back.reports] == ["thing", "ok"]
    assert emit_report(back, "structured", tmp_path / "g.json") == text


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("validate", tolerance=-1)
    with pytest.raises(UsageError):
        RunConfig("validate", cutoff=1)
    with pytest.raises(UsageError):
        RunConfig("validate", format="xml")


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run(
        [sys.executable, "-m", "osva", "validate", "--builtin", "ising", "--output", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["overall_pass"]
