import json
import subprocess
import sys

import pytest

from fuzzysuccess.cli import main

HEADER = "id," + ",".join(f"item_{i:02d}" for i in range(1, 15))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0
    assert "rules: 243+243+81+27" in out
    assert "coverage 27/27" in out


def test_validate_seven_point(capsys):
    code, out, _ = run(capsys, "validate", "--profile", "seven_point")
    assert code == 0 and "seven_point [1, 7]" in out


def test_score_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "score", "--input", str(tmp_path / "none.csv"), "--output", str(tmp_path / "o.json"))
    assert code == 2
    assert "no such file" in err


def test_score_json_and_csv(capsys, tmp_path):
    src = tmp_path / "in.csv"
    src.write_text(HEADER + "\nr1," + ",".join("5" * 14) + "\nr2," + ",".join(["9"] + ["3"] * 13) + "\n")
    out = tmp_path / "scores.json"
    code, _, err = run(capsys, "score", "--input", str(src), "--output", str(out))
    assert code == 0
    assert "value 9 out of range" in err
    doc = json.loads(out.read_text())
    assert doc["rows"][0]["scores"]["overall_success"] == 5.0
    assert doc["rejected"][0]["row"] == 3
    meta = json.loads((tmp_path / "scores.json.meta.json").read_text())
    assert meta["rows_scored"] == 1 and meta["rows_rejected"] == 1
    code, _, _ = run(capsys, "score", "--input", str(src), "--output", str(tmp_path / "s.csv"), "--format", "csv")
    assert code == 0
    assert (tmp_path / "s.csv").read_text().splitlines()[1].startswith("r1,ok,5.000000")
    code, _, err = run(capsys, "score", "--input", str(src), "--output", str(out), "--strict")
    assert code == 2 and "row 3" in err


def test_explain_neutral(capsys):
    code, out, _ = run(capsys, "explain", "--response", ",".join("3" * 14))
    assert code == 0
    assert "overall_success: 3.000000" in out
    assert "divergence: +0.000000" in out or "divergence: -0.000000" in out
    assert any(line.strip().startswith("1 ") and "IS neutral" in line and "THEN overall_success IS medium" in line
               for line in out.splitlines())


def test_explain_bad_response(capsys):
    code, _, err = run(capsys, "explain", "--response", "3,3,3")
    assert code == 2 and "expected 14" in err
    code, _, _ = run(capsys, "explain", "--response", ",".join(["", *"3" * 13]), "--impute-neutral")
    assert code == 0


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["score"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_config_error(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scale": "ten_point"}))
    code, _, err = run(capsys, "validate", "--config", str(cfg))
    assert code == 3 and "unknown scale" in err


def test_rules_generate_and_check(capsys, tmp_path):
    code, out, _ = run(capsys, "rules", "generate", "--stage", "overall_success")
    assert code == 0 and len(out.splitlines()) == 27
    code, out, _ = run(capsys, "rules", "generate", "--out", str(tmp_path))
    assert code == 0 and len(list(tmp_path.glob("*.rules"))) == 4
    code, out, _ = run(capsys, "rules", "check", "--stage", "overall_success", str(tmp_path / "overall_success.rules"))
    assert code == 0 and "27 rules, coverage 27/27" in out
    bad = tmp_path / "bad.rules"
    bad.write_text("IF project_impact_success IS grand THEN overall_success IS high\n")
    code, _, err = run(capsys, "rules", "check", "--stage", "overall_success", str(bad))
    assert code == 3 and "bad.rules:1:" in err
    code, _, err = run(capsys, "rules", "generate", "--stage", "nope")
    assert code == 1


def test_plot_data(capsys, tmp_path):
    code, out, _ = run(capsys, "plot-data", "--out", str(tmp_path))
    assert code == 0 and "wrote 22 files" in out


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "fuzzysuccess", "--version"], capture_output=True, text=True)
    assert done.returncode == 0 and "fuzzysuccess" in done.stdout
