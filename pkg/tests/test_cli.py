import json
import subprocess
import sys

import pytest

from k3lab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, emit_report, main
from importlib import resources


def test_verify_fan_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "--suite", "fan", "--json", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["suite"] == "fan" and data["checks"]
    assert all(c["status"] == "pass" for c in data["checks"])
    assert "checks, 0 failed" in capsys.readouterr().out


def test_reports_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["verify", "--suite", "discriminant", "--seed", "3", "--json", str(p)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors(tmp_path, capsys, monkeypatch):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nonsense"])
    assert exc.value.code == EXIT_USAGE
    assert main(["verify", "--suite", "fan", "--json", str(tmp_path / "no" / "dir.json")]) == EXIT_USAGE
    assert main(["verify", "--suite", "fan", "--registry", str(tmp_path / "missing.json")]) == EXIT_USAGE
    monkeypatch.setenv("K3LAB_MAX_DEG", "many")
    assert main(["verify", "--suite", "periods"]) == EXIT_USAGE
    assert "K3LAB_MAX_DEG" in capsys.readouterr().err


def test_corrupted_registry_fails(tmp_path):
    raw = json.loads(resources.files("k3lab").joinpath("data/examples.json").read_text("utf-8"))
    terms = raw["cases"]["A1"]["discriminant"]["terms"]
    terms[0]["coef"] = str(int(terms[0]["coef"]) + 1)
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(raw))
    out = tmp_path / "r.json"
    code = main(["verify", "--suite", "discriminant", "--case", "A1", "--registry", str(p), "--json", str(out)])
    assert code == EXIT_FAIL
    failed = {c["check_id"] for c in json.loads(out.read_text())["checks"] if c["status"] == "fail"}
    assert "A1.discriminant.reduced_form" in failed


def test_empty_report(tmp_path):
    p = tmp_path / "e.json"
    emit_report([], "json", p)
    data = json.loads(p.read_text())
    assert data["checks"] == []
    assert emit_report([], "text", tmp_path / "e.txt").endswith("0 checks, 0 failed\n")


def test_fan_command(tmp_path, capsys):
    p = tmp_path / "pts.json"
    p.write_text(json.dumps({"dim": 2, "points": [[0, 0], [1, 0], [0, 1], [-1, -1]]}))
    assert main(["fan", str(p)]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert len(data["triangulations"]) == 2


def test_fan_parse_errors(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2,\n "points": [\n  [0, 0],\n  [1, 0]\n  [0, 1]]}')
    assert main(["fan", str(p)]) == EXIT_USAGE
    assert "line 5" in capsys.readouterr().err
    p.write_text('{"dim": 2,\n "points": [\n  [0, 0],\n  [1, 0],\n  [1, 0]\n ]}')
    assert main(["fan", str(p)]) == EXIT_USAGE
    assert "line 5" in capsys.readouterr().err


def test_discriminant_json(capsys):
    assert main(["discriminant", "A1", "--samples", "5", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["reduced"]["variables"] == ["lambda", "mu"]
    assert main(["discriminant", "A1", "--samples", "0"]) == EXIT_USAGE


def test_periods_and_monodromy(capsys, monkeypatch):
    monkeypatch.setenv("K3LAB_MAX_DEG", "4")
    assert main(["periods", "--case", "A1", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["max_deg"] == 4 and data["series"]["eta1"]["(1,0)"] == "-6"
    assert main(["monodromy", "A1", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["tensor_actions"]["1,1"]["nilpotency_index"] == 3


def test_modular_without_ode(capsys):
    assert main(["modular", "--json"]) == EXIT_OK
    ids = [c["check_id"] for c in json.loads(capsys.readouterr().out)["checks"]]
    assert not any(".ode." in i for i in ids)


def test_console_entry():
    res = subprocess.run([sys.executable, "-m", "k3lab.cli", "verify", "--suite", "lattice", "--case", "A0"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0, res.stderr
    assert "0 failed" in res.stdout
