"""Command line: formats, provenance and exit codes."""
import json
import subprocess
import sys

import pytest

from pentlab.cli import EXIT_INPUT, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_lengths_json(capsys):
    code, out, _ = run(capsys, "lengths")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["lengths"]["two_g"] == pytest.approx(3.1838, abs=5e-4)
    assert set(doc["provenance"]) == {"seed", "config", "code_version", "cache_version"}


def test_lengths_csv_has_provenance_header(capsys):
    _, out, _ = run(capsys, "lengths", "--format", "csv")
    lines = out.splitlines()
    assert lines[0].startswith("# provenance: ")
    assert lines[1] == "name,value"


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["quotient", "--trials", "many"])
    assert exc.value.code == EXIT_USAGE
    code, _, err = run(capsys, "pieces", "--workers", "0")
    assert code == EXIT_USAGE


def test_input_errors(capsys):
    code, _, err = run(capsys, "render", "--radius", "1", "--geodesic", "0x2")
    assert code == EXIT_INPUT and "bad input" in err
    code, _, _ = run(capsys, "growth", "--window", "3", "2")
    assert code == EXIT_INPUT
    code, _, _ = run(capsys, "quotient", "--c", "-1")
    assert code == EXIT_INPUT


def test_budget_is_unknown(capsys):
    code, _, err = run(capsys, "growth", "--metric", "hyp", "--n-max", "30")
    assert code == EXIT_UNKNOWN and "budget" in err


def test_growth_csv(capsys, tmp_path):
    out = tmp_path / "g.csv"
    code, _, _ = run(capsys, "growth", "--n-max", "3", "--format", "csv", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == EXIT_OK and lines[1] == "subject,metric,n,count" and lines[-1] == "group,cube,3,61"


def test_quotient_jsonl(capsys):
    code, out, _ = run(capsys, "quotient", "--ell", "6", "--c", "0.2", "--trials", "3", "--seed", "5")
    lines = [json.loads(x) for x in out.splitlines()]
    assert "provenance" in lines[0] and lines[0]["provenance"]["seed"] == 5
    assert [r["trial"] for r in lines[1:]] == [0, 1, 2]


def test_render_svg(capsys):
    code, out, _ = run(capsys, "render", "--radius", "1", "--seed", "3")
    assert out.startswith("<svg") and 'key="seed">3<' in out


def test_cache_inspect(capsys, tmp_path):
    code, out, _ = run(capsys, "cache", "build", "--cap", "4", "--cache-dir", str(tmp_path))
    assert json.loads(out)["classes"] > 0
    code, out, _ = run(capsys, "cache", "inspect", "--cache-dir", str(tmp_path))
    assert code == EXIT_OK and json.loads(out)["entries"][0]["ok"]


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "pentlab.cli", "lengths", "--format", "table"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "lambda" in res.stdout
