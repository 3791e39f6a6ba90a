import json
import subprocess
import sys

import pytest

from thetachars.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_characters_json(capsys):
    code, out, _ = run(capsys, "characters", "--model", "WG2", "--terms", "8")
    assert code == 0
    doc = json.loads(out)
    assert {"model", "label", "c", "c_tilde", "l", "k", "delta", "kappa", "characters"} <= set(doc)
    assert doc["c"] == "-8/5" and doc["l"] == 5 and doc["k"] == 4
    for row in doc["characters"]:
        assert len(row["coefficients"]) == 9
        assert all(int(x) >= 0 for x in row["coefficients"])


def test_characters_text_with_numeric(capsys):
    code, out, _ = run(capsys, "characters", "--model", "WG2", "--terms", "30", "--format", "text", "--numeric")
    assert code == 0
    assert out.startswith("WG2")
    residual = float(out.strip().splitlines()[-1].split(":")[-1])
    assert residual < 1e-8


def test_lie_command(capsys):
    code, out, _ = run(capsys, "lie", "--model", "WG2", "--terms", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["source"] == "composite:G2"
    assert doc["c"] == "-8/5"


def test_lie_w28_unsupported(capsys):
    code, _, err = run(capsys, "lie", "--model", "W28", "--terms", "5")
    assert code == 2
    assert "E7" in err


def test_dims(capsys):
    code, out, _ = run(capsys, "dims", "--model", "W24")
    assert code == 0
    row = json.loads(out)["dims"][0]
    assert row["rank"] == row["table"] == 5


def test_verify_algebraic(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "algebraic", "--format", "text")
    assert code == 0
    assert "[FAIL]" not in out


@pytest.mark.parametrize("argv", [
    ["characters"],
    ["characters", "--model", "W99"],
    ["characters", "--model", "WG2", "--terms", "0"],
    ["characters", "--model", "WG2", "--threads", "0"],
    ["characters", "--model", "WG2", "--tau0", "0", "-1"],
    ["verify", "--suite", "nope"],
])
def test_bad_arguments_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(model="WG2", terms=-1)
    assert RunConfig(model=None).threads == 1


def test_threads_are_deterministic():
    outs = []
    for threads in ("1", "3"):
        p = subprocess.run([sys.executable, "-m", "thetachars", "characters", "--model", "W24", "--terms", "15",
                            "--threads", threads], capture_output=True, text=True, check=True)
        outs.append(p.stdout)
    assert outs[0] == outs[1]
