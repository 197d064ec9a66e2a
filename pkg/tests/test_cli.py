import json
import subprocess
import sys

import pytest

from qcherenkov import __version__
from qcherenkov.cli import EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK, main

GOOD = """
[electron]
beta = 0.7
sigma_x_nm = 10
[photon]
omega_ev = 3
theta_deg = 20
[medium]
n = 1.5
[sweep]
axis = theta
start = 10
stop = 30
count = 3
"""


def write(tmp_path, text, name="s.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_timescales_csv(tmp_path, capsysbinary):
    assert main(["timescales", "--config", write(tmp_path, GOOD)]) == EXIT_OK
    out = capsysbinary.readouterr().out.decode()
    data = [line for line in out.splitlines() if not line.startswith("#")]
    assert data[0].startswith("series[text],index[-],theta[deg]")
    assert len(data) == 4


def test_json_to_file(tmp_path):
    out = tmp_path / "o.json"
    assert main(["timescales", "--config", write(tmp_path, GOOD), "--format", "json", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["provenance"]["command"] == "timescales"
    assert len(doc["columns"][0]["values"]) == 3


def test_invalid_config_exit_code(tmp_path, capsys):
    path = write(tmp_path, GOOD + "[series.bad]\nelectron.gamma = 2\n")
    assert main(["timescales", "--config", path]) == EXIT_INVALID
    assert "electron.gamma" in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "missing.ini")]) == EXIT_INVALID
    assert main(["validate", "--config", write(tmp_path, "not an ini file")]) == EXIT_INVALID


def test_validate_command(tmp_path, capsys):
    assert main(["validate", "--config", write(tmp_path, GOOD)]) == EXIT_OK
    assert "default: ok (3 points)" in capsys.readouterr().out


def test_not_converged_exit_code(tmp_path, capsysbinary):
    # a tolerance far below double precision cannot be met
    text = GOOD.replace("axis = theta", "axis = none").replace("theta_deg = 20", "theta_deg = 17")
    text = text.replace("sigma_x_nm = 10", "sigma_x_nm = 10\np_perp = 1e-5") + "[wigner]\nmode = samples\n"
    assert main(["wigner", "--config", write(tmp_path, text), "--tol", "1e-30"]) == EXIT_NOT_CONVERGED
    out = capsysbinary.readouterr().out.decode()
    assert "not_converged" in out


def test_preset_default_config(capsysbinary):
    assert main(["fig5", "--jobs", "1"]) == EXIT_OK
    assert b"beta_0_9999" in capsysbinary.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qcherenkov", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == __version__


def test_missing_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
