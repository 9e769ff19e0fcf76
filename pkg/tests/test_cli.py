import json
import subprocess
import sys
from pathlib import Path

import pytest

from maxrep.runner import cli

SMALL = "[sampling]\nlemma_samples = 8\nattainment_words = 2\nword_count = 6\nk_max = 3\n"


def _run(capsys, *argv):
    code = cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _out_dir(stdout: str) -> Path:
    lines = [l for l in stdout.splitlines() if l.startswith("output ")]
    assert len(lines) == 1, stdout
    return Path(lines[0][len("output "):])


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL)
    return str(p)


def test_toledo(capsys, tmp_path):
    code, out, _ = _run(capsys, "toledo", "--out", str(tmp_path))
    assert code == 0
    assert "toledo 4" in out and "milnor_wood_bound 4" in out and "maximal True" in out
    run = json.loads((_out_dir(out) / "run.json").read_text())
    assert run["command"] == "toledo" and run["status"] == "pass"
    assert set(run["outputs"]) == {"toledo.json"}


def test_verify_writes_report(capsys, tmp_path, small_config):
    code, out, _ = _run(capsys, "verify", "--config", small_config, "--out", str(tmp_path))
    assert code == 0, out
    report = json.loads((_out_dir(out) / "lemma_suite.json").read_text())
    assert report["pass"] and report["checks_passed"] == 5


def test_orbit_csv(capsys, tmp_path, small_config):
    code, out, _ = _run(capsys, "orbit", "--config", small_config, "--twist", "a1", "--out", str(tmp_path))
    assert code == 0
    lines = (_out_dir(out) / "orbit_probe.csv").read_text().splitlines()
    assert lines[0].startswith("k,sum,") and len(lines) == 5


def test_trlen_words(capsys, tmp_path):
    code, out, _ = _run(capsys, "trlen", "--word", "a1", "--word", "a1,b1", "--out", str(tmp_path))
    assert code == 0
    rows = (_out_dir(out) / "trlen.csv").read_text().splitlines()
    assert len(rows) == 3


def test_causal(capsys, tmp_path):
    code, out, _ = _run(capsys, "causal", "--count", "10", "--n", "2", "--out", str(tmp_path))
    assert code == 0 and "d_y: 10/10" in out and "d_proof: 10/10" in out


def test_info_has_no_output_dir(capsys, tmp_path):
    code, out, _ = _run(capsys, "info", "--out", str(tmp_path / "none"))
    assert code == 0 and "output " not in out
    assert not (tmp_path / "none").exists()


def test_runs_never_overwrite(capsys, tmp_path):
    dirs = set()
    for _ in range(2):
        code, out, _ = _run(capsys, "toledo", "--out", str(tmp_path))
        assert code == 0
        dirs.add(_out_dir(out))
    assert len(dirs) == 2


@pytest.mark.parametrize("argv", [
    ["toledo", "--rep", "reducible"],
    ["toledo", "--rep", "file:/nonexistent/rep.table"],
    ["toledo", "--genus", "3"],
    ["toledo", "--n", "0"],
    ["toledo", "--seed", "-1"],
    ["orbit", "--twist", "zz"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, tmp_path, argv):
    code, _, _ = _run(capsys, *argv, "--out", str(tmp_path))
    assert code == 2


def test_bad_config_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[sampling]\nnot_a_key = 1\n")
    code, _, err = _run(capsys, "toledo", "--config", str(bad), "--json-errors", "--out", str(tmp_path))
    assert code == 2
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["exit_code"] == 2 and payload["message"]


def test_computational_failure_exit_1(capsys, tmp_path):
    # the degree-7 irreducible representation is beyond the Toledo integrator
    code, out, err = _run(capsys, "toledo", "--rep", "irreducible", "--n", "4", "--json-errors",
                          "--out", str(tmp_path))
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["exit_code"] == 1


def test_seed_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("MAXREP_SEED", "17")
    code, out, _ = _run(capsys, "toledo", "--out", str(tmp_path))
    assert json.loads((_out_dir(out) / "run.json").read_text())["seed"] == 17
    code, out, _ = _run(capsys, "toledo", "--seed", "5", "--out", str(tmp_path))
    assert json.loads((_out_dir(out) / "run.json").read_text())["seed"] == 5


@pytest.mark.parametrize("command", [["qi", "--budget", "6"], ["orbit", "--kmax", "3"]])
def test_outputs_independent_of_workers(capsys, tmp_path, command):
    sums = []
    for workers in ("1", "1", "8"):
        code, out, _ = _run(capsys, *command, "--workers", workers, "--out", str(tmp_path))
        assert code == 0
        sums.append(json.loads((_out_dir(out) / "run.json").read_text())["outputs"])
    assert sums[0] == sums[1] == sums[2]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "maxrep", "toledo", "--rep", "irreducible",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and "toledo 4" in proc.stdout
