"""End-to-end command line behavior, exit codes, and manifests."""

import hashlib
import json

import pytest

from hyperperc import TallyTable, solve_ph
from hyperperc.cli import main
from hyperperc.percolation import TRIAL_CSV_HEADER

M4_N2_CSV = """\
edges,vertices,boundary,count
0,1,4,1
1,2,6,4
2,3,8,18
"""


def test_animals_golden_stdout(capsys):
    assert main(["animals", "--m", "4", "--max-edges", "2"]) == 0
    assert capsys.readouterr().out == M4_N2_CSV


def test_animals_file_output_and_manifest(tmp_path, capsys):
    out = tmp_path / "tally.csv"
    mf = tmp_path / "run.json"
    code = main(["animals", "--m", "4", "--max-edges", "2",
                 "--out", str(out), "--manifest", str(mf)])
    assert code == 0
    assert capsys.readouterr().out == ""
    text = out.read_text()
    assert text == M4_N2_CSV
    manifest = json.loads(mf.read_text())
    assert manifest["command"][0] == "hyperperc"
    assert manifest["command"][1] == "animals"
    assert manifest["inputs"] == {}
    digest = "sha256:" + hashlib.sha256(text.encode()).hexdigest()
    assert manifest["outputs"] == {str(out): digest}
    assert manifest["wall_time_s"] >= 0.0
    assert "version" in manifest


def test_bound_json_structure(capsys):
    assert main(["bound", "--m", "5", "--max-edges", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert sorted(payload) == ["bracket", "m", "n", "p_h", "residual",
                               "sign_changes", "tally_digest", "tolerance"]
    assert payload["m"] == 5 and payload["n"] == 2
    assert 0.3 < payload["p_h"] < 0.4
    assert payload["tolerance"] == 1e-9
    assert payload["sign_changes"] == 1
    lo, hi = payload["bracket"]
    assert lo < payload["p_h"] <= hi


def test_bound_reads_tally_file(tmp_path, capsys):
    tally_path = tmp_path / "m5n2.csv"
    assert main(["animals", "--m", "5", "--max-edges", "2",
                 "--out", str(tally_path)]) == 0
    mf = tmp_path / "run.json"
    code = main(["bound", "--m", "5", "--max-edges", "2",
                 "--tally", str(tally_path), "--manifest", str(mf)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    tally = TallyTable.from_csv(tally_path.read_text())
    assert payload["p_h"] == solve_ph(tally).p_h
    assert payload["tally_digest"] == tally.digest()
    manifest = json.loads(mf.read_text())
    digest = "sha256:" + hashlib.sha256(tally_path.read_bytes()).hexdigest()
    assert manifest["inputs"] == {str(tally_path): digest}


def test_bound_restricts_wider_tally(tmp_path, capsys):
    tally_path = tmp_path / "m5n3.csv"
    assert main(["animals", "--m", "5", "--max-edges", "3",
                 "--out", str(tally_path)]) == 0
    capsys.readouterr()
    assert main(["bound", "--m", "5", "--max-edges", "1",
                 "--tally", str(tally_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 1


def test_bound_tally_mismatches_exit_usage(tmp_path, capsys):
    tally_path = tmp_path / "m5n2.csv"
    assert main(["animals", "--m", "5", "--max-edges", "2",
                 "--out", str(tally_path)]) == 0
    assert main(["bound", "--m", "6", "--max-edges", "2",
                 "--tally", str(tally_path)]) == 2
    assert main(["bound", "--m", "5", "--max-edges", "7",
                 "--tally", str(tally_path)]) == 2
    err = capsys.readouterr().err
    assert "m=5" in err and "stops at 2" in err


@pytest.mark.parametrize("argv", [
    ["animals", "--m", "3", "--max-edges", "2"],
    ["animals", "--m", "5", "--max-edges", "-1"],
    ["bound", "--m", "5", "--max-edges", "1", "--tol", "0"],
    ["bound", "--m", "5", "--max-edges", "1", "--tol", "0.01"],
    ["homology", "--torus", "2"],
    ["homology", "--torus", "3", "--trials", "0"],
    ["homology", "--torus", "3", "--p", "1.5"],
    ["percolate", "--torus", "3", "--p", "0.5", "--trials", "0", "--seed", "1"],
    ["percolate", "--torus", "3", "--p", "-0.1", "--trials", "5", "--seed", "1"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_resource_limit_exit_3(capsys):
    code = main(["animals", "--m", "5", "--max-edges", "8",
                 "--max-vertices", "1000"])
    assert code == 3
    assert "resource limit" in capsys.readouterr().err


def test_bracketing_exit_4(tmp_path, capsys):
    bad = TallyTable(m=5, max_edges=1, counts={(0, 1, 5): 1, (1, 2, 8): 50})
    tally_path = tmp_path / "bad.csv"
    tally_path.write_text(bad.to_csv())
    code = main(["bound", "--m", "5", "--max-edges", "1",
                 "--tally", str(tally_path)])
    assert code == 4
    assert "no sign change" in capsys.readouterr().err


def test_homology_explicit_config(capsys):
    n_edges = 2 * 3 * 3  # torus k=3
    assert main(["homology", "--torus", "3", "--config", "1" * n_edges]) == 0
    assert capsys.readouterr().out == "h1_formula=2,h1_direct=2\n"
    assert main(["homology", "--torus", "3", "--config", "0" * n_edges]) == 0
    assert capsys.readouterr().out == "h1_formula=0,h1_direct=0\n"


def test_homology_config_validation(capsys):
    assert main(["homology", "--torus", "3", "--config", "101"]) == 2
    assert main(["homology", "--torus", "3", "--config", "2" * 18]) == 2


def test_homology_random_mode_deterministic(capsys):
    argv = ["homology", "--torus", "4", "--p", "0.3",
            "--trials", "3", "--seed", "5"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    lines = first.strip().splitlines()
    assert lines[0] == TRIAL_CSV_HEADER
    assert len(lines) == 4
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_percolate_json(capsys):
    argv = ["percolate", "--torus", "3", "--p", "0.5",
            "--trials", "5", "--seed", "1"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    payload = json.loads(first)
    assert sorted(payload) == ["mean", "stderr", "trials"]
    assert payload["trials"] == 5
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_reproduce_certifies_bound(tmp_path, capsys):
    report = tmp_path / "report.txt"
    cert = tmp_path / "cert.json"
    mf = tmp_path / "run.json"
    code = main(["reproduce", "--out", str(report), "--json", str(cert),
                 "--manifest", str(mf)])
    assert code == 0
    text = report.read_text()
    assert "PASS: p_h(8) <= 0.299973" in text
    assert "animals=5838307" in text
    payload = json.loads(cert.read_text())
    assert payload["m"] == 5 and payload["n"] == 8
    assert payload["p_h"] <= 0.299973
    manifest = json.loads(mf.read_text())
    assert set(manifest["outputs"]) == {str(report), str(cert)}


def test_version_flag(capsys):
    from hyperperc import __version__
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out == __version__ + "\n"


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
