import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from negadep.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _frac(d):
    return F(int(d["num"]), int(d["den"]))


def test_example_shift(capsys):
    code, out, _ = _run(capsys, "example-shift")
    assert code == 0
    doc = json.loads(out)
    res = doc["result"]
    assert _frac(res["h_shift"]) == F(1, 450)
    assert _frac(res["vol2"]) == F(1, 625)
    assert res["verdict"] == "positive dependence index"
    assert doc["negadep_version"] and doc["config"]["subcommand"] == "example-shift"


def test_net_check(capsys):
    code, out, _ = _run(capsys, "net", "--b", "3", "--s", "3", "--m", "2", "--check")
    assert code == 0
    assert "(0,2,3)-net verified" in out


def test_net_file_round_trip(tmp_path, capsys):
    path = tmp_path / "net.txt"
    assert _run(capsys, "net", "--b", "3", "--s", "2", "--m", "2", "--out", str(path))[0] == 0
    code, out, _ = _run(capsys, "hbox", "--net", str(path), "--box", "[0,1)x[0,1)")
    assert code == 0
    row = json.loads(out)["result"]["boxes"][0]
    assert _frac(row["h_exact"]) == 1 and _frac(row["gap"]) == 0 and row["pass"] is True


def test_scrambled_net_file_still_a_net(tmp_path, capsys):
    path = tmp_path / "sc.txt"
    assert _run(capsys, "scramble", "--b", "3", "--s", "3", "--m", "2", "--seed", "4", "--out", str(path))[0] == 0
    code, out, _ = _run(capsys, "net", "--net", str(path), "--check")
    assert code == 0 and "verified" in out


def test_hbox_full_box(capsys):
    code, out, _ = _run(capsys, "hbox", "--b", "3", "--s", "2", "--m", "2", "--box", "[0,1)x[0,1)")
    assert code == 0
    row = json.loads(out)["result"]["boxes"][0]
    assert _frac(row["h_exact"]) == 1 and _frac(row["gap"]) == 0


def test_hbox_empirical(capsys):
    args = ("hbox", "--b", "3", "--s", "2", "--m", "2", "--box", "[1/9,5/9)x[0,2/3)", "--empirical", "--replicates", "200")
    code, out, _ = _run(capsys, *args)
    assert code == 0
    row = json.loads(out)["result"]["boxes"][0]
    assert row["h_emp"]["R"] == 200 and "h_exact" not in row


@pytest.mark.parametrize(
    "argv",
    [
        ["net", "--b", "4", "--s", "2", "--m", "2"],
        ["net", "--s", "2", "--m", "2"],
        ["hbox", "--b", "3", "--s", "2", "--m", "2", "--box", "[0,1)"],
        ["hbox", "--b", "3", "--s", "2", "--m", "2", "--box", "[0,1)x[0,1)", "--empirical", "--replicates", "1"],
        ["verify", "--lemma", "nonsense"],
        ["verify", "--grid", "bogus=1"],
        ["index", "--b", "3", "--s", "2", "--m", "2"],
        ["index", "--b", "3", "--s", "2", "--m", "2", "--family", "random:x"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert err.startswith("negadep:")


def test_missing_flags_are_named(capsys):
    _, _, err = _run(capsys, "net", "--s", "2")
    assert "--b" in err and "--m" in err


def test_shifted_index_positive_is_not_a_certified_failure(capsys, tmp_path):
    fam = tmp_path / "fam.txt"
    fam.write_text("# boxes\n[0,1/9)x[0,4/9)\n[0,1)x[0,1)\n")
    code, out, _ = _run(capsys, "index", "--b", "3", "--s", "2", "--m", "2", "--family", str(fam), "--randomizer", "shift")
    assert code == 0
    assert len(json.loads(out)["result"]["boxes"]) == 2


def test_index_csv_and_random_family(capsys):
    code, out, _ = _run(capsys, "index", "--b", "3", "--s", "2", "--m", "2", "--family", "random:20:3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 20
    assert set(rows[0]) == {"box", "h", "vol2", "gap"}
    assert all(F(r["gap"].split()[0]) <= 0 for r in rows)


def test_diagnose_csv(capsys):
    code, out, _ = _run(capsys, "diagnose", "--b", "2", "--s", "2", "--m", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["bound_ok"] == "True" for r in rows)


def test_variance(capsys):
    code, out, _ = _run(capsys, "variance", "--b", "3", "--s", "3", "--m", "2", "--box", "[1/9,4/9)x[0,1/3)x[0,1)")
    assert code == 0
    assert json.loads(out)["result"]["boxes"][0]["beats_mc"] is True


def test_verify_quick_single_lemma(capsys):
    code, out, err = _run(capsys, "verify", "--lemma", "Q", "--grid", "quick")
    assert code == 0
    assert "Q: PASS" in err
    doc = json.loads(out)
    assert doc["result"]["passed"] is True
    assert doc["config"]["grid"] == "quick"


def test_reports_are_byte_identical(tmp_path, capsys):
    args = ["index", "--b", "3", "--s", "2", "--m", "2", "--family", "random:count=10,depth=3,seed=5", "--replicates", "50", "--seed", "3"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["config"]["seed"] == 3


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-c", "import sys; from negadep.cli import main; sys.argv = ['negadep', 'net', '--b', '2', '--s', '2', '--m', '3', '--check']; main()"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "(0,3,2)-net verified" in proc.stdout
