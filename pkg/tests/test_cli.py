import json
import subprocess
import sys

import pytest

from wbt import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def test_tabulate(capsys):
    code, out, err = run(["tabulate", "--hi", "10"], capsys)
    assert code == 0 and out["schema"] == 1
    assert out["rows"]["phi"] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert out["primes"] == 4 and out["squarefree"] == 7
    assert "tabulate" in err


def test_tabulate_dump(tmp_path, capsys):
    path = tmp_path / "t.wbt"
    code, out, _ = run(["tabulate", "--lo", "5", "--hi", "20", "--dump", str(path)], capsys)
    assert code == 0 and path.read_bytes()[:4] == b"WBT1"


def test_sieve_sums(capsys):
    code, out, _ = run(["sieve-sums", "--k", "2", "--z", "4"], capsys)
    assert code == 0 and (out["S"], out["H"]) == (1.5, 3.0)


def test_constants_all(capsys):
    code, out, _ = run(["constants", "--all"], capsys)
    assert code == 0 and out["verdict"] is True
    for r in out["reports"]:
        assert {"name", "computed", "paper_bound", "slack", "verdict"} <= r.keys()


def test_verify_q_and_h(capsys):
    assert run(["verify-q", "--z-max", "20000"], capsys)[0] == 0
    code, out, _ = run(["verify-h", "--z-max", "20000"], capsys)
    assert code == 0
    r = out["reports"][0]
    assert {"label", "lhs", "rhs", "margin", "slack", "holds", "params"} <= r.keys()


def test_verify_s_quick(capsys):
    code, out, _ = run(["verify-s", "--samples", "1000", "100000"], capsys)
    assert code == 0 and [r["z"] for r in out["residuals"]] == [1000, 100000]


def test_theorem5(capsys):
    code, out, _ = run(["theorem5", "--shape", "hat", "--x", "0", "--y", "1000"], capsys)
    assert code == 0
    (r,) = out["reports"]
    assert r["label"] == "T5" and r["holds"] is True and r["lhs"] < r["rhs"]


def test_theorem4_custom_weights(tmp_path, capsys):
    w = tmp_path / "w.txt"
    w.write_text("1000 0\n1500 2\n3000 1\n")
    code, out, _ = run(["theorem4", "--weights", str(w), "--k", "3", "--l", "2"], capsys)
    assert code == 0
    assert [r["label"] for r in out["reports"]] == ["T4_with_correction", "T4_factor3"]


def test_theorem4_inapplicable_is_not_a_failure(capsys):
    code, out, _ = run(["theorem4", "--shape", "hat", "--y", "20", "--k", "5"], capsys)
    assert code == 0 and all(r["holds"] is None for r in out["reports"])


def test_corpus_file_and_random(tmp_path, capsys):
    f = tmp_path / "c.txt"
    f.write_text("hat 3 1 1000000 10000 2.5 64\nconstant 1 1 0 1000 1.0 8\n")
    code, out, _ = run(["corpus", "--file", str(f), "--random", "3", "--seed", "5"], capsys)
    assert code == 0 and out["summary"]["cases"] == 5


def test_verify_test_out_file(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code = cli.main(["verify-test", "--z-max", "5000", "--out", str(out_path)])
    assert code == 0
    assert capsys.readouterr().out == ""
    rep = json.loads(out_path.read_text())
    assert rep["verdict"] is True and rep["schema"] == 1


def test_verify_test_resume(tmp_path, capsys):
    ckpt = tmp_path / "ck.jsonl"
    args = ["verify-test", "--z-max", "30000", "--checkpoint-stride", "10000"]
    code, first, _ = run(args + ["--checkpoint-file", str(ckpt)], capsys)
    assert code == 0
    lines = ckpt.read_text().splitlines()
    ckpt.write_text(lines[0] + "\n")
    code, resumed, _ = run(args + ["--resume", str(ckpt)], capsys)
    assert code == 0 and resumed == first


def test_exit_code_on_false_verdict(monkeypatch, capsys):
    import wbt.arith_tab as at

    monkeypatch.setattr(at, "Q_ERROR_CONSTANT", 0.3)
    code, out, err = run(["verify-q", "--z-max", "1000"], capsys)
    assert code == 1 and out["verdict"] is False and "FAIL" in err


def test_exit_code_on_resource_error(capsys):
    code, out, err = run(["tabulate", "--hi", "1e9"], capsys)
    assert code == 3 and out is None and "resource" in err


def test_exit_code_on_bad_arguments(capsys):
    assert run(["theorem4", "--k", "4", "--l", "2"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify-q", "--no-such-flag"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["tabulate", "--hi", "2.5"])
    assert exc.value.code == 2


def test_unwritable_out_path(tmp_path, capsys):
    code = cli.main(["sieve-sums", "--z", "4", "--out", str(tmp_path / "missing" / "r.json")])
    assert code == 3


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wbt.cli", "sieve-sums", "--z", "4"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["S"] == 2.5
    proc = subprocess.run([sys.executable, "-m", "wbt.cli", "bogus"], capture_output=True)
    assert proc.returncode == 2
