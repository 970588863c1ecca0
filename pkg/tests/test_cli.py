import json
import subprocess
import sys
import threading
import time

import pytest

import burstregion.oracle as oracle

from burstregion.bench import BenchReport
from burstregion.cli import main
from burstregion.stream import read_results

QARGS = ["--width", "1", "--height", "1", "--window", "10"]


@pytest.fixture
def stream(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("t,x,y,w\n0,1,1,1\n1,1.2,1.1,2\n2,5,5,1\n30,0,0,1\n")
    return p


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_per_event_lines(capsys, stream):
    code, out, _ = _run(capsys, stream, *QARGS, "--algo", "ccs")
    assert code == 0
    lines = read_results(out)
    # 4 New, 3 Grown and 3 Expired events are due by t=30
    assert len(lines) == 10
    assert lines[1]["regions"][0]["score"] == 0.3 and lines[1]["algo"] == "ccs"


def test_topk_and_interval(capsys, stream):
    code, out, _ = _run(capsys, stream, *QARGS, "--algo", "kccs", "--k", "3", "--emit", "interval:10")
    assert code == 0
    lines = read_results(out)
    assert [d["t"] for d in lines] == [0, 10, 20, 30]  # the event at t=0 falls on tick 0
    assert all(len(d["regions"]) == 3 for d in lines)
    assert lines[0]["regions"][2]["placed"] is False


def test_output_file_and_area(tmp_path, stream):
    out = tmp_path / "r.jsonl"
    assert main([str(stream), *QARGS, "--algo", "mgaps", "--area", "0,0,4,4", "-o", str(out)]) == 0
    for d in read_results(out.read_text()):
        for r in d["regions"]:
            if r.get("placed", True):
                assert 0 <= r["x_min"] and r["x_max"] <= 4


def test_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO('{"t":0,"x":1,"y":1,"w":3}\n'))
    code, out, _ = _run(capsys, "-", *QARGS, "--algo", "gaps")
    assert code == 0 and read_results(out)[0]["regions"][0]["score"] == 0.3


@pytest.mark.parametrize("text", ["0,1,1,1\n1,2,2\n", "5,1,1,1\n4,1,1,1\n"])
def test_bad_input_exit_2(tmp_path, capsys, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    code, _, err = _run(capsys, p, *QARGS)
    assert code == 2 and "error" in err


@pytest.mark.parametrize("extra", [
    ["--algo", "fast"], ["--emit", "sometimes"], ["--area", "1,2,3"], ["--alpha", "1.5"],
])
def test_bad_flags_exit_2(capsys, stream, extra):
    assert _run(capsys, stream, *QARGS, *extra)[0] == 2


def test_missing_query_and_file(capsys, stream, tmp_path):
    assert _run(capsys, stream, "--width", "1")[0] == 2
    assert _run(capsys, tmp_path / "nope.csv", *QARGS)[0] == 2


def test_oracle_guard_exit_3(capsys, monkeypatch):
    # a small cap exercises the same path without a slow brute-force run
    monkeypatch.setattr(oracle, "MAX_OBJECTS", 50)
    gen = json.dumps({"n": 80, "rate": 3.6e7, "seed": 1})
    code, _, err = _run(capsys, "--gen", gen, *QARGS, "--algo", "oracle")
    assert code == 3 and "error" in err


def test_gen_only_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    gen = json.dumps({"n": 300, "seed": 9})
    assert main(["--gen", gen, "--gen-only", "-o", str(a)]) == 0
    assert main(["--gen", gen, "--gen-only", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes() and a.read_text().count("\n") == 300
    assert main(["--gen", gen, "--seed", "10", "--gen-only", "-o", str(b)]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_gen_config_file(tmp_path, capsys):
    cfg = tmp_path / "g.json"
    cfg.write_text(json.dumps({"n": 50, "seed": 1}))
    code, out, _ = _run(capsys, "--gen", cfg, "--gen-only")
    assert code == 0 and out.count("\n") == 50
    assert _run(capsys, "--gen-only")[0] == 2


def test_bench_report(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    code, out, _ = _run(capsys, "--gen", json.dumps({"n": 400, "seed": 2}), "--width", "2", "--height", "2",
                        "--window", "60", "--bench", "--algo", "ccs,gaps", "--report", rep)
    assert code == 0 and "gaps" in out
    r = BenchReport.from_json(rep.read_text())
    assert [a.algo for a in r.algos] == ["ccs", "gaps"]
    assert _run(capsys, "--gen", "default", *QARGS, "--bench", "--algo", "ccs,slow")[0] == 2


def test_follow_reads_appended_lines(tmp_path, capsys):
    p = tmp_path / "live.csv"
    p.write_text("0,1,1,1\n")

    def writer():
        time.sleep(0.3)
        with open(p, "a") as fh:
            fh.write("1,1.1,1.1,2\n")
            fh.flush()

    th = threading.Thread(target=writer)
    th.start()
    code, out, _ = _run(capsys, p, *QARGS, "--follow", "--idle-timeout", "1.0")
    th.join()
    assert code == 0
    assert [d["regions"][0]["score"] for d in read_results(out)] == [0.1, 0.3]
    assert _run(capsys, "-", *QARGS, "--follow")[0] == 2


def test_module_entry_point(stream):
    proc = subprocess.run([sys.executable, "-m", "burstregion", str(stream), *QARGS, "--algo", "naive"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and len(proc.stdout.splitlines()) == 10
    bad = subprocess.run([sys.executable, "-m", "burstregion", "--width", "x"], capture_output=True, text=True)
    assert bad.returncode == 2
