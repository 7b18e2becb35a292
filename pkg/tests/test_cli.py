import csv
import json
import subprocess
import sys

import pytest

from orientlab.cli import main
from orientlab.core import UpdateSequence, ie, iv


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def triangle(tmp_path):
    path = tmp_path / "tri.txt"
    UpdateSequence([iv(0), iv(1), iv(2), ie(0, 1), ie(1, 2), ie(0, 2)]).save(path)
    return path


def test_empty_sequence_gives_zero_metrics(tmp_path, capsys):
    path = tmp_path / "s.txt"
    path.write_text("")
    code, out, _ = run(capsys, "run", "--algo", "bf", "--delta", 4, "--seq", path)
    assert code == 0
    m = json.loads(out)
    assert all(m[k] == 0 for k in ("t", "f", "resets", "peak_outdeg", "rounds", "messages"))


def test_reruns_are_byte_identical(capsys):
    argv = ["run", "--algo", "antireset", "--delta", 10, "--alpha", 2,
            "--gen", "random:alpha=2,n=200,t=2000,delete_fraction=0.3", "--seed", 3]
    code, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert code == 0 and a == b
    assert json.loads(a)["peak_outdeg"] <= 11


def test_stream_metrics(tmp_path, triangle, capsys):
    stream = tmp_path / "m.jsonl"
    code, _, _ = run(capsys, "run", "--algo", "bf", "--delta", 2, "--seq", triangle,
                     "--stream-metrics", stream)
    lines = stream.read_text().splitlines()
    assert code == 0 and len(lines) == 6
    assert json.loads(lines[-1])["t"] == 3


@pytest.mark.parametrize("argv", [
    ["run", "--algo", "bf", "--delta", "4"],  # no source
    ["run", "--algo", "bf", "--delta", "4", "--gen", "random:n=10,t=10"],  # no seed
    ["run", "--algo", "bf", "--delta", "4", "--delta-prime", "3", "--gen", "random:n=9", "--seed", "1"],
    ["run", "--algo", "nope"],
    ["verify", "--checks", "colour", "--gen", "random:n=9", "--seed", "1"],
    ["bench"],
    ["gadget", "blowup", "--params", "delta=3"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_abort_exits_3_with_op_index(tmp_path, capsys):
    path = tmp_path / "k5.txt"
    UpdateSequence([iv(v) for v in range(5)] +
                   [ie(a, b) for a in range(5) for b in range(a + 1, 5)]).save(path)
    code, _, err = run(capsys, "run", "--algo", "bf", "--delta", 1, "--seq", path)
    assert code == 3
    assert "op #" in err


def test_bad_sequence_exits_3(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("iv 0\nie 0 1\n")
    code, _, err = run(capsys, "run", "--algo", "bf", "--delta", 2, "--seq", path)
    assert code == 3 and "op #1" in err


def test_single_forest_triangle_fails(triangle, capsys):
    code, out, _ = run(capsys, "verify", "--checks", "forests", "--forests", "single",
                       "--seq", triangle)
    assert code == 4
    assert "forests: FAIL" in out and "cycle" in out


def test_verify_passes_on_generated_prefix(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "arboricity,forests,matching,representation",
                       "--expect-alpha", 1, "--gen", "random:alpha=1,n=12,t=30", "--seed", 5)
    assert code == 0, out
    assert "arboricity: pass alpha=1" in out


def test_verify_minmaxoutdeg_after_bf(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "minmaxoutdeg", "--algo", "bf",
                       "--delta", 5, "--alpha", 2,
                       "--gen", "random:alpha=2,n=300,t=3000,delete_fraction=0.3", "--seed", 9)
    assert code == 0 and "minmaxoutdeg: pass" in out


def test_arboricity_too_large_is_skipped(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "arboricity",
                       "--gen", "random:alpha=2,n=100,t=300", "--seed", 1)
    assert code == 0 and "arboricity: skip" in out


def test_bench_scaling_rows(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "scaling-bf", "--scale", 0.02, "--out", out)
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and len(rows) == 7
    assert [int(r["n"]) for r in rows] == [2 ** k for k in range(10, 17)]
    plot = (tmp_path / "b.csv.plot.tsv").read_text().splitlines()
    assert plot[0] == "series\tx\ty" and len(plot) == 8


def test_gadget_then_sim(tmp_path, capsys):
    seq = tmp_path / "sat.txt"
    code, out, _ = run(capsys, "gadget", "saturated", "--params", "alpha=2,n=80,cap=7",
                       "--seed", 2, "--out", seq)
    assert code == 0 and json.loads(out)["ops"] > 80
    trace = tmp_path / "trace.jsonl"
    code, out, _ = run(capsys, "sim", "--engine", "matching-dist", "--seq", seq,
                       "--trace", trace, "--check-every", 50)
    assert code == 0
    assert json.loads(out)["messages"] == len(trace.read_text().splitlines())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "orientlab", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "bench" in res.stdout
