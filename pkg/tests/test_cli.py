import csv
import io

import pytest

from matchdec.cli import main
from matchdec.fileio import read_graph

REP_CHECKS = "4 5\n0 0\n0 1\n1 1\n1 2\n2 2\n2 3\n3 3\n3 4\n"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_then_decode(tmp_path, capsys):
    g = tmp_path / "rep.graph"
    assert run(capsys, "gen", "--code", "rep", "--L", "5", "--p", "0.2", "--out", str(g))[0] == 0
    assert read_graph(g).num_edges == 5
    s = tmp_path / "s.txt"
    s.write_text("0 1 0 1\n")
    code, out, _ = run(capsys, "decode", "--graph", str(g), "--syndrome", str(s), "--weight")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "0 0 1 1 0"
    assert lines[1].startswith("weight 2.77")


def test_decode_from_check_matrix_exact(tmp_path, capsys):
    h = tmp_path / "h.txt"
    h.write_text(REP_CHECKS)
    s = tmp_path / "s.txt"
    s.write_text("0 1 0 1 0\n")
    code, out, _ = run(capsys, "decode", "--check-matrix", str(h), "--syndrome", str(s),
                       "--neighbours", "all")
    assert code == 0 and out.strip() == "0 0 1 1 0"


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "bench", "nope")[0] == 1
    assert run(capsys, "decode", "--graph", str(tmp_path / "missing"), "--syndrome", "x")[0] == 3
    assert run(capsys, "gen", "--code", "toric2d", "--L", "4", "--p", "0.7",
               "--out", str(tmp_path / "g"))[0] == 1
    g = tmp_path / "t.graph"
    run(capsys, "gen", "--code", "toric2d", "--L", "3", "--p", "0.1", "--out", str(g))
    s = tmp_path / "odd.txt"
    s.write_text("1 0 0 0 0 0 0 0 0\n")
    code, _, err = run(capsys, "decode", "--graph", str(g), "--syndrome", str(s))
    assert code == 2 and "odd syndrome without boundary" in err
    s.write_text("1 0\n")
    assert run(capsys, "decode", "--graph", str(g), "--syndrome", str(s))[0] == 1
    bad = tmp_path / "bad.graph"
    bad.write_text("nodes 2 qubits 1\n0 1 0 -2 nan\n")
    assert run(capsys, "decode", "--graph", str(bad), "--syndrome", str(s))[0] == 3
    assert run(capsys, "bench", "logical", "--m", "0")[0] == 1


def test_bench_outputs_csv_to_stdout(capsys):
    code, out, _ = run(capsys, "bench", "approx", "--L", "6", "--m", "3", "defects",
                       "--trials", "30")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["m"] for r in rows] == ["3", "defects"]
    assert rows[1]["mismatches"] == "0"


@pytest.mark.parametrize("experiment, extra", [
    ("logical", ["--m", "12"]),
    ("threshold", ["--L", "4", "6", "--p", "0.05", "0.1"]),
    ("timing", ["--code", "toric3d", "--L", "3", "--p", "0.03", "--m", "8"]),
])
def test_bench_subcommands_write_files(tmp_path, capsys, experiment, extra):
    out = tmp_path / "r.jsonl"
    code, _, _ = run(capsys, "bench", experiment, *extra, "--trials", "20", "--out", str(out),
                     "--format", "json-lines")
    assert code == 0 and out.read_text().count("\n") >= 1


def test_mwpm_debug(tmp_path, capsys):
    g = tmp_path / "w.graph"
    g.write_text("nodes 4 qubits 0\n0 1 -1 1.0 nan\n2 3 -1 1.0 nan\n0 2 -1 0.5 nan\n"
                 "1 3 -1 0.5 nan\n")
    code, out, _ = run(capsys, "mwpm", "--graph", str(g))
    assert code == 0
    assert out.splitlines()[:2] == ["0 2", "1 3"] and "certificate ok" in out
    g.write_text("nodes 3 qubits 0\n0 1 -1 1.0 nan\n")
    assert run(capsys, "mwpm", "--graph", str(g))[0] == 2
