import csv
import io
import json

import numpy as np
import pytest

from moafft import cli
from moafft.errors import DeadlockError
from moafft.fftseq import naive_dft, read_signal, write_signal
from moafft.runner import Entry


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_seq_check_passes(capsys):
    code, out, _ = run(capsys, "run", "--mode", "seq", "--variant", "inplace", "--t", "10", "--check")
    report = json.loads(out)
    assert code == 0
    assert report["correctness"]["pass"] is True
    assert report["correctness"]["max_rel_error"] <= 1e-9
    assert report["request"]["n"] == 1024
    assert "output" not in report


def test_partitioned_message_count(capsys):
    code, out, _ = run(capsys, "run", "--mode", "dist", "--template", "partitioned", "--t", "8", "--m", "4",
                       "--check")
    report = json.loads(out)
    assert code == 0
    assert report["trace"]["messages"] == 4 * 3


def test_oracle_impulse(tmp_path, capsys):
    path = tmp_path / "impulse.sig"
    write_signal(path, np.array([1, 0]))
    code, out, _ = run(capsys, "run", "--mode", "oracle", "--input", str(path))
    assert code == 0
    assert json.loads(out)["output"] == [[1.0, 0.0], [1.0, 0.0]]


def test_breakpoint_error_names_requirement(capsys):
    code, _, err = run(capsys, "run", "--mode", "plan", "--plan", "combined", "--t", "6", "--m", "4",
                       "--breakpoint", "6")
    assert code == 2
    assert "Requirement 1" in err


@pytest.mark.parametrize("argv", [
    ["run", "--mode", "seq", "--variant", "nope", "--t", "4"],
    ["run", "--mode", "seq", "--n", "12"],
    ["run", "--mode", "dist", "--t", "4", "--m", "8"],
])
def test_bad_requests_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_csv_run_output(capsys):
    code, out, _ = run(capsys, "run", "--mode", "shm", "--template", "private-partitioned", "--t", "7", "--m", "2",
                       "--check", "--output", "csv", "--serial")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1
    assert rows[0]["correctness.pass"] == "True"
    assert rows[0]["trace.messages"] == "0"


def test_same_seed_same_report(capsys):
    argv = ["run", "--mode", "dist", "--template", "full-local-copy", "--t", "7", "--m", "4", "--check",
            "--seed", "17"]
    a = json.loads(run(capsys, *argv)[1])
    b = json.loads(run(capsys, *argv)[1])
    assert a["correctness"] == b["correctness"]
    assert a["trace"] == b["trace"]


def test_write_output_round_trip(tmp_path, capsys):
    src, dst = tmp_path / "in.sig", tmp_path / "out.sig"
    x = np.array([0, 1, 2, 3], dtype=complex)
    write_signal(src, x)
    code, _, _ = run(capsys, "run", "--mode", "plan", "--plan", "xblock", "--input", str(src),
                     "--write-output", str(dst), "--sign", "+1")
    assert code == 0
    assert np.allclose(read_signal(dst), naive_dft(x, 1), atol=1e-14)


def test_deadlock_exit_code(monkeypatch, capsys):
    def stuck(*a, **k):
        raise DeadlockError({0: 1, 1: 0})

    monkeypatch.setattr(cli, "compute", stuck)
    code, _, err = run(capsys, "run", "--mode", "dist", "--t", "4", "--m", "2")
    assert code == 3
    assert "processor 0 waits on 1" in err


def test_failed_check_exit_1(monkeypatch, capsys):
    monkeypatch.setattr(cli, "compute", lambda mode, ident, x, **k: (np.zeros(len(x), complex), None))
    code, out, _ = run(capsys, "run", "--mode", "seq", "--t", "3", "--check")
    assert code == 1
    assert json.loads(out)["correctness"]["pass"] is False


# --- sweep ---------------------------------------------------------------------

def test_parse_sizes():
    assert cli.parse_sizes("3-6") == [3, 4, 5, 6]
    assert cli.parse_sizes("3,5,8") == [3, 5, 8]
    assert cli.parse_sizes("") == []


def test_sweep_table_shape(capsys):
    code, out, err = run(capsys, "sweep", "--sizes", "3-6", "--entries", "seq:inplace,plan:combined",
                         "--m", "1,4", "--repeat", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [int(r["t"]) for r in rows] == [3, 4, 5, 6]
    assert rows[0]["plan:combined@m=4 time_s"] == ""  # 8 points cannot be split over 4 processors
    assert rows[-1]["plan:combined@m=4 ok"] == "True"
    assert all(r["seq:inplace ok"] == "True" for r in rows)
    assert "# doubling seq:inplace:" in err


def test_sweep_json_doubling(capsys):
    code, out, _ = run(capsys, "sweep", "--sizes", "4-6", "--entries", "shm:simple-shared", "--m", "2",
                       "--repeat", "1", "--output", "json")
    table = json.loads(out)
    assert code == 0
    assert [p["from_t"] for p in table["doubling"]["shm:simple-shared@m=2"]] == [4, 5]


def test_sweep_empty_sizes(capsys):
    code, out, _ = run(capsys, "sweep", "--sizes", "", "--entries", "seq:inplace")
    assert code == 0
    assert out.strip() == "t,n,seq:inplace time_s,seq:inplace ok"


def test_sweep_refuses_huge_sizes(capsys):
    assert run(capsys, "sweep", "--sizes", "21", "--max-t", "20")[0] == 2


def test_entry_parse():
    e = Entry.parse("dist:partitioned")
    assert e.parallel and str(e) == "dist:partitioned"
    assert not Entry.parse("seq:vector").parallel
