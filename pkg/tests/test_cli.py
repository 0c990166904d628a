import csv
import io
import json
import subprocess
import sys

import pytest

from calig.cli import CSV_COLUMNS, main


@pytest.fixture
def files(data_dir):
    return ["--data", str(data_dir / "running_data.graph"), "--query", str(data_dir / "running_query.graph"),
            "--stream", str(data_dir / "running.stream")]


def test_run_prints_matches_and_json(files, capsys):
    assert main(["run", *files]) == 0
    out, err = capsys.readouterr()
    assert out == "m - 3 4 1 6\nm + 3 6 2 5\n"
    report = json.loads(err)
    assert report["schema"] == 1
    assert report["command"][:2] == ["calig", "run"]
    assert report["completed"] is True
    assert (report["matches_added"], report["matches_removed"]) == (1, 1)
    assert report["maint_us"] + report["search_us"] <= report["total_us"]
    assert report["peak_memory_bytes"] > 0


def test_csv_report(files, tmp_path, capsys):
    path = tmp_path / "r.csv"
    assert main(["run", *files, "--report", "csv", "--report-out", str(path)]) == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert list(rows[0]) == CSV_COLUMNS
    assert [(r["kind"], r["src"], r["dst"], r["added"], r["removed"]) for r in rows] == [
        ("-", "4", "6", "0", "1"), ("+", "2", "6", "1", "0")]


def test_oracle_diff_is_byte_equal(files, tmp_path):
    a, b = tmp_path / "engine.txt", tmp_path / "oracle.txt"
    assert main(["run", *files, "-o", str(a), "--report-out", str(tmp_path / "r.json")]) == 0
    assert main(["oracle-diff", *files, "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("seed", [1, 7, 11])
def test_oracle_diff_byte_equal_on_random_sessions(seed, tmp_path):
    a, b = tmp_path / "engine.txt", tmp_path / "oracle.txt"
    assert main(["run", "--seed", str(seed), "-o", str(a), "--report-out", str(tmp_path / "r.json")]) == 0
    assert main(["oracle-diff", "--seed", str(seed), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_no_timing_reports_are_reproducible(tmp_path):
    outs = []
    for i in range(2):
        m, r = tmp_path / "m", tmp_path / "r"
        assert main(["run", "--seed", "5", "--no-timing", "-o", str(m), "--report-out", str(r)]) == 0
        outs.append((m.read_bytes(), r.read_bytes()))
    assert outs[0] == outs[1]
    assert "total_us" not in json.loads(outs[0][1])


def test_verify_pass(files, capsys):
    assert main(["verify", *files, "--rebuild-every", "1"]) == 0
    assert capsys.readouterr().out.startswith("PASS")


def test_verify_fail_exit_code(files, monkeypatch, capsys):
    import calig.search
    real = calig.search.join_shell

    def drops_first(m, shell, cands):
        it = real(m, shell, cands)
        next(it, None)
        yield from it

    monkeypatch.setattr(calig.search, "join_shell", drops_first)
    assert main(["verify", *files]) == 3
    assert "op 0" in capsys.readouterr().out


def test_timeout_exit_code(files, capsys):
    assert main(["run", *files, "--timeout-secs", "-1"]) == 4
    assert json.loads(capsys.readouterr().err)["completed"] is False


def test_parse_error_exit_code(tmp_path, files, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("t 2 1\nv 0 A\nv 1 A\ne 0 0\n")
    argv = ["run", "--data", str(bad), "--query", files[3]]
    assert main(argv) == 2
    assert "line 4" in capsys.readouterr().err


def test_missing_file_exit_code(capsys):
    assert main(["run", "--data", "/nonexistent", "--query", "/nonexistent"]) == 2


def test_disconnected_query_exit_code(tmp_path, files, capsys):
    q = tmp_path / "q.graph"
    q.write_text("t 4 2\nv 0 A\nv 1 B\nv 2 A\nv 3 B\ne 0 1\ne 2 3\n")
    assert main(["run", "--data", files[1], "--query", str(q)]) == 2


def test_inputs_required(capsys):
    assert main(["run"]) == 2


def test_dump_index_format(files, capsys):
    assert main(["dump-index", "--data", files[1], "--query", files[3]]) == 0
    lines = capsys.readouterr().out.splitlines()
    nodes = [l for l in lines if l.startswith("mp ")]
    assert len(nodes) == 10
    assert sorted(l for l in nodes if l.endswith("ON")) == sorted(
        ["mp 0 3 ON", "mp 1 4 ON", "mp 2 1 ON", "mp 3 6 ON"])
    assert all(l.startswith(("mp ", "arc ")) for l in lines)


def test_dump_index_after_stream(files, capsys):
    assert main(["dump-index", *files]) == 0
    on = {l for l in capsys.readouterr().out.splitlines() if l.endswith(" ON")}
    assert on == {"mp 0 3 ON", "mp 1 6 ON", "mp 2 2 ON", "mp 3 5 ON"}


def test_dump_plans(files, capsys):
    assert main(["dump-plans", "--query", files[3]]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    assert all(l.startswith("plan ") and "kernel=" in l and "shell=" in l for l in lines)
    assert main(["dump-plans", "--query", files[3], "--exact"]) == 0


def test_run_writes_diagnostics(files, tmp_path, capsys):
    idx, plans = tmp_path / "idx", tmp_path / "plans"
    assert main(["run", *files, "--dump-index", str(idx), "--dump-plans", str(plans)]) == 0
    assert idx.read_text().startswith("mp ")
    assert plans.read_text().startswith("plan ")


def test_ablation_flags_keep_output(files, capsys):
    assert main(["run", *files]) == 0
    base = capsys.readouterr().out
    for flag in ["--no-injm", "--no-nstate", "--no-kss", "--cache-im", "--no-prune"]:
        assert main(["run", *files, flag]) == 0
        assert capsys.readouterr().out == base


def test_count_mode_prints_no_matches(files, capsys):
    assert main(["run", *files, "--mode", "count"]) == 0
    out, err = capsys.readouterr()
    assert out == "" and json.loads(err)["matches_added"] == 1


def test_bench(capsys):
    assert main(["bench", "--sessions", "3", "--stream-length", "10"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["sessions"] == 3 and report["completion_rate"] == 1.0
    assert {"avg_elapsed_ms_all", "avg_elapsed_ms_completed", "maintenance_share"} <= set(report)


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "calig", "run", *files, "--report", "csv"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout == "m - 3 4 1 6\nm + 3 6 2 5\n"
    assert proc.stderr.splitlines()[0] == ",".join(CSV_COLUMNS)
