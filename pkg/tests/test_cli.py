import json
import subprocess
import sys

import pytest

from s3stream.cli import build_parser, format_table, main, read_elements, DataError


def run_cli(args, stdin=""):
    proc = subprocess.run([sys.executable, "-m", "s3stream", *args], input=stdin, capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


SIX = "a\nb\nc\nd\ne\nf\n"


def test_sequence_records_and_window():
    code, out, _ = run_cli(["sample", "--mode", "sequence", "--n", "4", "--seed", "1"], SIX)
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(recs) == 6
    assert recs[-1]["window"] == [2, 5] and recs[-1]["N"] == 6
    assert list(recs[0]) == ["t", "N", "window", "samples"]
    assert list(recs[0]["samples"][0]) == ["index", "timestamp", "value"]
    assert 2 <= recs[-1]["samples"][0]["index"] <= 5


def test_same_seed_is_byte_identical():
    args = ["sample", "--mode", "sequence", "--n", "3", "-k", "2", "--replacement", "without", "--seed", "9"]
    assert run_cli(args, SIX * 5)[1] == run_cli(args, SIX * 5)[1]


def test_emit_every_and_ndjson(tmp_path):
    path = tmp_path / "in.ndjson"
    path.write_text("".join(json.dumps({"t": t, "v": t * 10}) + "\n" for t in (0, 0, 1, 2, 2, 5)))
    code, out, _ = run_cli(["sample", "--mode", "timestamp", "--t0", "2", "-k", "2", "--replacement", "without",
                            "--seed", "3", "--format", "ndjson", "--emit-every", "2", str(path)])
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and [r["t"] for r in recs] == [0, 2, 4]
    assert recs[2]["samples"] == [] and recs[1]["window"] == [1, 2]
    assert {s["index"] for s in recs[1]["samples"]} <= {2, 3, 4}


def test_timestamp_csv_requires_two_fields():
    code, _, err = run_cli(["sample", "--mode", "timestamp", "--t0", "2", "--seed", "1"], "x\n")
    assert code == 2 and "line 1" in err


@pytest.mark.parametrize("stdin,fragment", [
    ("0,a\n2,b\n1,c\n", "line 3: timestamp 1 decreases"),
    ("0,a\nx,b\n", "line 2: timestamp must be an integer"),
    ("0,a\n1\n", "line 2: expected 2 field(s)"),
    ("1.5,a\n", "line 1"),
])
def test_malformed_csv(stdin, fragment):
    code, _, err = run_cli(["sample", "--mode", "timestamp", "--t0", "2", "--seed", "1"], stdin)
    assert code == 2 and fragment in err


@pytest.mark.parametrize("line,fragment", [
    ("[1]", "expected an object"),
    ('{"t": 1}', 'missing "v"'),
    ('{"t": true, "v": 1}', "must be an integer"),
    ('{"t": 1, "v": 1, "x": 0}', "unexpected keys"),
    ("{oops", "invalid JSON"),
])
def test_malformed_ndjson(line, fragment):
    code, _, err = run_cli(["sample", "--mode", "timestamp", "--t0", "2", "--seed", "1", "--format", "ndjson"], line + "\n")
    assert code == 2 and fragment in err


@pytest.mark.parametrize("args", [
    ["sample", "--mode", "sequence", "--seed", "1"],
    ["sample", "--mode", "sequence", "--n", "3", "--t0", "2", "--seed", "1"],
    ["sample", "--mode", "timestamp", "--n", "3", "--seed", "1"],
    ["sample", "--mode", "sequence", "--n", "3", "--seed", "-1"],
    ["sample", "--mode", "sequence", "--n", "3", "-k", "0", "--seed", "1"],
    ["sample", "--mode", "sequence", "--n", "3", "--seed", "1", "--emit-every", "0"],
])
def test_bad_configs_are_usage_errors(args):
    assert run_cli(args, SIX)[0] == 2


def test_seed_is_mandatory():
    assert run_cli(["sample", "--mode", "sequence", "--n", "3"], SIX)[0] == 2
    assert run_cli(["bench"])[0] == 2


def test_missing_input_file():
    code, _, err = run_cli(["sample", "--mode", "sequence", "--n", "3", "--seed", "1", "/nonexistent/x.csv"])
    assert code == 2 and "error" in err


def test_verify_unknown_selector():
    assert run_cli(["verify", "bogus"])[0] == 2


def test_verify_independence_suite():
    code, out, _ = run_cli(["verify", "independence"])
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and recs and all(r["pass"] and r["suite"] == "independence" for r in recs)


def test_verify_failure_exit_code(monkeypatch, capsys):
    from s3stream.verify import suites

    monkeypatch.setitem(suites.SUITES, "exact", [lambda: {"suite": "exact", "test": "x", "pass": False}])
    assert main(["verify", "exact"]) == 1
    assert json.loads(capsys.readouterr().out)["pass"] is False


def test_bench_rows_and_json(tmp_path):
    path = tmp_path / "bench.json"
    code, out, _ = run_cli(["bench", "--seed", "4", "--n", "16", "--length", "3000", "--json", str(path)])
    report = json.loads(path.read_text())
    rows = {r["strategy"]: r for r in report["strategies"]}
    assert code == 0 and set(rows) == {"s3_sequence", "chain", "priority", "periodic"}
    assert rows["s3_sequence"]["max_memory"] <= 2
    assert rows["periodic"]["max_memory"] == 1 and rows["periodic"]["mean_memory"] == 1
    assert "strategy" in out.splitlines()[0]


def test_bench_bias_and_timestamp_json_stdout():
    code, out, _ = run_cli(["bench", "--seed", "4", "--n", "8", "--length", "2000", "--bias",
                            "--bias-trials", "3000", "--json", "-"])
    report = json.loads(out)
    assert code == 0 and report["bias"]["p0_over_pn"] > 0
    code, out, _ = run_cli(["bench", "--seed", "4", "--mode", "timestamp", "--t0", "5", "--ticks", "50", "--json", "-"])
    assert code == 0 and [r["strategy"] for r in json.loads(out)["strategies"]] == ["s3_timestamp", "priority"]


def test_fk_exact_column():
    stdin = "".join(f"{i % 3}\n" for i in range(40))
    code, out, _ = run_cli(["fk", "--n", "10", "--k-moment", "1", "--r", "5", "--seed", "2", "--exact",
                            "--emit-every", "10"], stdin)
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(recs) == 4
    assert all(r["estimate"] == r["exact"] == 10 for r in recs)


def test_log_level_env():
    proc = subprocess.run([sys.executable, "-m", "s3stream", "verify", "independence"], capture_output=True,
                          text=True, env={"S3_LOG": "debug", "PATH": ""})
    assert proc.returncode == 0 and "DEBUG" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "s3stream", "verify", "independence"], capture_output=True,
                          text=True, env={"S3_LOG": "loud", "PATH": ""})
    assert proc.returncode == 2


def test_read_elements_auto_timestamps():
    import io

    elems = list(read_elements(io.StringIO("x\ny\n\nz\n"), "csv", "sequence"))
    assert [(e.index, e.timestamp, e.value) for e in elems] == [(0, 0, "x"), (1, 1, "y"), (2, 2, "z")]
    with pytest.raises(DataError):
        list(read_elements(io.StringIO("a,b,c\n"), "csv", "sequence"))


def test_format_table_aligns():
    text = format_table([{"a": 1, "bb": "x"}, {"a": 100, "bb": "yy"}])
    lines = text.splitlines()
    assert len({len(l.rstrip()) for l in lines[:2]}) == 1 and lines[2].startswith("1  ")
    assert format_table([]) == ""


def test_parser_has_all_commands():
    sub = build_parser()._subparsers._group_actions[0].choices
    assert set(sub) == {"sample", "verify", "bench", "fk"}


def test_lower_bound_workload_runs_within_audited_bound():
    from s3stream.verify import lower_bound_workload

    stdin = "".join(f"{e.timestamp},{e.value}\n" for e in lower_bound_workload(5, tail=10))
    for extra in ([], ["-k", "2", "--replacement", "without"]):
        code, out, err = run_cli(["sample", "--mode", "timestamp", "--t0", "5", "--seed", "8", "--audit",
                                  "--emit-every", "3", *extra], stdin)
        report = json.loads(err)
        assert code == 0 and report["pass"] and report["arrivals"] == 2**11 - 1 + 10
        assert 0 < report["max_memory_units"] <= report["final_bound"]
        assert out.count("\n") == len(range(0, 21, 3))


def test_audit_flags_overrun(monkeypatch, capsys, tmp_path):
    from s3stream import cli

    monkeypatch.setattr(cli, "memory_bound", lambda k, arrivals, buffered: 0)
    path = tmp_path / "in.csv"
    path.write_text("0,a\n1,b\n")
    assert main(["sample", "--mode", "timestamp", "--t0", "3", "--seed", "1", "--audit", str(path)]) == 1
    assert json.loads(capsys.readouterr().err)["violation_at"] == 0


def test_suite_selectors_match_registry():
    from s3stream.cli import SUITE_NAMES
    from s3stream.verify.suites import SUITES, run_suite

    assert set(SUITES) | {"all"} == set(SUITE_NAMES)
    results = list(run_suite("independence"))
    assert all({"suite", "test", "pass", "seconds"} <= set(r) for r in results)
