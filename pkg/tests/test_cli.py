import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jacklab.asymptotics import ConvergenceReport
from jacklab.cli import format_value, main, parse_scalar
from jacklab.suites import CheckReport, build_suite, decode_number, encode_number, run_cases


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv, expected", [
    (["eval", "--lambda", "[1,0]", "--vars", "1,1", "--theta", "1"], "2"),
    (["char", "--lambda", "[1,0,0]", "--vars", "2", "--N", "3", "--theta", "0.5"], "4/3"),
    (["char", "--lambda", "[2,1,0]", "--vars", "2,1", "--N", "3", "--theta", "1", "--exact"], "9/4"),
    (["char", "--lambda", "[2,1,0]", "--vars", "2,1", "--N", "3", "--theta", "1", "--float"], "2.25"),
    (["eval", "--lambda", "[2,0,-1]", "--vars", "1/2,3,2", "--theta", "1/3"], None),
])
def test_eval_and_char(argv, expected, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    if expected is not None:
        assert out.strip() == expected


def test_float_output_has_17_digits(capsys):
    code, out, _ = run(["char", "--lambda", "[1,0,0]", "--vars", "2", "--N", "3", "--theta", "0.5", "--float"], capsys)
    assert code == 0 and out.strip() == "1.3333333333333333"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(1 - 2j) == "1-2j"
    assert format_value(Fraction(-3, 7)) == "-3/7"


def test_input_errors_exit_2(capsys):
    bad = [
        ["eval", "--lambda", "[1,2]", "--vars", "1,1", "--theta", "1"],
        ["eval", "--lambda", "[1,0]", "--vars", "1", "--theta", "1"],
        ["eval", "--lambda", "[1,0]", "--vars", "1,x", "--theta", "1"],
        ["eval", "--lambda", "[0,-1]", "--vars", "0,1", "--theta", "1"],
        ["char", "--lambda", "[1,0]", "--vars", "2.5j", "--theta", "1", "--exact"],
        ["char", "--lambda", "[1,0]", "--vars", "2", "--N", "3", "--theta", "1"],
        ["char", "--lambda", "[1,0]", "--vars", "2", "--theta", "-1"],
        ["verify", "residue", "--theta", "0.5"],
        ["vk-limit", "--recipe", '{"gamma_plus":', "--theta", "1", "--Ns", "20"],
        ["vk-limit", "--recipe", '{"beta_plus":[0.7],"beta_minus":[0.3],"alpha_plus":[0.2]}', "--theta", "1", "--Ns", "10"],
        ["pieri-check", "--nu", "[1,0,0]", "--m", "1", "--theta", "1", "--xs", "0.7", "--x", "0.6"],
    ]
    for argv in bad:
        code, _, err = run(argv, capsys)
        assert code == 2, argv
        assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "no-such-suite"])
    assert info.value.code == 2


def test_verify_residue_stream(capsys):
    code, out, _ = run(["verify", "residue", "--theta", "2", "--N", "3"], capsys)
    assert code == 0
    recs = [CheckReport.from_json(line) for line in out.splitlines()]
    assert len(recs) == 120 * 12  # signatures of length 3 in [-3, 4] times the x grid
    assert all(r.passed and r.suite == "residue" for r in recs)
    assert max(r.rel_err for r in recs) < 1e-9


def test_verify_pieri_m1(capsys):
    code, out, _ = run(["verify", "pieri", "--m", "1", "--theta", "1", "--N", "3,4"], capsys)
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert len(recs) == 2 * 8 * 3 and all(r["pass"] for r in recs)
    assert set(recs[0]) == {"suite", "inputs", "lhs", "rhs", "rel_err", "pass"}


def test_verify_pieri_capacity_record(capsys):
    code, out, _ = run(["verify", "pieri", "--m", "5", "--theta", "1"], capsys)
    assert code == 1
    recs = [json.loads(line) for line in out.splitlines()]
    assert recs and all(not r["pass"] and r["error"].startswith("CapacityError") for r in recs)


def test_verify_branching_ones(capsys):
    code, out, _ = run(["verify", "branching-ones", "--theta", "1/3", "--N", "2,3"], capsys)
    assert code == 0
    recs = [CheckReport.from_json(line) for line in out.splitlines()]
    assert all(r.rel_err == 0 and isinstance(r.lhs, (int, Fraction)) for r in recs)


def test_verify_failure_exit_1(capsys):
    code, out, _ = run(["verify", "contour-in", "--theta", "1", "--N", "1", "--tol", "1e-30"], capsys)
    assert code == 1
    assert any(not json.loads(line)["pass"] for line in out.splitlines())


def test_pieri_check_command(capsys, tmp_path):
    code, out, _ = run(["pieri-check", "--nu", "[1,0,0]", "--m", "1", "--theta", "1", "--xs", "0.3", "--x", "0.6"], capsys)
    assert code == 0 and json.loads(out)["pass"]
    path = tmp_path / "rec.jsonl"
    code, out, _ = run(["pieri-check", "--nu", "[0,0,0,0,0]", "--m", "4", "--theta", "1", "--xs", "0.5,0.6,0.7,0.8",
                        "--x", "0.9", "--out", str(path)], capsys)
    assert code == 1 and out == ""
    rec = json.loads(path.read_text())
    assert not rec["pass"] and "CapacityError" in rec["error"]


def test_vk_limit(capsys, tmp_path):
    csv = tmp_path / "err.csv"
    code, out, _ = run(["vk-limit", "--recipe", '{"gamma_plus": 1}', "--theta", "1", "--m", "1",
                        "--Ns", "20,40,80", "--csv", str(csv)], capsys)
    assert code == 0
    rep = ConvergenceReport.from_dict(json.loads(out))
    assert rep.strictly_decreasing()
    rows = csv.read_text().splitlines()
    assert rows[0] == "N,sup_error" and [int(r.split(",")[0]) for r in rows[1:]] == [20, 40, 80]
    code, out, _ = run(["vk-limit", "--recipe", "{}", "--theta", "1", "--Ns", "10,20", "--csv", "-"], capsys)
    assert code == 0
    assert out.splitlines()[-2:] == ["10,0", "20,0"]


def test_thread_count_does_not_change_order(monkeypatch):
    cases = build_suite("residue", [1], [2])
    one = [r.to_json() for r in run_cases(cases, threads=1)]
    many = [r.to_json() for r in run_cases(cases, threads=4)]
    assert one == many
    monkeypatch.setenv("JACKLAB_THREADS", "3")
    assert [r.to_json() for r in run_cases(cases)] == one


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "jacklab", "char", "--lambda", "[2,1,0]", "--vars", "2,1",
                          "--N", "3", "--theta", "1", "--exact"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "9/4"


def test_parse_scalar():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("0.25") == Fraction(1, 4)
    assert parse_scalar("0.25", exact=False) == 0.25
    assert parse_scalar("1+2i") == 1 + 2j


finite = st.floats(allow_nan=False, allow_infinity=False)
scalars = st.one_of(
    finite,
    st.fractions(max_denominator=50),
    st.builds(complex, finite, finite),
    st.integers(-10**6, 10**6),
)


@settings(max_examples=100, deadline=None)
@given(scalars)
def test_number_encoding_roundtrip(v):
    back = decode_number(json.loads(json.dumps(encode_number(v))))
    assert back == v


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(["residue", "contour-in", "contour-out", "pieri", "branching-ones"]),
    st.dictionaries(st.sampled_from(["lambda", "N", "theta", "x"]),
                    st.one_of(st.integers(-5, 5), st.text(max_size=8), finite), max_size=4),
    scalars, scalars, st.floats(0, 1), st.booleans(),
    st.one_of(st.none(), st.text(max_size=20)),
)
def test_check_report_roundtrip(suite, inputs, lhs, rhs, err, passed, error):
    rep = CheckReport(suite, inputs, lhs, rhs, err, passed, error)
    assert CheckReport.from_json(rep.to_json()) == rep


def test_failed_record_roundtrip():
    rep = CheckReport("pieri", {"m": 5}, None, None, math.inf, False, "CapacityError: m cap")
    assert CheckReport.from_json(rep.to_json()) == rep
