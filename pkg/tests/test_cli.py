import json
import subprocess
import sys

import pytest

from cardsec import jsonio
from cardsec.cli import main


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(args, capsys):
    code, out, err = run(args, capsys)
    return code, json.loads(out) if out.strip() else None, err


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("artifacts")
    paths = {}
    for name, args in {
        "witt": ["witt24"],
        "ag32": ["ag32"],
        "ls": ["large-set-sts9"],
        "tdls": ["td-large-set", "--a", 3, "--c", 1, "--q", 3],
        "oa": ["rs-oa", "--t", 2, "--q", 3],
        "td": ["td", "--t", 2, "--q", 3],
        "geo": ["geometric", "--p", 2, "--d", 2, "--s", 1],
    }.items():
        p = d / f"{name}.json"
        assert main(["construct", *map(str, args), "-o", str(p)]) == 0
        paths[name] = str(p)
    (d / "corrupt.json").write_text("{not json")
    paths["corrupt"] = str(d / "corrupt.json")
    (d / "badfield.json").write_text(json.dumps({"v": 8, "k": 4, "blocks": [[0, 1, 2, 3], [0, 1, 2]]}))
    paths["badfield"] = str(d / "badfield.json")
    (d / "other.json").write_text(json.dumps({"hello": 1}))
    paths["other"] = str(d / "other.json")
    paths["missing"] = str(d / "nope.json")
    return paths


def test_construct_witt(files):
    doc = json.load(open(files["witt"]))
    assert len(doc["blocks"]) == 759 and doc["v"] == 24 and doc["k"] == 8
    assert doc["blocks"] == sorted(doc["blocks"])


def test_construct_geometric_stdout(capsys):
    code, doc, _ = run_json(["construct", "geometric", "--p", 2, "--d", 2, "--s", 1], capsys)
    assert code == 0 and len(doc["hands"]) == 14
    assert doc["parameters"] == {"p": 2, "d": 2, "s": 1, "r": 7, "lambda_formula_value": 3}


def test_construct_sts8_usage(capsys):
    code, out, err = run(["construct", "sts", "--v", 8], capsys)
    assert code == 2 and out == ""
    assert "1,3 mod 6" in err and len(err.strip().splitlines()) == 1


def test_construct_missing_parameter(capsys):
    code, _, err = run(["construct", "sts"], capsys)
    assert code == 2 and "--v" in err


@pytest.mark.parametrize("kind,args,count_key,count", [
    ("sts", ["--v", 9], "blocks", 12),
    ("projective", ["--q", 3], "blocks", 13),
    ("paley", ["--q", 11], "blocks", 11),
    ("inversive", ["--q", 3], "blocks", 30),
    ("derived", [], "blocks", 253),
    ("trivial", ["--v", 5, "--k", 2, "--t", 2], "blocks", 10),
    ("rs-oa", ["--t", 3, "--q", 5], "rows", 125),
    ("td", ["--t", 3, "--q", 5, "--k", 4], "blocks", 125),
])
def test_construct_kinds(kind, args, count_key, count, capsys):
    code, doc, _ = run_json(["construct", kind, *args], capsys)
    assert code == 0 and len(doc[count_key]) == count


# exit-code matrix: (target, flags, expected exit)
MATRIX = [
    ("witt", ["--design-t", 5, "--informative-c", 3, "--perfect-delta", 2], 0),
    ("witt", ["--c", 3, "--perfect-delta", 3], 1),
    ("witt", ["--design-t", 6], 1),
    ("ag32", ["--design-t", 3, "--informative-c", 1, "--perfect-delta", 2], 0),
    ("ag32", ["--weak-delta", 2, "--c", 1], 0),
    ("ag32", ["--weak-delta", 3, "--c", 1], 1),
    ("ls", ["--large-set-t", 2, "--informative-c", 1, "--perfect-delta", 1], 0),
    ("ls", ["--design-t", 2], 0),
    ("tdls", ["--transversal-delta", 1], 0),
    ("oa", ["--oa"], 0),
    ("td", ["--design-t", 2, "--informative-c", 1, "--transversal-delta", 1, "--c", 1], 0),
    ("geo", ["--design-t", 3, "--perfect-delta", 1, "--c", 2], 0),
    ("corrupt", ["--design-t", 2], 2),
    ("badfield", ["--design-t", 2], 2),
    ("other", ["--design-t", 2], 2),
    ("missing", ["--design-t", 2], 2),
    ("ag32", [], 2),
    ("ag32", ["--perfect-delta", 1], 2),
    ("ag32", ["--oa"], 2),
    ("oa", ["--design-t", 2], 2),
    ("ag32", ["--perfect-delta", 9, "--c", 1], 2),
]


@pytest.mark.parametrize("target,flags,want", MATRIX)
def test_verify_exit_codes(files, target, flags, want, capsys):
    code, out, err = run(["verify", files[target], *flags], capsys)
    assert code == want, err
    if want == 2:
        assert out == "" and err
    else:
        doc = json.loads(out)
        assert doc["schema"] == 1 and doc["verdicts"]
        assert doc["passed"] == (want == 0)


def test_verify_witt_failure_has_witness(files, capsys):
    code, doc, _ = run_json(["verify", files["witt"], "--c", 3, "--perfect-delta", 3], capsys)
    assert code == 1
    v = doc["verdicts"][0]
    assert v["level"] == "weak" and v["witness"]["p_size"] == 210


def test_parse_errors_name_path_and_field(files, capsys):
    _, _, err = run(["verify", files["badfield"], "--design-t", 2], capsys)
    assert files["badfield"] in err and "blocks[1]" in err
    _, _, err = run(["verify", files["corrupt"], "--design-t", 2], capsys)
    assert files["corrupt"] in err and "<document>" in err


def test_threads_do_not_change_output(files, capsys, monkeypatch):
    args = ["verify", files["witt"], "--c", 3, "--perfect-delta", 3]
    _, one, _ = run(args + ["--threads", 1], capsys)
    _, four, _ = run(args + ["--threads", 4], capsys)
    monkeypatch.setenv("CARDSEC_THREADS", "3")
    _, env, _ = run(args + ["--threads", 1], capsys)
    assert one == four == env


def test_bad_thread_env(files, capsys, monkeypatch):
    monkeypatch.setenv("CARDSEC_THREADS", "many")
    code, _, err = run(["verify", files["ag32"], "--design-t", 3], capsys)
    assert code == 2 and "CARDSEC_THREADS" in err


def test_simulate_large_set(files, capsys):
    args = ["simulate", files["ls"], "--a", 3, "--b", 5, "--c", 1, "--trials", 2000, "--seed", 9]
    code, out, _ = run(args, capsys)
    assert code == 0
    doc = json.loads(out)
    s = doc["summary"]
    assert s["bob_successes"] == 2000 and s["bob_success_rate"] == {"num": 1, "den": 1}
    assert s["posterior_values"] == [{"num": 3, "den": 8}]
    assert s["max_deviation"] == {"num": 0, "den": 1}
    _, again, _ = run(args, capsys)
    assert again == out


def test_simulate_transversal(files, capsys):
    code, doc, _ = run_json(["simulate", files["tdls"], "--a", 3, "--b", 5, "--c", 1,
                             "--trials", 1000, "--seed", 2], capsys)
    assert code == 0
    assert doc["summary"]["posterior_values"] == [{"num": 1, "den": 3}, {"num": 1, "den": 2}]


def test_simulate_zero_trials(files, capsys):
    code, doc, _ = run_json(["simulate", files["ls"], "--a", 3, "--b", 5, "--c", 1,
                             "--trials", 0], capsys)
    assert code == 0 and doc["summary"]["trials"] == 0
    assert doc["summary"]["posterior_values"] == []


def test_simulate_coverage_failure(files, capsys):
    code, doc, _ = run_json(["simulate", files["ag32"], "--a", 4, "--b", 3, "--c", 1,
                             "--trials", 10], capsys)
    assert code == 1
    assert not doc["coverage"]["passed"] and "summary" not in doc


def test_simulate_mismatched_sizes(files, capsys):
    code, _, _ = run(["simulate", files["tdls"], "--a", 3, "--b", 4, "--c", 2], capsys)
    assert code == 2


def test_bounds(capsys):
    code, doc, _ = run_json(["bounds", "--a", 8, "--b", 13, "--c", 3], capsys)
    assert code == 0
    assert doc["bounds"]["min_announcements"] == 969
    assert doc["bounds"]["max_perfect_delta_informative"] == 2


def test_usage_errors(capsys):
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["bounds", "--a", 3], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_timing_flag(capsys):
    _, doc, _ = run_json(["bounds", "--a", 3, "--b", 5, "--c", 1, "--timing"], capsys)
    assert "timing" in doc
    _, doc, _ = run_json(["bounds", "--a", 3, "--b", 5, "--c", 1], capsys)
    assert "timing" not in doc


def test_console_script_replay(files, tmp_path):
    cmd = [sys.executable, "-m", "cardsec.cli", "simulate", files["ls"], "--a", "3", "--b", "5",
           "--c", "1", "--trials", "300", "--seed", "4"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout.count(b"\n") == 1


def test_round_trip_documents(files):
    for name in ("witt", "ls", "tdls", "oa", "td", "geo"):
        kind, obj, extra = jsonio.load(files[name])
        doc = json.load(open(files[name]))
        if kind == "design":
            assert jsonio.design_doc(obj) == doc
        elif kind == "large_set":
            assert jsonio.large_set_doc(obj, extra) == doc
        elif kind == "strategy":
            assert jsonio.strategy_doc(obj) == doc
        elif kind == "oa":
            assert jsonio.oa_doc(obj) == doc
        elif kind == "td":
            assert jsonio.td_doc(obj) == doc
        elif kind == "announcement":
            doc.pop("parameters")
            assert jsonio.announcement_doc(obj) == doc
