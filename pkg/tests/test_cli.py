import json
import subprocess
import sys
from pathlib import Path

import pytest

from lincond.affine import verdict_from_json
from lincond.cli import main
from lincond.identities import canonicalize, parse_system

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"


def run(*args):
    proc = subprocess.run([sys.executable, "-m", "lincond", *map(str, args)],
                          capture_output=True, text=True, timeout=300)
    return proc.returncode, proc.stdout, proc.stderr


def sysfile(name):
    return SYSTEMS / f"{name}.sys"


def test_clone_b():
    code, out, _ = run("clone", "B", "--arity", "3")
    assert code == 0 and out.startswith("7 operations")


def test_clone_a3_binary_classify():
    code, out, _ = run("clone", "A3", "--arity", "2", "--classify", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["count"] == 2
    assert [m["flags"]["projection"] for m in data["members"]] == [1, 2]


def test_clone_c():
    code, out, _ = run("clone", "C", "--arity", "3")
    assert code == 0 and out.startswith("4 operations")


def test_clone_cap_exceeded():
    code, _, err = run("clone", "B", "--arity", "3", "--cap", "3")
    assert code == 2 and "cap" in err


def test_unknown_algebra():
    code, _, err = run("clone", "nope.json")
    assert code == 2 and "nope.json" in err


def test_check_s_cand_b():
    code, out, _ = run("check", sysfile("s_cand"), "B", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["satisfiable"]
    # p = q = the ternary meet
    assert {"p": [0, 0, 0, 0, 0, 0, 0, 1], "q": [0, 0, 0, 0, 0, 0, 0, 1]} in [
        {s: o["table"] for s, o in w["ops"].items()} for w in data["witnesses"]]


def test_check_s_pm_full_b():
    code, out, _ = run("check", sysfile("s_pm_full"), "B")
    assert code == 1 and "unsatisfiable" in out


def test_check_s_cand_cxd():
    code, out, _ = run("check", sysfile("s_cand"), "CxD")
    assert code == 0 and "satisfiable in CxD" in out


def test_affine_s_cand():
    code, out, _ = run("affine", sysfile("s_cand"), "--all-rings", "--format", "json")
    assert code == 1
    v = verdict_from_json(json.loads(out))
    assert v.status == "unrealizable"
    assert json.loads(out)["status"] == "unrealizable"


def test_affine_subset3_mod5():
    code, out, _ = run("affine", sysfile("subset3"), "--modulus", "5", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"status": "realizable", "modulus": 5, "witness": {"p": [1, 0, 0], "q": [3, 3, 0]}}


def test_affine_trivial():
    code, out, _ = run("affine", sysfile("trivial_proj"))
    assert code == 0 and "realizable mod 2: p=(1, 0, 0)" in out


def test_affine_bad_modulus():
    assert run("affine", sysfile("s_cand"), "--modulus", "1")[0] == 2


def test_classify_one_ternary():
    code, out, _ = run("classify", "--class", "one-ternary", "--format", "json")
    assert code == 0 and json.loads(out)["survivors"] == []


def test_classify_two_ternary(tmp_path):
    out_path = tmp_path / "report.json"
    code, out, _ = run("classify", "--class", "two-ternary", "--out", out_path)
    assert code == 0 and "3 survivor(s)" in out
    data = json.loads(out_path.read_text())
    assert sorted(s["label"] for s in data["survivors"]) == ["S-CAND", "S-MAJ", "S-NEW"]


def test_classify_full(tmp_path):
    code, out, _ = run("classify", "--full", "--out", tmp_path / "full.json")
    assert code == 0 and "final candidates: S-CAND" in out and "FINDING" not in out
    data = json.loads((tmp_path / "full.json").read_text())
    assert [c["label"] for c in data["final_candidates"]] == ["S-CAND"]


def test_fmt_canonical():
    code, out, _ = run("fmt", sysfile("subset3"), "--canonical")
    assert code == 0 and out.startswith("p/3; q/3;\n")
    subset3 = parse_system(sysfile("subset3").read_text())
    assert parse_system(out) == canonicalize(subset3)


def test_fmt_syntax_error(tmp_path):
    bad = tmp_path / "bad.sys"
    bad.write_text("p/3;\np(x,y) = x;\n")
    code, _, err = run("fmt", bad)
    assert code == 2 and "line 2" in err


def test_missing_file():
    code, _, err = run("fmt", "/nonexistent.sys")
    assert code == 2 and "cannot read" in err


def test_usage_error():
    assert run("frobnicate")[0] == 2


@pytest.mark.parametrize("args", [
    ["clone", "D", "--arity", "3"],
    ["check", str(sysfile("s_cand")), "C"],
    ["affine", str(sysfile("subset3")), "--modulus", "5"],
])
def test_text_and_json_agree(args, capsys):
    main(args)
    text = capsys.readouterr().out
    main(args + ["--format", "json"])
    data = json.loads(capsys.readouterr().out)
    if args[0] == "clone":
        assert text.startswith(f"{data['count']} operations")
        assert all(m["term"] in text for m in data["members"])
    elif args[0] == "check":
        assert f"{len(data['witnesses'])} interpretation(s)" in text
    else:
        assert text.startswith(f"realizable mod {data['modulus']}")
        assert all(f"{s}=({', '.join(map(str, c))})" in text for s, c in data["witness"].items())
