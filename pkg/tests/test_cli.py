import json
import subprocess
import sys

import pytest

from siltlab.cli import main

A2 = 'name = "a2"\nvertices = ["1", "2"]\narrows = [["a", "1", "2"]]\nrelations = []\n'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_a2(capsys, tmp_path):
    f = tmp_path / "a2.toml"
    f.write_text(A2)
    code, out, _ = run(capsys, "check", "--algebra", str(f))
    assert code == 0 and out.splitlines()[0] == "dim 3, |A| = 2"


def test_check_kronecker(capsys):
    code, out, _ = run(capsys, "check", "--algebra", "kronecker")
    assert code == 0 and out.startswith("dim 4, |A| = 2")


def test_empty_vertices_parse_error(capsys, tmp_path):
    f = tmp_path / "bad.toml"
    f.write_text("vertices = []\n")
    code, _, err = run(capsys, "check", "--algebra", str(f))
    assert code == 1 and "ParseError" in err


def test_enumerate_pentagon(capsys):
    code, out, _ = run(capsys, "enumerate", "--algebra", "a2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["count"] == 5
    assert all("stau" in o for o in data["objects"])


def test_complete_silting_object_is_an_error(capsys):
    code, _, err = run(capsys, "complete", "--algebra", "a2", "--bongartz", "--projectives", "1,2")
    assert code == 1 and "AlreadySilting" in err


def test_complete_and_co_complete(capsys):
    code, out, _ = run(capsys, "complete", "--algebra", "a2", "--projectives", "1", "--format", "json")
    # the largest completion of P_1 is A, the smallest is P_1 + S_1
    assert code == 0 and json.loads(out)["result"]["stau"]["module_dimvec"] == [1, 2]
    code, out, _ = run(capsys, "complete", "--algebra", "a2", "--co-bongartz", "--projectives", "1", "--format", "json")
    st = json.loads(out)["result"]["stau"]
    assert code == 0 and st["proj_part"] == [] and sorted(st["module_summands"]) == [[1, 0], [1, 1]]


def test_hasse_dot(capsys):
    code, out, _ = run(capsys, "hasse", "--algebra", "a2", "--format", "dot")
    assert code == 0
    assert out.count("->") == 5
    assert sum(1 for line in out.splitlines() if line.strip().startswith("n") and "->" not in line) == 5


def test_hasse_kronecker_truncated(capsys):
    code, out, _ = run(capsys, "hasse", "--algebra", "kronecker", "--max-nodes", "6")
    assert code == 2 and "truncated" in out


def test_mutate_path_returns_to_start(capsys):
    code, out, _ = run(capsys, "mutate", "--algebra", "one_vertex", "--path", "0,0", "--format", "json")
    steps = json.loads(out)["steps"]
    assert code == 0 and steps[0]["summands"] == steps[2]["summands"]
    assert [s.get("direction") for s in steps[1:]] == ["left", "right"]


def test_mgs_pentagon(capsys):
    code, out, _ = run(capsys, "mgs", "--algebra", "a2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and sorted(s["length"] for s in data["sequences"]) == [2, 3]


def test_reduce_top_simple(capsys, tmp_path):
    code, out, _ = run(capsys, "enumerate", "--algebra", "a2", "--format", "json")
    obj = next(o for o in json.loads(out)["objects"] if o["stau"]["proj_part"] == ["2"])
    s1 = [c for c in obj["complexes"].values() if c["degrees"] == [-1, 0] and len(c["diffs"])]
    f = tmp_path / "u.json"
    f.write_text(json.dumps(s1))
    code, out, _ = run(capsys, "reduce", "--algebra", "a2", "--object", str(f), "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["B"]["dim"] == 1 and data["square"]["bijection"]


def test_verify_a2_all_pass(capsys):
    code, out, _ = run(capsys, "verify", "--algebra", "a2")
    assert code == 0 and out.rstrip().endswith("overall: PASS")
    assert out.count("PASS") == 9


def test_verify_nterm_a2(capsys):
    code, out, _ = run(capsys, "verify", "--algebra", "a2", "--suite", "nterm", "--format", "json")
    res = json.loads(out)["reports"][0]["suites"][0]
    assert code == 0 and res["summary"]["count"] >= res["summary"]["lower_bound"] == 9


def test_verify_inadmissible_fails_before_suites(capsys, tmp_path):
    f = tmp_path / "bad.toml"
    f.write_text('vertices = ["1", "2"]\narrows = [["a", "1", "2"]]\nrelations = ["a"]\n')
    code, out, err = run(capsys, "verify", "--algebra", str(f))
    assert code == 1 and out == "" and "InadmissibleRelation" in err


def test_unknown_suite_rejected():
    with pytest.raises(SystemExit):
        main(["verify", "--algebra", "a2", "--suite", "nope"])


def test_nonpositive_bound_rejected():
    with pytest.raises(SystemExit):
        main(["hasse", "--algebra", "a2", "--max-nodes", "0"])


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "siltlab.cli", "check", "--algebra", "a2"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("dim 3")
