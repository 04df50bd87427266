import json

import pytest

from taylorlam.cli import dispatch, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_reduce_head(capsys):
    code, r = run_json(capsys, "reduce", "--strategy", "head", "--fuel", "10", r"(\x.x)y")
    assert code == 0
    assert r["status"] == "ok" and r["steps"] == 1 and r["result"] == "y"
    assert r["trace"][0] == {"position": "", "depth": 0, "kind": "head", "term": "y"}


def test_reduce_out_of_fuel_is_not_ok(capsys):
    code, r = run_json(capsys, "reduce", "--fuel", "3", r"(\x.(x)x)\x.(x)x")
    assert code == 1 and r["status"] == "exhausted" and r["steps"] == 3


def test_taylor_lines(capsys):
    code, r = run_json(capsys, "taylor", "--size-bound", "4", "(x)y")
    assert code == 0
    assert "1/2 (x)[y,y]" in r["lines"]
    assert r["lines"] == ["1 (x)1", "1 (x)[y]", "1/2 (x)[y,y]"]


def test_taylor_pretty_prints_only_lines(capsys):
    code, out = run(capsys, "taylor", "--pretty", "--size-bound", "4", "(x)y")
    assert code == 0
    assert out.splitlines() == ["1 (x)1", "1 (x)[y]", "1/2 (x)[y,y]"]


def test_taylor_boolean(capsys):
    _, r = run_json(capsys, "--semiring", "bool", "taylor", "--size-bound", "4", "(x)y")
    assert r["semiring"] == "bool"
    assert {t["coeff"] for t in r["terms"]} == {"1"}


def test_taylor_of_a_system(capsys):
    code, r = run_json(capsys, "taylor", "--system", "--size-bound", "5", "X = (f)X")
    assert code == 0
    assert "1 (f)[(f)1]" in r["lines"]


def test_global_flags_go_anywhere(capsys):
    _, a = run_json(capsys, "--semiring", "bool", "taylor", "(x)y")
    _, b = run_json(capsys, "taylor", "(x)y", "--semiring", "bool")
    assert a == b


def test_coherent(capsys):
    code, r = run_json(capsys, "coherent", "(x)[y]", "(x)[y,y]")
    assert code == 0 and r["coherent"] is True
    assert r["derivation"]["rule"] == "app"
    _, r = run_json(capsys, "coherent", "x", "y")
    assert r["coherent"] is False


def test_simulate(capsys):
    code, r = run_json(capsys, "simulate", "--size-bound", "5", r"(\x.x)y")
    assert code == 0 and r["agree"] is True and r["reduct"] == "y"
    by_src = {e["source"]: e["targets"] for e in r["witness"]["entries"]}
    assert by_src[r"(\x.x)[y]"] == [{"term": "y", "coeff": "1"}]


def test_simulate_at_a_non_redex_is_a_semantic_error(capsys):
    code, r = run_json(capsys, "simulate", "--position", "A", r"(\x.x)y")
    assert code == 1 and r["status"] == "error"


def test_extract(capsys):
    code, r = run_json(capsys, "extract", r"(\x.(x)x)(\y.y)z", "(z)z")
    # extraction need not find the shortest route, only a genuine one
    assert code == 0 and r["steps"] >= 2
    assert r["trace"][-1]["term"] == "(z)z"
    code, r = run_json(capsys, "extract", r"(\x.x)y", "z", "--fuel", "3")
    assert code == 1 and r["status"] == "not-found-within-fuel"


def test_commute(capsys):
    code, r = run_json(capsys, "commute", r"(\x.x)y", "--size", "8")
    assert code == 0
    assert r["agree"] is True and r["certified"]


def test_accordion_trace_checkpoints(capsys):
    code, r = run_json(capsys, "accordion", "trace", "--n", "0", "--fuel", "500")
    assert code == 0 and r["checkpoints_in_order"]
    steps = [c["step"] for c in r["checkpoints"]]
    assert steps == sorted(steps)


def test_accordion_trace_exhausts(capsys):
    code, r = run_json(capsys, "accordion", "trace", "--n", "1", "--fuel", "4")
    assert code == 1 and r["status"] == "exhausted"


def test_accordion_nosearch(capsys):
    code, r = run_json(capsys, "accordion", "nosearch", "--case", "1", "--n", "0",
                       "--budget", "6")
    assert code == 0 and r["result"] == "no counterexample within budget"
    code, r = run_json(capsys, "accordion", "nosearch", "--case", "control")
    assert code == 0 and r["result"] == "found"


def test_accordion_layers(capsys):
    code, r = run_json(capsys, "accordion", "layers", "--max-total", "2", "--size-bound", "12")
    assert code == 0 and r["disjoint"] is True and len(r["pairs"]) == 3


def test_builtin_terms(capsys):
    code, r = run_json(capsys, "reduce", "--strategy", "head", "--fuel", "1", "@A")
    assert code == 1 and r["status"] == "exhausted"
    code, r = run_json(capsys, "taylor", "--size-bound", "6", "@A*")
    assert code == 0 and r["lines"][0] == r"1 (\b.(b)1)1"


@pytest.mark.parametrize("argv", [
    ["reduce", "(x"],
    ["reduce", "--bogus", "x"],
    ["frobnicate"],
    ["coherent", "x", "[y]"],
    ["reduce", "@nonesuch"],
    ["reduce", "@A*"],
    ["--semiring", "tropical", "reduce", "x"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2
    assert capsys.readouterr().err


def test_output_is_byte_stable(capsys):
    argv = ["taylor", "--size-bound", "6", r"(\x.(x)x)y"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert a == b
    assert a == json.dumps(json.loads(a), sort_keys=True) + "\n"


def test_selftest_subset(capsys):
    code, r = run_json(capsys, "selftest", "--only", "1,7")
    assert code == 0 and r["failed"] == []
    assert [c["number"] for c in r["criteria"]] == [1, 7]


def test_selftest_mutation_fails_commutation(capsys):
    code, r = run_json(capsys, "selftest", "--only", "6", "--mutate")
    assert code == 1 and r["failed"] == [6]


def test_selftest_boolean_skips_mass(capsys):
    code, r = run_json(capsys, "--semiring", "bool", "selftest", "--only", "1,2,3")
    assert code == 0
    status = {c["number"]: c["status"] for c in r["criteria"]}
    assert status == {1: "pass", 2: "skipped", 3: "skipped"}


def test_dispatch_returns_report_and_code():
    report, code = dispatch(["reduce", r"(\x.x)y"])
    assert code == 0 and report["result"] == "y"
