import csv
import json

import pytest

from ivif_lexopt.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


def small_model(relations, kind="crisp-nonneg", obj_spreads=(0,) * 8):
    return {
        "sense": "max",
        "objective": [{"a": 1, "spreads": list(obj_spreads)}],
        "variables": [{"name": "x1", "kind": kind}],
        "constraints": [{"coeffs": [{"a": 1, "spreads": [0] * 8}], "relation": rel,
                         "rhs": {"a": v, "spreads": [0] * 8}} for rel, v in relations],
    }


def test_solve_report(capsys, example_path):
    code, out, _ = run(capsys, "solve", example_path)
    assert code == 0
    assert "status: optimal" in out
    assert "objective = (10;25,25,40,40;70,70,65,50)" in out
    assert "x1 = (10;0,0,0,0;0,0,0,0)" in out
    assert "x2 = (-5;0,0,0,0;0,0,0,0)" in out
    assert "branches: 32" in out


def test_solve_json(capsys, example_path):
    code, out, _ = run(capsys, "solve", example_path, "--json", "--trace")
    assert code == 0
    doc = json.loads(out)
    assert doc["stage_optima"] == pytest.approx([1.875, 18.125, 10, -15, -30, -55, -60], abs=1e-6)
    assert len(doc["trace"]) == 7


def test_solve_bigm_flag(capsys, example_path):
    code, out, _ = run(capsys, "solve", example_path, "--mode", "bigm", "--K", "5000")
    assert code == 0 and "objective = (10;25,25,40,40;70,70,65,50)" in out


def test_solve_stdin(capsys, monkeypatch, example_path):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(open(example_path).read()))
    assert run(capsys, "solve", "-")[0] == 0


def test_exit_bad_json(capsys, tmp_path):
    code, _, err = run(capsys, "solve", write(tmp_path, "bad.json", "{not json"))
    assert code == 1 and "error" in err


def test_exit_missing_file(capsys, tmp_path):
    assert run(capsys, "solve", str(tmp_path / "nope.json"))[0] == 1


def test_exit_bad_flag(capsys):
    assert run(capsys, "solve", "--mode", "nope")[0] == 1


def test_exit_infeasible(capsys, tmp_path):
    path = write(tmp_path, "inf.json", small_model([("geq", 5), ("leq", 2)]))
    code, out, _ = run(capsys, "solve", path)
    assert code == 2 and "infeasible" in out


def test_exit_unbounded(capsys, tmp_path):
    path = write(tmp_path, "unb.json", small_model([("geq", 0)], obj_spreads=(0, 1, 0, 1, 1, 1, 1, 1)))
    code, out, _ = run(capsys, "solve", path)
    assert code == 3 and "unbounded" in out


def test_branch_cap(capsys, example_path):
    assert run(capsys, "solve", example_path, "--branch-cap", "4")[0] == 1


def test_rank(capsys):
    code, out, _ = run(capsys, "rank", "(100;25,35,50,50;80,100,50,50)", "(150;50,60,50,70;120,100,80,70)")
    assert code == 0 and out.strip().endswith("x ≺ y")
    assert "key (-1.25, 203.75, 100, 75, 50, 50, 20)" in out
    code, out, _ = run(capsys, "rank", "(5;2,2,3,3;5,5,5,4)", "(8;1,1,2,2;4,4,2,3)")
    assert out.strip().endswith("x ≻ y")  # S decides: 1/8 against -1/8
    code, out, _ = run(capsys, "rank", "3", "3")
    assert out.strip().endswith("x = y")


def test_rank_bad_number(capsys):
    assert run(capsys, "rank", "(1;2,3)", "1")[0] == 1


def test_rank_other_shape(capsys):
    other = json.dumps({"a": 1, "spreads": [0] * 8, "shape": "exp"})
    assert run(capsys, "rank", other, "1")[0] == 1


def test_eval(capsys, tmp_path):
    doc = {"numbers": {"a": "(5;2,2,3,3;5,5,5,4)", "b": "(8;1,1,2,2;4,4,2,3)"},
           "ops": [{"op": "mul", "args": ["a", "b"], "out": "c"}], "result": "c"}
    code, out, _ = run(capsys, "eval", write(tmp_path, "ops.json", doc))
    assert code == 0 and out.strip() == "(40;19,23,28,40;40,80,40,59)"


def test_eval_chain(capsys, tmp_path):
    doc = {"numbers": {"a": "(5;2,2,3,3;5,5,5,4)", "b": "(8;1,1,2,2;4,4,2,3)"},
           "ops": [{"op": "sub", "args": ["b", "a"], "out": "d"},
                   {"op": "smul", "args": [2, "d"], "out": "e"}]}
    code, out, _ = run(capsys, "eval", write(tmp_path, "ops.json", doc))
    assert code == 0 and out.strip() == "(6;6,6,10,10;18,18,12,16)"


def test_eval_undefined(capsys, tmp_path):
    doc = {"numbers": {}, "ops": [{"op": "add", "args": ["p", "q"]}]}
    assert run(capsys, "eval", write(tmp_path, "ops.json", doc))[0] == 1


def test_plot(capsys, tmp_path):
    out_path = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "plot", "(5;2,2,3,3;5,5,5,4)", "--samples", "51", "-o", str(out_path))
    assert code == 0
    rows = list(csv.reader(out_path.open()))
    assert rows[0] == ["x", "mu_L", "mu_U", "nu_L", "nu_U"]
    data = [[float(v) for v in r] for r in rows[1:]]
    assert len(data) == 51
    xs = [r[0] for r in data]
    assert all(a < b for a, b in zip(xs, xs[1:]))
    for _, muL, muU, nuL, nuU in data:
        assert all(0 <= v <= 1 for v in (muL, muU, nuL, nuU))
        assert muL <= muU + 1e-12 and nuL <= nuU + 1e-12


def test_plot_bad_samples(capsys):
    assert run(capsys, "plot", "1", "--samples", "1")[0] == 1
