import json
import math
from dataclasses import replace

import pytest

from ivif_lexopt.ivifn import Ivifn, ShapeSpec, scalar_mul, validate
from ivif_lexopt.model import (
    Constraint, DimensionMismatch, InvalidIvifn, MalformedJson, Problem, SchemaError, Solution,
    SolverParams, VariableDecl, from_dict, load, normalize, parse, serialize, to_dict,
    validate_problem,
)


def small_doc(**kw):
    doc = {
        "sense": "max",
        "objective": ["(5;2,2,3,3;5,5,5,4)", 1],
        "variables": [{"name": "x", "kind": "crisp-nonneg"}, {"name": "y", "kind": "ivifn-unrestricted"}],
        "constraints": [{"coeffs": [1, 2], "relation": "leq", "rhs": 10}],
    }
    doc.update(kw)
    return doc


def test_load_example(example_problem):
    p = example_problem
    assert [v.kind for v in p.variables] == ["crisp-unrestricted"] * 2
    assert [c.relation for c in p.constraints] == ["eq", "leq"]
    assert p.solver_params == SolverParams()
    assert validate_problem(p) == []


def test_load_bicycle(bicycle_problem):
    assert validate_problem(bicycle_problem) == []
    assert bicycle_problem.variable("y1").kind == "ivifn-unrestricted"
    assert bicycle_problem.variable("x1").unknowns[1] == "x1.lmuL"


def test_empty_constraints_ok():
    p = from_dict(small_doc(constraints=[]))
    assert p.constraints == ()


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        from_dict(small_doc(constraints=[{"coeffs": [1], "relation": "eq", "rhs": 1}]))
    with pytest.raises(DimensionMismatch):
        from_dict(small_doc(objective=[1]))


def test_schema_errors():
    with pytest.raises(SchemaError):
        from_dict({"sense": "max"})
    with pytest.raises(SchemaError):
        from_dict(small_doc(sense="maximise"))
    with pytest.raises(SchemaError):
        from_dict(small_doc(variables=[{"name": "x", "kind": "integer"}, {"name": "y", "kind": "crisp-nonneg"}]))
    with pytest.raises(SchemaError):
        from_dict(small_doc(variables=[{"name": "x", "kind": "crisp-nonneg"}] * 2))
    with pytest.raises(SchemaError):
        from_dict(small_doc(constraints=[{"coeffs": [1, 1], "relation": "lt", "rhs": 1}]))
    with pytest.raises(SchemaError):
        from_dict(small_doc(solver={"k": 1, "K": 0.5}))
    with pytest.raises(SchemaError):
        from_dict(small_doc(solver={"M": 3}))


def test_invalid_ivifn():
    with pytest.raises(InvalidIvifn, match="objective"):
        from_dict(small_doc(objective=["(5;3,2,2,3;5,5,5,4)", 1]))


def test_malformed_json():
    with pytest.raises(MalformedJson):
        parse("{not json")


def test_roundtrip(example_path):
    p = load(example_path)
    q = parse(serialize(p))
    assert q == p
    doc = small_doc(sense="min")
    p = from_dict(doc)
    assert parse(serialize(p)) == p
    assert to_dict(p)["sense"] == "min"


def test_min_normalisation():
    p = from_dict(small_doc(sense="min"))
    assert p.sense == "max" and p.original_sense == "min"
    assert p.objective[0] == scalar_mul(-1, Ivifn.from_json("(5;2,2,3,3;5,5,5,4)"))
    assert normalize(p) is p
    raw = from_dict(small_doc(sense="min"), normalize_sense=False)
    assert raw.sense == "min"


def test_shape_mixing_diagnostic():
    odd = ShapeSpec.custom("sq", lambda t: max(0.0, 1 - t) ** 2, lambda al: 1 - math.sqrt(al))
    p = from_dict(small_doc())
    c = validate(1, [0] * 8, shapes=(odd,) * 4)
    q = replace(p, objective=(c, p.objective[1]))
    assert any(d.startswith("ShapeMixing") for d in validate_problem(q))


def test_solver_params_validation():
    with pytest.raises(SchemaError):
        SolverParams(k=0)
    with pytest.raises(SchemaError):
        SolverParams(lex_slack=-1)


def test_solution_json_roundtrip():
    s = Solution({"x": Ivifn.crisp(2)}, Ivifn.crisp(4), (0,) * 7, {"branches": 1})
    back = Solution.from_json(json.loads(json.dumps(s.to_json())))
    assert back.variables == s.variables and back.objective == s.objective
    assert "x = (2;0,0,0,0;0,0,0,0)" in s.summary()


def test_variable_decl():
    assert VariableDecl("z", "crisp-nonneg").unknowns == ("z",)
    assert len(VariableDecl("z", "ivifn-nonneg").unknowns) == 9
