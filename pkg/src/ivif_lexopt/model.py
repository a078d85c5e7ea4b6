"""Problem representation and JSON ingestion for fully IVIF linear programs."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .ivifn import Ivifn, IvifnError, scalar_mul, format_ivifn

VARIABLE_KINDS = ("crisp-nonneg", "crisp-unrestricted", "ivifn-nonneg", "ivifn-unrestricted")
RELATIONS = ("eq", "leq", "geq")
SENSES = ("max", "min")

COMPONENT_SUFFIXES = ("a", "lmuL", "rmuL", "lmuU", "rmuU", "lnuL", "rnuL", "lnuU", "rnuU")


class ModelError(ValueError):
    pass


class SchemaError(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


class InvalidIvifn(ModelError):
    pass


class MalformedJson(ModelError):
    pass


@dataclass(frozen=True)
class SolverParams:
    k: float = 1e-4
    K: float = 1000.0
    lp_tol: float = 1e-9
    lex_slack: float = 1e-6

    def __post_init__(self):
        if not (self.k > 0 and self.K > 0):
            raise SchemaError("k and K must be positive")
        if not self.k < self.K:
            raise SchemaError("need k < K")
        if self.lp_tol <= 0 or self.lex_slack < 0:
            raise SchemaError("lp_tol must be positive and lex_slack non-negative")


@dataclass(frozen=True)
class VariableDecl:
    name: str
    kind: str

    @property
    def is_ivifn(self) -> bool:
        return self.kind.startswith("ivifn")

    @property
    def unknowns(self) -> tuple:
        """Names of the crisp unknowns standing for this variable."""
        if self.is_ivifn:
            return tuple(f"{self.name}.{s}" for s in COMPONENT_SUFFIXES)
        return (self.name,)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Ivifn


@dataclass(frozen=True)
class Problem:
    sense: str
    objective: tuple
    variables: tuple
    constraints: tuple = ()
    solver_params: SolverParams = field(default_factory=SolverParams)
    # sense and objective as given, before min -> max negation
    original_sense: str | None = None
    original_objective: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def shapes(self):
        for c in self.objective:
            return c.shapes
        for con in self.constraints:
            return con.rhs.shapes
        from .ivifn import LINEAR_SHAPES
        return LINEAR_SHAPES

    def variable(self, name: str) -> VariableDecl:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)


@dataclass
class Solution:
    variables: dict
    objective: Ivifn
    stage_optima: tuple
    branch_stats: dict
    sense: str = "max"
    assignment: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    winning_branch: object = None

    def to_json(self) -> dict:
        return {
            "sense": self.sense,
            "variables": {k: v.to_json() for k, v in self.variables.items()},
            "objective": self.objective.to_json(),
            "stage_optima": list(self.stage_optima),
            "branch_stats": dict(self.branch_stats),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Solution":
        return cls(
            variables={k: Ivifn.from_json(v) for k, v in obj["variables"].items()},
            objective=Ivifn.from_json(obj["objective"]),
            stage_optima=tuple(obj["stage_optima"]),
            branch_stats=dict(obj.get("branch_stats", {})),
            sense=obj.get("sense", "max"),
        )

    def summary(self) -> str:
        lines = [f"objective: {format_ivifn(self.objective)}"]
        for name, v in self.variables.items():
            lines.append(f"{name} = {format_ivifn(v)}")
        return "\n".join(lines)


def _ivifn(obj, where: str) -> Ivifn:
    try:
        return Ivifn.from_json(obj)
    except IvifnError as exc:
        raise InvalidIvifn(f"{where}: {exc}") from exc


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    return obj[key]


def normalize(p: Problem) -> Problem:
    """Turn a min problem into max by negating every objective coefficient."""
    if p.original_sense is not None:
        return p
    if p.sense == "max":
        return replace(p, original_sense="max", original_objective=p.objective)
    return replace(p, sense="max", objective=tuple(scalar_mul(-1.0, c) for c in p.objective),
                   original_sense="min", original_objective=p.objective)


def from_dict(doc: dict, *, normalize_sense: bool = True) -> Problem:
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    sense = _require(doc, "sense", "problem")
    if sense not in SENSES:
        raise SchemaError(f"sense must be 'max' or 'min', got {sense!r}")
    raw_vars = _require(doc, "variables", "problem")
    if not isinstance(raw_vars, list):
        raise SchemaError("'variables' must be a list")
    variables = []
    for i, v in enumerate(raw_vars):
        name = _require(v, "name", f"variables[{i}]")
        kind = _require(v, "kind", f"variables[{i}]")
        if not isinstance(name, str) or not name:
            raise SchemaError(f"variables[{i}]: name must be a non-empty string")
        if kind not in VARIABLE_KINDS:
            raise SchemaError(f"variables[{i}]: unknown kind {kind!r}")
        variables.append(VariableDecl(name, kind))
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise SchemaError("variable names must be unique")
    n = len(variables)

    raw_obj = _require(doc, "objective", "problem")
    if not isinstance(raw_obj, list):
        raise SchemaError("'objective' must be a list")
    if len(raw_obj) != n:
        raise DimensionMismatch(f"objective has {len(raw_obj)} coefficients for {n} variables")
    objective = tuple(_ivifn(c, f"objective[{j}]") for j, c in enumerate(raw_obj))

    constraints = []
    raw_cons = doc.get("constraints", [])
    if not isinstance(raw_cons, list):
        raise SchemaError("'constraints' must be a list")
    for i, c in enumerate(raw_cons):
        where = f"constraints[{i}]"
        coeffs = _require(c, "coeffs", where)
        rel = _require(c, "relation", where)
        rhs = _require(c, "rhs", where)
        if rel not in RELATIONS:
            raise SchemaError(f"{where}: relation must be one of {RELATIONS}, got {rel!r}")
        if not isinstance(coeffs, list):
            raise SchemaError(f"{where}: 'coeffs' must be a list")
        if len(coeffs) != n:
            raise DimensionMismatch(f"{where}: {len(coeffs)} coefficients for {n} variables")
        constraints.append(Constraint(
            tuple(_ivifn(a, f"{where}.coeffs[{j}]") for j, a in enumerate(coeffs)),
            rel, _ivifn(rhs, f"{where}.rhs")))

    raw_params = doc.get("solver", {}) or {}
    if not isinstance(raw_params, dict):
        raise SchemaError("'solver' must be an object")
    unknown = set(raw_params) - {"k", "K", "lp_tol", "lex_slack"}
    if unknown:
        raise SchemaError(f"unknown solver parameters: {sorted(unknown)}")
    try:
        params = SolverParams(**{k: float(v) for k, v in raw_params.items()})
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"solver: {exc}") from exc

    p = Problem(sense, objective, tuple(variables), tuple(constraints), params)
    return normalize(p) if normalize_sense else p


def parse(text: str, **kw) -> Problem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"malformed JSON: {exc}") from exc
    return from_dict(doc, **kw)


def load(path) -> Problem:
    with open(path) as fh:
        return parse(fh.read())


def to_dict(p: Problem) -> dict:
    """Serialise using the original sense and objective."""
    objective = p.original_objective if p.original_objective is not None else p.objective
    sense = p.original_sense or p.sense
    return {
        "sense": sense,
        "objective": [c.to_json() for c in objective],
        "variables": [{"name": v.name, "kind": v.kind} for v in p.variables],
        "constraints": [{"coeffs": [a.to_json() for a in c.coeffs], "relation": c.relation,
                         "rhs": c.rhs.to_json()} for c in p.constraints],
        "solver": {"k": p.solver_params.k, "K": p.solver_params.K,
                   "lp_tol": p.solver_params.lp_tol, "lex_slack": p.solver_params.lex_slack},
    }


def serialize(p: Problem) -> str:
    return json.dumps(to_dict(p), indent=2)


def validate_problem(p: Problem) -> list[str]:
    """Diagnostics for combinations this solver does not handle; empty when solvable."""
    out = []
    numbers = list(p.objective) + [a for c in p.constraints for a in c.coeffs] + [c.rhs for c in p.constraints]
    shape_sets = {x.shapes for x in numbers}
    if len(shape_sets) > 1:
        out.append("ShapeMixing: numbers use different shape functions")
    if len(p.objective) != p.n:
        out.append("DimensionMismatch: objective length differs from variable count")
    for i, c in enumerate(p.constraints):
        if len(c.coeffs) != p.n:
            out.append(f"DimensionMismatch: constraint {i} has {len(c.coeffs)} coefficients")
    return out
