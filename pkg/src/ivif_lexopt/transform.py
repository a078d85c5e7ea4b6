"""Reduction of an IVIF linear program to crisp staged linear programs.

Every fuzzy quantity ``c ⊙ x`` is expanded into nine affine expressions (mean
plus eight spreads) over the crisp unknowns of ``x``.  The expansion is only
affine once the signs of all support endpoints are known, which is what a
:class:`Branch` fixes: a sign per unrestricted crisp variable, a sign class per
unrestricted IVIFN variable and a chain pattern per inequality constraint.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .ivifn import Ivifn, LEVELS, LEVEL_ORDER
from .model import Constraint, Problem, VariableDecl
from .ranking import DEFAULT_PERM, KeyPermutation, spread_weights


class UnresolvedSelection(RuntimeError):
    """A min/max in a product cannot be decided from the branch alone."""

    def __init__(self, site):
        super().__init__(f"product selection at {site} is not fixed by the branch")
        self.site = site


class AffineExpr:
    """``constant + sum(coef * unknown)``."""

    __slots__ = ("constant", "terms")

    def __init__(self, constant: float = 0.0, terms: dict | None = None):
        self.constant = float(constant)
        self.terms = {k: float(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def var(cls, name: str, coef: float = 1.0) -> "AffineExpr":
        return cls(0.0, {name: coef})

    def __add__(self, other):
        if not isinstance(other, AffineExpr):
            return AffineExpr(self.constant + other, self.terms)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0.0) + v
        return AffineExpr(self.constant + other.constant, terms)

    __radd__ = __add__

    def __neg__(self):
        return AffineExpr(-self.constant, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c: float):
        c = float(c)
        return AffineExpr(self.constant * c, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __call__(self, assignment: dict) -> float:
        return self.constant + sum(v * assignment.get(k, 0.0) for k, v in self.terms.items())

    evaluate = __call__

    def is_constant(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.terms.values())

    def close_to(self, other: "AffineExpr", tol: float = 1e-9) -> bool:
        d = self - other
        return abs(d.constant) <= tol and d.is_constant(tol)

    def __repr__(self):
        parts = [f"{v:+g}*{k}" for k, v in sorted(self.terms.items())]
        return f"AffineExpr({self.constant:g} {' '.join(parts)})"


ZERO = AffineExpr()


def sum_exprs(exprs: Iterable[AffineExpr]) -> AffineExpr:
    out = AffineExpr()
    for e in exprs:
        out = out + e
    return out


@dataclass(frozen=True)
class LinearRow:
    terms: dict
    relation: str  # "<=", "=", ">="
    rhs: float
    label: str = ""

    @classmethod
    def of(cls, expr: AffineExpr, relation: str, label: str = "") -> "LinearRow":
        """Row ``expr REL 0``."""
        return cls(dict(expr.terms), relation, -expr.constant, label)

    def satisfied(self, assignment: dict, tol: float = 1e-7) -> bool:
        lhs = sum(v * assignment.get(k, 0.0) for k, v in self.terms.items())
        if self.relation == "<=":
            return lhs <= self.rhs + tol
        if self.relation == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol

    def __str__(self):
        return format_row(self)


def _num(v: float) -> str:
    return f"{v:.10g}"


def format_row(row: LinearRow) -> str:
    if row.terms:
        body = " + ".join(f"{_num(v)}*{k}" for k, v in sorted(row.terms.items()))
        body = body.replace("+ -", "- ")
    else:
        body = "0"
    return f"{body} {row.relation} {_num(row.rhs)}"


def dump(rows: Iterable[LinearRow]) -> str:
    """Text listing ``coeff*name ... REL rhs``, one row per line, with its label."""
    return "\n".join(f"{format_row(r)}    # {r.label}" if r.label else format_row(r) for r in rows)


# ---------------------------------------------------------------------------
# branches

@dataclass(frozen=True)
class Branch:
    signs: tuple = ()        # ((name, +1|-1), ...) for crisp-unrestricted variables
    classes: tuple = ()      # ((name, 1..10), ...) for ivifn-unrestricted variables
    patterns: tuple = ()     # ((constraint index, 0..7), ...) for leq/geq constraints
    selections: tuple = ()   # ((site, (min_choice, max_choice)), ...) straddle x straddle products
    id: int = field(default=-1, compare=False)

    def sign(self, name: str) -> int:
        return dict(self.signs)[name]

    def sign_class(self, var: VariableDecl) -> int:
        if var.kind == "ivifn-nonneg":
            return 1
        return dict(self.classes)[var.name]

    def pattern(self, i: int) -> int:
        return dict(self.patterns)[i]

    def selection(self, site):
        return dict(self.selections).get(site)

    def describe(self) -> str:
        parts = [f"{n}{'>=0' if s > 0 else '<=0'}" for n, s in self.signs]
        parts += [f"{n}:class{c}" for n, c in self.classes]
        parts += [f"c{i}:p{p}" for i, p in self.patterns]
        parts += [f"sel{site}:{ch}" for site, ch in self.selections]
        return ", ".join(parts) or "(trivial)"

    def with_id(self, i: int) -> "Branch":
        return Branch(self.signs, self.classes, self.patterns, self.selections, i)


# characteristic point indices (1-based) bounding each support level
_LEVEL_POINTS = {"mu_L": (4, 6), "mu_U": (3, 7), "nu_U": (2, 8), "nu_L": (1, 9)}

POS, NEG, STRADDLE = "pos", "neg", "straddle"


def coefficient_level_sign(lo: float, hi: float) -> str:
    if lo >= 0:
        return POS
    if hi <= 0:
        return NEG
    return STRADDLE


def variable_level_signs(var: VariableDecl, branch: Branch) -> dict:
    if var.kind == "crisp-nonneg":
        return dict.fromkeys(LEVEL_ORDER, POS)
    if var.kind == "crisp-unrestricted":
        return dict.fromkeys(LEVEL_ORDER, POS if branch.sign(var.name) > 0 else NEG)
    k = branch.sign_class(var)
    out = {}
    for lv, (i, j) in _LEVEL_POINTS.items():
        out[lv] = POS if i >= k else NEG if j < k else STRADDLE
    return out


def variable_components(var: VariableDecl) -> list:
    """Mean and eight spreads of the variable as affine expressions."""
    if var.is_ivifn:
        return [AffineExpr.var(u) for u in var.unknowns]
    return [AffineExpr.var(var.name)] + [ZERO] * 8


def _product_interval(p, q, u, v, xs, ys, site, branch):
    """Constant interval [p, q] times affine interval [u, v] with known sign categories."""
    if xs == POS:
        if ys == POS:
            return u * p, v * q
        if ys == NEG:
            return u * q, v * p
        return u * q, v * q
    if xs == NEG:
        if ys == POS:
            return v * p, u * q
        if ys == NEG:
            return v * q, u * p
        return v * p, u * p
    if ys == POS:
        return v * p, v * q
    if ys == NEG:
        return u * q, u * p
    choice = branch.selection(site)
    if choice is None:
        raise UnresolvedSelection(site)
    lo = v * p if choice[0] == 0 else u * q
    hi = u * p if choice[1] == 0 else v * q
    return lo, hi


def expand_term(coeff: Ivifn, var: VariableDecl, branch: Branch, site_key=None) -> list:
    """Nine affine expressions (mean, then the eight spreads) of ``coeff ⊙ var``."""
    comps = variable_components(var)
    mean = comps[0] * coeff.a
    out = [mean] + [ZERO] * 8
    vsigns = variable_level_signs(var, branch)
    for lv in LEVEL_ORDER:
        li, ri = LEVELS[lv]
        p, q = coeff.a - coeff.spreads[li], coeff.a + coeff.spreads[ri]
        u, v = comps[0] - comps[1 + li], comps[0] + comps[1 + ri]
        lo, hi = _product_interval(p, q, u, v, coefficient_level_sign(p, q), vsigns[lv],
                                   (site_key, var.name, lv), branch)
        out[1 + li] = mean - lo
        out[1 + ri] = hi - mean
    return out


def selection_rows(coeff: Ivifn, var: VariableDecl, site, choice) -> list:
    """Rows pinning which candidate product is the min and which is the max."""
    _, _, lv = site
    li, ri = LEVELS[lv]
    comps = variable_components(var)
    p, q = coeff.a - coeff.spreads[li], coeff.a + coeff.spreads[ri]
    u, v = comps[0] - comps[1 + li], comps[0] + comps[1 + ri]
    pv, qu, pu, qv = v * p, u * q, u * p, v * q
    rows = [LinearRow.of(pv - qu if choice[0] == 0 else qu - pv, "<=", f"select min {site}"),
            LinearRow.of(pu - qv if choice[1] == 0 else qv - pu, ">=", f"select max {site}")]
    return rows


def ambiguous_sites(problem: Problem, branch: Branch) -> list:
    """Sites ``(row key, variable, level)`` where both factors straddle zero."""
    sites = []
    rows = [("obj", problem.objective)] + [(i, c.coeffs) for i, c in enumerate(problem.constraints)]
    for key, coeffs in rows:
        for coeff, var in zip(coeffs, problem.variables):
            vs = variable_level_signs(var, branch)
            for lv in LEVEL_ORDER:
                li, ri = LEVELS[lv]
                p, q = coeff.a - coeff.spreads[li], coeff.a + coeff.spreads[ri]
                if coefficient_level_sign(p, q) == STRADDLE and vs[lv] == STRADDLE:
                    sites.append(((key, var.name, lv), coeff, var))
    return sites


def expand_sum(coeffs, variables, branch: Branch, site_key=None) -> list:
    total = [ZERO] * 9
    for c, v in zip(coeffs, variables):
        if c.is_crisp() and c.a == 0:
            continue
        total = [t + e for t, e in zip(total, expand_term(c, v, branch, site_key))]
    return total


def constant_components(x: Ivifn) -> list:
    return [AffineExpr(x.a)] + [AffineExpr(s) for s in x.spreads]


def key_exprs(components: list, shapes, perm: KeyPermutation = DEFAULT_PERM) -> tuple:
    """The seven key functions of an IVIFN whose components are affine expressions."""
    w = spread_weights(shapes)
    mean, s = components[0], components[1:]
    mu = sum_exprs(s[i] * w[i] for i in range(4))
    nu = sum_exprs(s[4 + i] * w[i] for i in range(4))
    raw = (mu - nu, mean * 2.0 + mu + nu, mean,
           mean - s[0], mean - s[2], mean - s[6], mean - s[4])
    return tuple(raw[i] for i in perm.indices)


def objective_key(problem: Problem, branch: Branch, perm: KeyPermutation = DEFAULT_PERM) -> tuple:
    comps = expand_sum(problem.objective, problem.variables, branch, "obj")
    return key_exprs(comps, problem.shapes, perm)


def objective_components(problem: Problem, branch: Branch) -> list:
    return expand_sum(problem.objective, problem.variables, branch, "obj")


def equality_rows(problem: Problem, i: int, branch: Branch) -> list:
    c = problem.constraints[i]
    lhs = expand_sum(c.coeffs, problem.variables, branch, i)
    rhs = constant_components(c.rhs)
    names = ("mean",) + tuple(("l_mu_L", "r_mu_L", "l_mu_U", "r_mu_U",
                               "l_nu_L", "r_nu_L", "l_nu_U", "r_nu_U"))
    return [LinearRow.of(l - r, "=", f"c{i} eq {nm}") for l, r, nm in zip(lhs, rhs, names)]


def key_differences(problem: Problem, i: int, branch: Branch,
                    perm: KeyPermutation = DEFAULT_PERM) -> tuple:
    """Seven expressions that must be lexicographically >= 0 for constraint i to hold."""
    c = problem.constraints[i]
    lhs = key_exprs(expand_sum(c.coeffs, problem.variables, branch, i), problem.shapes, perm)
    rhs = key_exprs(constant_components(c.rhs), problem.shapes, perm)
    if c.relation == "leq":
        return tuple(r - l for l, r in zip(lhs, rhs))
    return tuple(l - r for l, r in zip(lhs, rhs))


def chain(p: int) -> tuple:
    """Binary chain vector 0^p 1^(7-p)."""
    return (0,) * p + (1,) * (7 - p)


def lex_rows_from_diffs(diffs, p: int, k: float, K: float, mode: str = "resolved",
                        label: str = "") -> list:
    if not 0 <= p <= 7:
        raise ValueError(f"chain pattern must be in 0..7, got {p}")
    rows = []
    if mode == "resolved":
        for s in range(p):
            rows.append(LinearRow.of(diffs[s], "=", f"{label} d{s + 1}=0"))
        if p < 7:
            rows.append(LinearRow.of(diffs[p] - k, ">=", f"{label} d{p + 1}>=k"))
        return rows
    if mode != "bigm":
        raise ValueError(f"unknown mode {mode!r}")
    z = chain(p)
    for s in range(7):
        lower = -K * sum(z[:s]) + k * z[s]
        rows.append(LinearRow.of(diffs[s] - lower, ">=", f"{label} bigM lower {s + 1}"))
        rows.append(LinearRow.of(diffs[s] - K * z[s], "<=", f"{label} bigM upper {s + 1}"))
    return rows


def lex_rows(problem: Problem, i: int, branch: Branch, k: float, K: float,
             mode: str = "resolved", perm: KeyPermutation = DEFAULT_PERM) -> list:
    diffs = key_differences(problem, i, branch, perm)
    return lex_rows_from_diffs(diffs, branch.pattern(i), k, K, mode, f"c{i}")


def variable_rows(var: VariableDecl, branch: Branch) -> list:
    if var.kind == "crisp-nonneg":
        return [LinearRow({var.name: 1.0}, ">=", 0.0, f"{var.name}>=0")]
    if var.kind == "crisp-unrestricted":
        s = branch.sign(var.name)
        return [LinearRow({var.name: 1.0}, ">=" if s > 0 else "<=", 0.0,
                          f"{var.name}{'>=' if s > 0 else '<='}0")]
    c = variable_components(var)
    rows = []
    names = var.unknowns
    from .ivifn import NESTING_PAIRS
    for small, large in NESTING_PAIRS:
        rows.append(LinearRow.of(c[1 + large] - c[1 + small], ">=",
                                 f"{names[1 + large]}>={names[1 + small]}"))
    for j in range(1, 9):
        rows.append(LinearRow.of(c[j], ">=", f"{names[j]}>=0"))
    k = branch.sign_class(var)
    mean, s = c[0], c[1:]
    points = (mean - s[4], mean - s[6], mean - s[2], mean - s[0], mean,
              mean + s[1], mean + s[3], mean + s[7], mean + s[5])
    if var.kind == "ivifn-nonneg":
        rows.append(LinearRow.of(points[0], ">=", f"{var.name} non-negative"))
        return rows
    if k >= 2:
        rows.append(LinearRow.of(points[k - 2], "<=", f"{var.name} class {k}: point {k - 1}<=0"))
    if k <= 9:
        rows.append(LinearRow.of(points[k - 1], ">=", f"{var.name} class {k}: point {k}>=0"))
    return rows


def branch_rows(problem: Problem, branch: Branch, mode: str = "resolved",
                perm: KeyPermutation = DEFAULT_PERM, k: float | None = None,
                K: float | None = None) -> list:
    """All constraint rows of one branch: equalities, lexicographic rows, variable rows."""
    params = problem.solver_params
    k = params.k if k is None else k
    K = params.K if K is None else K
    rows = []
    for i, c in enumerate(problem.constraints):
        if c.relation == "eq":
            rows += equality_rows(problem, i, branch)
        else:
            rows += lex_rows(problem, i, branch, k, K, mode, perm)
    for v in problem.variables:
        rows += variable_rows(v, branch)
    if branch.selections:
        coeffs = {("obj", v.name): c for c, v in zip(problem.objective, problem.variables)}
        for i, con in enumerate(problem.constraints):
            coeffs.update({(i, v.name): c for c, v in zip(con.coeffs, problem.variables)})
        for site, choice in branch.selections:
            key, name, _ = site
            rows += selection_rows(coeffs[(key, name)], problem.variable(name), site, choice)
    return rows


@dataclass
class StagedLp:
    stage: int
    objective: AffineExpr
    rows: list
    carried: list

    @property
    def all_rows(self) -> list:
        return self.rows + self.carried


def staged_lp(rows: list, key: tuple, t: int, carried_optima, lex_slack: float) -> StagedLp:
    """Stage t (1-based): maximise key[t-1] with earlier keys held near their optima."""
    if len(carried_optima) != t - 1:
        raise ValueError("need exactly t-1 carried optima")
    carried = [LinearRow.of(key[s] - (opt - lex_slack), ">=", f"stage {s + 1} carry")
               for s, opt in enumerate(carried_optima)]
    return StagedLp(t, key[t - 1], rows, carried)
