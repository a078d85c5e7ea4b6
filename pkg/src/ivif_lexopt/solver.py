"""Branch enumeration and the seven-stage lexicographic solve."""
from __future__ import annotations

import itertools
import logging
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .ivifn import Ivifn, add, mul, validate
from .lp import LpInstance, LpOutcome, OPTIMAL, UNBOUNDED, solve_lp
from .model import Problem, Solution
from .ranking import DEFAULT_PERM, KeyPermutation, compare, lex_key
from .transform import (AffineExpr, Branch, LinearRow, ambiguous_sites, branch_rows,
                        objective_key, staged_lp)

log = logging.getLogger(__name__)

DEFAULT_BRANCH_CAP = 10 ** 6
THREADS_ENV = "IVIF_LEXOPT_THREADS"
SELECTION_CHOICES = ((0, 0), (0, 1), (1, 0), (1, 1))


class SolverError(RuntimeError):
    pass


class Infeasible(SolverError):
    pass


class AllBranchesInfeasible(Infeasible):
    pass


class Unbounded(SolverError):
    pass


class UnboundedAtStage(Unbounded):
    def __init__(self, stage: int, label: str = ""):
        super().__init__(f"stage {stage} ({label}) is unbounded after bounded earlier stages")
        self.stage = stage


class BranchBudgetExceeded(SolverError):
    pass


# ---------------------------------------------------------------------------
# enumeration

def branch_factors(p: Problem) -> tuple[int, int, int]:
    """(u, v, w): unrestricted crisp vars, unrestricted ivifn vars, inequality rows."""
    u = sum(v.kind == "crisp-unrestricted" for v in p.variables)
    v = sum(v.kind == "ivifn-unrestricted" for v in p.variables)
    w = sum(c.relation != "eq" for c in p.constraints)
    return u, v, w


def branch_count(p: Problem) -> int:
    u, v, w = branch_factors(p)
    return 2 ** u * 10 ** v * 8 ** w


def enumerate_branches(p: Problem, cap: int = DEFAULT_BRANCH_CAP):
    """Yield every branch in a fixed order, ids counting from 0.

    Products where both the coefficient level and the variable level straddle
    zero get one sub-branch per (min, max) candidate choice.
    """
    n = branch_count(p)
    if n > cap:
        raise BranchBudgetExceeded(f"{n} branches exceed the cap of {cap}")
    crisp_u = [v.name for v in p.variables if v.kind == "crisp-unrestricted"]
    ivif_u = [v.name for v in p.variables if v.kind == "ivifn-unrestricted"]
    ineq = [i for i, c in enumerate(p.constraints) if c.relation != "eq"]
    next_id = 0
    for signs in itertools.product((1, -1), repeat=len(crisp_u)):
        for classes in itertools.product(range(1, 11), repeat=len(ivif_u)):
            for pats in itertools.product(range(8), repeat=len(ineq)):
                base = Branch(tuple(zip(crisp_u, signs)), tuple(zip(ivif_u, classes)),
                              tuple(zip(ineq, pats)))
                sites = [s for s, _, _ in ambiguous_sites(p, base)]
                if not sites:
                    yield base.with_id(next_id)
                    next_id += 1
                    continue
                for choice in itertools.product(SELECTION_CHOICES, repeat=len(sites)):
                    b = Branch(base.signs, base.classes, base.patterns, tuple(zip(sites, choice)))
                    yield b.with_id(next_id)
                    next_id += 1


@dataclass
class PreparedBranch:
    branch: Branch
    rows: list
    key: tuple


def prepare(p: Problem, branch: Branch, mode: str = "resolved",
            perm: KeyPermutation = DEFAULT_PERM) -> PreparedBranch:
    return PreparedBranch(branch, branch_rows(p, branch, mode, perm), objective_key(p, branch, perm))


# ---------------------------------------------------------------------------
# stages

@dataclass
class StageRecord:
    stage: int
    label: str
    optimum: float
    winning_branch: int
    feasible: int

    def to_json(self) -> dict:
        return {"stage": self.stage, "key": self.label, "optimum": self.optimum,
                "winning_branch": self.winning_branch, "feasible_branches": self.feasible}


@dataclass
class StageTrace:
    stages: list = field(default_factory=list)

    @property
    def optima(self) -> tuple:
        return tuple(s.optimum for s in self.stages)

    def to_json(self) -> list:
        return [s.to_json() for s in self.stages]


def _solve_one(task) -> LpOutcome:
    rows, key, t, carried, lex_slack, lp_tol = task
    st = staged_lp(rows, key, t, carried, lex_slack)
    return solve_lp(LpInstance(st.objective, st.all_rows), lp_tol)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
        return 1


def solve_stage(p: Problem, branches, t: int, carried_optima, *, lp_tol: float | None = None,
                lex_slack: float | None = None, pool=None):
    """Solve stage t on every branch. Returns (optimum, {branch id: LpOutcome}).

    The optimum is None when no branch is feasible.
    """
    params = p.solver_params
    lp_tol = params.lp_tol if lp_tol is None else lp_tol
    lex_slack = params.lex_slack if lex_slack is None else lex_slack
    carried = tuple(carried_optima)
    tasks = [(b.rows, b.key, t, carried, lex_slack, lp_tol) for b in branches]
    if pool is not None and len(tasks) > 1:
        chunk = max(1, len(tasks) // (4 * pool._max_workers))
        results = list(pool.map(_solve_one, tasks, chunksize=chunk))
    else:
        results = [_solve_one(task) for task in tasks]
    outcomes = {b.branch.id: r for b, r in zip(branches, results)}
    values = [r.value for r in results if r.status == OPTIMAL]
    return (max(values) if values else None), outcomes


def _assemble(p: Problem, assignment: dict) -> dict:
    out = {}
    for v in p.variables:
        if v.is_ivifn:
            vals = [assignment.get(u, 0.0) for u in v.unknowns]
            x = validate(vals[0], vals[1:], p.shapes, tol=1e-6)
            out[v.name] = x
        else:
            out[v.name] = Ivifn.crisp(assignment.get(v.name, 0.0), p.shapes)
    return out


def evaluate_objective(coeffs, values: dict, variables, shapes) -> Ivifn:
    total = Ivifn.crisp(0.0, shapes)
    for c, v in zip(coeffs, variables):
        total = add(total, mul(c, values[v.name]))
    return total


def solve(p: Problem, *, mode: str = "resolved", perm: KeyPermutation = DEFAULT_PERM,
          branch_cap: int = DEFAULT_BRANCH_CAP, workers: int | None = None) -> Solution:
    """Run every stage over all branches and build the winning IVIF solution.

    ``p`` is expected to be normalised to max sense (``model.from_dict`` does this).
    """
    from .model import normalize
    p = normalize(p)
    params = p.solver_params
    workers = worker_count() if workers is None else max(1, int(workers))

    prepared = [prepare(p, b, mode, perm) for b in enumerate_branches(p, branch_cap)]
    n_total = len(prepared)
    trace = StageTrace()
    optima = []
    alive = prepared
    last = {}
    lp_solves = 0
    labels = perm.order
    pool = ProcessPoolExecutor(workers) if workers > 1 and n_total > 1 else None
    try:
        for t in range(1, 8):
            opt, outcomes = solve_stage(p, alive, t, optima, pool=pool)
            lp_solves += len(alive)
            unbounded = [i for i, r in outcomes.items() if r.status == UNBOUNDED]
            if unbounded:
                if t == 1:
                    raise Unbounded(f"key {labels[0]} is unbounded (branch {min(unbounded)})")
                raise UnboundedAtStage(t, labels[t - 1])
            if opt is None:
                if t == 1:
                    raise AllBranchesInfeasible("no branch admits a feasible point")
                # cannot happen in exact arithmetic: the stage t-1 argmax is feasible here
                raise Infeasible(f"all branches became infeasible at stage {t}")
            keep = [b for b in alive if outcomes[b.branch.id].status == OPTIMAL
                    and outcomes[b.branch.id].value >= opt - params.lex_slack]
            feasible = sum(r.status == OPTIMAL for r in outcomes.values())
            winner = min(b.branch.id for b in keep)
            trace.stages.append(StageRecord(t, labels[t - 1], opt, winner, feasible))
            log.info("stage %d (%s): optimum %.10g, %d feasible, %d kept",
                     t, labels[t - 1], opt, feasible, len(keep))
            optima.append(opt)
            alive = keep
            last = outcomes
    finally:
        if pool is not None:
            pool.shutdown()

    win = min(alive, key=lambda b: b.branch.id)
    assignment = last[win.branch.id].assignment
    values = _assemble(p, assignment)
    coeffs = p.original_objective if p.original_objective is not None else p.objective
    objective = evaluate_objective(coeffs, values, p.variables, p.shapes)
    stats = {
        "branches": n_total,
        "base_branches": branch_count(p),
        "feasible_stage1": trace.stages[0].feasible,
        "ties": len(alive),
        "lp_solves": lp_solves,
        "mode": mode,
        "winner": win.branch.id,
        "winner_branch": win.branch.describe(),
    }
    return Solution(values, objective, tuple(optima), stats, p.original_sense or p.sense,
                    dict(assignment), trace.stages, win.branch)


# ---------------------------------------------------------------------------
# certification

def fuzzy_feasible(p: Problem, values: dict, tol: float = 1e-6) -> bool:
    """Check a candidate against the fuzzy constraints and variable kinds directly."""
    for v in p.variables:
        x = values[v.name]
        if v.kind == "crisp-nonneg" and x.a < -tol:
            return False
        if v.kind == "ivifn-nonneg" and x.a - x.l_nu_L < -tol:
            return False
    for c in p.constraints:
        lhs = evaluate_objective(c.coeffs, values, p.variables, p.shapes)
        if c.relation == "eq":
            if abs(lhs.a - c.rhs.a) > tol or any(abs(s - r) > tol for s, r in zip(lhs.spreads, c.rhs.spreads)):
                return False
        elif c.relation == "leq":
            if compare(lhs, c.rhs, tol=tol) > 0:
                return False
        elif compare(lhs, c.rhs, tol=tol) < 0:
            return False
    return True


@dataclass
class CertifyReport:
    checked: int = 0
    skipped: int = 0
    violators: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violators


def _as_values(p: Problem, cand: dict):
    out = {}
    for v in p.variables:
        x = cand[v.name]
        out[v.name] = x if isinstance(x, Ivifn) else Ivifn.crisp(float(x), p.shapes)
    return out


def certify(p: Problem, s: Solution, samples: int = 200, *, seed: int = 0, candidates=(),
            mode: str = "resolved", perm: KeyPermutation = DEFAULT_PERM,
            tol: float = 1e-5) -> CertifyReport:
    """Look for feasible points whose objective beats ``s`` in the lexicographic order.

    Explicit ``candidates`` (dicts name -> Ivifn or float) are checked first, then
    ``samples`` random vertices of random branches and perturbations of ``s``.
    """
    from .model import normalize
    p = normalize(p)
    rng = random.Random(seed)
    best = evaluate_objective(p.objective, s.variables, p.variables, p.shapes)
    report = CertifyReport()

    def check(values):
        if not fuzzy_feasible(p, values):
            report.skipped += 1
            return
        report.checked += 1
        z = evaluate_objective(p.objective, values, p.variables, p.shapes)
        if compare(z, best, perm, tol) > 0:
            report.violators.append({k: str(v) for k, v in values.items()})

    for cand in candidates:
        check(_as_values(p, cand))
    if samples <= 0:
        return report
    branches = list(enumerate_branches(p))
    unknowns = [u for v in p.variables for u in v.unknowns]
    for i in range(samples):
        if i % 2 == 0:
            b = prepare(p, branches[rng.randrange(len(branches))], mode, perm)
            direction = AffineExpr(0.0, {u: rng.uniform(-1, 1) for u in unknowns})
            out = solve_lp(LpInstance(direction, b.rows + list(_box(unknowns))))
            if out.status != OPTIMAL:
                report.skipped += 1
                continue
            assignment = out.assignment
        else:
            assignment = {u: val + rng.gauss(0, 0.05 * (1 + abs(val)))
                          for u, val in s.assignment.items()}
        try:
            values = _assemble(p, assignment)
        except ValueError:
            report.skipped += 1
            continue
        check(values)
    return report


def _box(unknowns, bound: float = 1e6):
    for u in unknowns:
        yield LinearRow({u: 1.0}, "<=", bound, "box")
        yield LinearRow({u: 1.0}, ">=", -bound, "box")


def key_of(s: Solution, perm: KeyPermutation = DEFAULT_PERM) -> tuple:
    return lex_key(s.objective, perm)


def with_params(p: Problem, **kw) -> Problem:
    """Copy of ``p`` with some solver parameters replaced (None values ignored)."""
    kw = {k: v for k, v in kw.items() if v is not None}
    if not kw:
        return p
    return replace(p, solver_params=replace(p.solver_params, **kw))
