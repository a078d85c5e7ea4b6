"""Dense two-phase primal simplex for the small staged programs.

Sizes here are a few dozen unknowns and rows, so a plain numpy tableau is
plenty.  Unknowns are free unless bounded; single-term rows are folded into
bounds before the tableau is built.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .transform import AffineExpr, LinearRow

log = logging.getLogger(__name__)

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

DEGENERACY_STREAK = 50
FEAS_TOL = 1e-9   # phase-1 residual allowed per unit of (equilibrated) right-hand side


class NumericalBreakdown(RuntimeError):
    pass


@dataclass
class LpInstance:
    """maximise ``objective`` subject to ``rows``; ``bounds`` maps unknown -> (lo, hi)."""

    objective: AffineExpr
    rows: list
    bounds: dict = field(default_factory=dict)

    def unknowns(self) -> list:
        names = set(self.objective.terms)
        for r in self.rows:
            names.update(r.terms)
        names.update(self.bounds)
        return sorted(names)


@dataclass
class LpOutcome:
    status: str
    value: float = math.nan
    assignment: dict = field(default_factory=dict)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _fold_bounds(inst: LpInstance, names):
    """Split rows into bounds (single term) and proper rows."""
    lo = {n: -math.inf for n in names}
    hi = {n: math.inf for n in names}
    for n, (l, h) in inst.bounds.items():
        lo[n] = max(lo[n], -math.inf if l is None else float(l))
        hi[n] = min(hi[n], math.inf if h is None else float(h))
    proper = []
    for r in inst.rows:
        terms = {k: v for k, v in r.terms.items() if v != 0.0}
        if not terms:
            ok = (r.relation == "<=" and 0.0 <= r.rhs + 1e-12) or \
                 (r.relation == ">=" and 0.0 >= r.rhs - 1e-12) or \
                 (r.relation == "=" and abs(r.rhs) <= 1e-12)
            if not ok:
                return None, None, None
            continue
        if len(terms) == 1:
            (n, c), = terms.items()
            b = r.rhs / c
            rel = r.relation
            if c < 0 and rel != "=":
                rel = "<=" if rel == ">=" else ">="
            if rel in (">=", "="):
                lo[n] = max(lo[n], b)
            if rel in ("<=", "="):
                hi[n] = min(hi[n], b)
            continue
        proper.append((terms, r.relation, float(r.rhs)))
    return lo, hi, proper


def _column_map(names, lo, hi):
    """Express each unknown through non-negative columns.

    Returns (maps, ncols, extra_rows): ``x = offset + sum(coef * col)`` per unknown,
    plus rows ``col <= width`` for doubly bounded unknowns.
    """
    maps, extra, j = {}, [], 0
    for n in names:
        l, h = lo[n], hi[n]
        if math.isfinite(l):
            maps[n] = (l, [(j, 1.0)])
            if math.isfinite(h):
                extra.append((j, h - l))
            j += 1
        elif math.isfinite(h):
            maps[n] = (h, [(j, -1.0)])
            j += 1
        else:
            maps[n] = (0.0, [(j, 1.0), (j + 1, -1.0)])
            j += 2
    return maps, j, extra


class _Tableau:
    def __init__(self, T, basis, lp_tol, max_iter):
        self.T = T
        self.basis = basis
        self.tol = lp_tol
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, r, c):
        T = self.T
        T[r] /= T[r, c]
        col = T[:, c].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = c

    def run(self, allowed):
        """Maximise the objective held in the last row (stored as reduced costs)."""
        T, tol = self.T, self.tol
        m = T.shape[0] - 1
        streak = 0
        bland = False
        allowed_idx = np.flatnonzero(allowed)
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalBreakdown(f"simplex did not finish in {self.max_iter} iterations")
            if not np.all(np.isfinite(T)):
                raise NumericalBreakdown("non-finite value in tableau")
            red = T[-1, allowed_idx]
            cand = np.flatnonzero(red < -tol)
            if cand.size == 0:
                return OPTIMAL
            if bland:
                c = allowed_idx[cand[0]]
            else:
                c = allowed_idx[cand[np.argmin(red[cand])]]
            colv = T[:m, c]
            pos = np.flatnonzero(colv > tol)
            if pos.size == 0:
                return UNBOUNDED
            ratios = T[pos, -1] / colv[pos]
            best = ratios.min()
            ties = pos[ratios <= best + tol * (1 + abs(best))]
            # smallest basic column among ties keeps Bland's guarantee
            r = ties[np.argmin([self.basis[i] for i in ties])]
            if log.isEnabledFor(logging.DEBUG):
                log.debug("pivot %d: enter %d leave row %d ratio %.3g%s",
                          self.iterations, c, r, best, " (bland)" if bland else "")
            self.pivot(r, c)
            self.iterations += 1
            if best <= tol:
                streak += 1
                if streak >= DEGENERACY_STREAK:
                    bland = True
            else:
                streak = 0


def solve_lp(inst: LpInstance, lp_tol: float = 1e-9, max_iter: int | None = None) -> LpOutcome:
    names = inst.unknowns()
    lo, hi, proper = _fold_bounds(inst, names)
    if lo is None:
        return LpOutcome(INFEASIBLE)
    for n in names:
        if lo[n] > hi[n] + 1e-9 * (1 + abs(lo[n])):
            return LpOutcome(INFEASIBLE)
        if lo[n] > hi[n]:
            hi[n] = lo[n]
    maps, ncols, extra = _column_map(names, lo, hi)

    # rows in column space: A y REL b
    rows = []
    for terms, rel, rhs in proper:
        a = np.zeros(ncols)
        b = rhs
        for n, c in terms.items():
            off, cols = maps[n]
            b -= c * off
            for j, s in cols:
                a[j] += c * s
        # equilibrate so feasibility thresholds mean the same thing on every row
        scale = np.abs(a).max()
        if scale > 0:
            a, b = a / scale, b / scale
        rows.append((a, rel, b))
    for j, width in extra:
        a = np.zeros(ncols)
        a[j] = 1.0
        rows.append((a, "<=", width))

    # flip to b >= 0, then count slacks and artificials
    norm = []
    for a, rel, b in rows:
        if b < 0:
            a, b = -a, -b
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        norm.append((a, rel, b))
    m = len(norm)
    n_slack = sum(1 for _, rel, _ in norm if rel != "=")
    n_art = sum(1 for _, rel, _ in norm if rel != "<=")
    width = ncols + n_slack + n_art
    T = np.zeros((m + 1, width + 1))
    basis = [0] * m
    s_j, a_j = ncols, ncols + n_slack
    art_cols = []
    art_rhs = {}
    for i, (a, rel, b) in enumerate(norm):
        T[i, :ncols] = a
        T[i, -1] = b
        if rel == "<=":
            T[i, s_j] = 1.0
            basis[i] = s_j
            s_j += 1
        else:
            if rel == ">=":
                T[i, s_j] = -1.0
                s_j += 1
            T[i, a_j] = 1.0
            basis[i] = a_j
            art_cols.append(a_j)
            art_rhs[a_j] = b
            a_j += 1

    if max_iter is None:
        max_iter = 50 * (m + width) + 1000
    tab = _Tableau(T, basis, lp_tol, max_iter)

    if art_cols:
        # phase 1: maximise -sum(artificials); reduced costs = -(sum of artificial rows)
        T[-1, :] = 0.0
        for i in range(m):
            if basis[i] in art_cols:
                T[-1, :] -= T[i, :]
        for j in art_cols:
            T[-1, j] = 0.0
        allowed = np.ones(width, dtype=bool)
        tab.run(allowed)
        # an artificial's value is the residual of its own row, so judge it on that
        # row's scale; a threshold tied to the largest rhs would hide small rows
        bmax = max([abs(b) for _, _, b in norm] + [0.0])
        for i, bj in enumerate(tab.basis):
            if bj in art_rhs and T[i, -1] > FEAS_TOL * (1 + art_rhs[bj]) + 1e-12 * bmax:
                return LpOutcome(INFEASIBLE, iterations=tab.iterations)
        # drive artificials out of the basis; rows that cannot be are redundant
        art_set = set(art_cols)
        keep = []
        for i in range(m):
            if basis[i] in art_set:
                row = T[i, :ncols + n_slack]
                cand = np.flatnonzero(np.abs(row) > 1e-7)
                if cand.size:
                    # the artificial is zero up to FEAS_TOL; make it exactly zero so the
                    # forced pivot cannot push other basic columns negative
                    T[i, -1] = 0.0
                    tab.pivot(i, cand[np.argmax(np.abs(row[cand]))])
                    keep.append(i)
            else:
                keep.append(i)
        if len(keep) < m:
            T = np.vstack([T[keep], T[-1:]])
            tab.T = T
            tab.basis = [basis[i] for i in keep]
            m = len(keep)
        T[:, ncols + n_slack:width] = 0.0

    # phase 2 objective in column space
    T = tab.T
    c = np.zeros(ncols)
    const = inst.objective.constant
    for n, coef in inst.objective.terms.items():
        off, cols = maps[n]
        const += coef * off
        for j, s in cols:
            c[j] += coef * s
    T[-1, :] = 0.0
    T[-1, :ncols] = -c
    for i, bj in enumerate(tab.basis):
        if T[-1, bj] != 0.0:
            T[-1, :] -= T[-1, bj] * T[i, :]
    allowed = np.zeros(width, dtype=bool)
    allowed[:ncols + n_slack] = True
    status = tab.run(allowed)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED, iterations=tab.iterations)

    y = np.zeros(width)
    for i, bj in enumerate(tab.basis):
        y[bj] = T[i, -1]
    assignment = {}
    for n in names:
        off, cols = maps[n]
        assignment[n] = float(off + sum(s * y[j] for j, s in cols))
    value = float(inst.objective(assignment))
    out = LpOutcome(OPTIMAL, value, assignment, tab.iterations)
    bad = check_outcome(inst, out, 1e-6)
    if bad:
        raise NumericalBreakdown(f"optimal point violates {len(bad)} row(s), first: {bad[0]}")
    return out


def maximize(objective: AffineExpr, rows, lp_tol: float = 1e-9) -> LpOutcome:
    return solve_lp(LpInstance(objective, list(rows)), lp_tol)


def check_outcome(inst: LpInstance, out: LpOutcome, tol: float = 1e-7) -> list:
    """Rows violated by an optimal outcome (empty when everything holds)."""
    x = out.assignment
    bad = [r for r in inst.rows if not r.satisfied(
        x, tol * (1 + abs(r.rhs) + sum(abs(c * x.get(k, 0.0)) for k, c in r.terms.items())))]
    for n, (l, h) in inst.bounds.items():
        v = out.assignment.get(n, 0.0)
        if (l is not None and v < l - tol) or (h is not None and v > h + tol):
            bad.append(LinearRow({n: 1.0}, "in", 0.0, f"bound {n}"))
    return bad
