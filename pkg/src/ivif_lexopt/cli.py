"""Command line: ``ivif-lexopt {solve,rank,eval,plot}``.

Exit codes: 0 optimal / ok, 1 bad input, 2 infeasible, 3 unbounded.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace

from .ivifn import Ivifn, IvifnError, fmt_number, add, format_ivifn, membership, mul, scalar_mul, sub
from .lp import NumericalBreakdown
from .model import ModelError, parse, validate_problem
from .ranking import KeyPermutation, compare, lex_key
from .solver import (DEFAULT_BRANCH_CAP, BranchBudgetExceeded, Infeasible, Unbounded, solve)

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_UNBOUNDED = 0, 1, 2, 3

VERDICT = {-1: "≺", 0: "=", 1: "≻"}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _number(text: str) -> Ivifn:
    text = text.strip()
    if text.startswith("{"):
        return Ivifn.from_json(json.loads(text))
    try:
        return Ivifn.crisp(float(text))
    except ValueError:
        return Ivifn.from_json(text)


def _perm(text: str) -> KeyPermutation:
    try:
        return KeyPermutation.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _key_str(k) -> str:
    return "(" + ", ".join(fmt_number(v) for v in k) + ")"


def cmd_solve(args) -> int:
    try:
        p = parse(_read(args.model))
    except (ModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    diags = validate_problem(p)
    if diags:
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_INPUT
    overrides = {k: v for k, v in (("k", args.k), ("K", args.K), ("lex_slack", args.lex_slack),
                                   ("lp_tol", args.lp_tol)) if v is not None}
    try:
        if overrides:
            p = replace(p, solver_params=replace(p.solver_params, **overrides))
        sol = solve(p, mode=args.mode, perm=args.perm, branch_cap=args.branch_cap)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BranchBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Infeasible as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except Unbounded as exc:
        print(f"unbounded: {exc}")
        return EXIT_UNBOUNDED
    except NumericalBreakdown as exc:
        print(f"error: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.json:
        out = sol.to_json()
        if args.trace:
            out["trace"] = [r.to_json() for r in sol.trace]
        print(json.dumps(out, indent=2))
        return EXIT_OK

    labels = args.perm.order
    print("status: optimal")
    print("stage optima:")
    for t, v in enumerate(sol.stage_optima):
        print(f"  {t + 1} {labels[t]}  {fmt_number(v)}")
    for name, x in sol.variables.items():
        print(f"{name} = {format_ivifn(x)}")
    print(f"objective = {format_ivifn(sol.objective)}")
    st = sol.branch_stats
    print(f"branches: {st['branches']} (feasible at stage 1: {st['feasible_stage1']}, "
          f"ties: {st['ties']}, LP solves: {st['lp_solves']})")
    print(f"winning branch {st['winner']}: {st['winner_branch']}")
    if args.trace:
        print("trace:")
        for r in sol.trace:
            print(f"  stage {r.stage} {r.label}: optimum {fmt_number(r.optimum)}, "
                  f"best branch {r.winning_branch}, feasible {r.feasible}")
    return EXIT_OK


def cmd_rank(args) -> int:
    try:
        x, y = _number(args.x), _number(args.y)
        verdict = compare(x, y, args.perm)
    except (IvifnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"{format_ivifn(x)}  key {_key_str(lex_key(x, args.perm))}")
    print(f"{format_ivifn(y)}  key {_key_str(lex_key(y, args.perm))}")
    print(f"x {VERDICT[verdict]} y")
    return EXIT_OK


def run_ops(doc: dict) -> Ivifn:
    """Evaluate ``{"numbers": {...}, "ops": [{"op", "args", "out"}], "result": name}``."""
    env = {name: Ivifn.from_json(v) for name, v in doc.get("numbers", {}).items()}

    def get(name):
        if name not in env:
            raise KeyError(f"undefined name {name!r}")
        return env[name]

    binary = {"add": add, "sub": sub, "mul": mul}
    last = None
    for i, op in enumerate(doc.get("ops", [])):
        kind, a = op.get("op"), op.get("args", [])
        if kind in binary:
            val = binary[kind](get(a[0]), get(a[1]))
        elif kind == "smul":
            val = scalar_mul(float(a[0]), get(a[1]))
        else:
            raise ValueError(f"ops[{i}]: unknown op {kind!r}")
        last = op.get("out", f"_{i}")
        env[last] = val
    result = doc.get("result", last)
    if result is None:
        raise ValueError("nothing to evaluate")
    return get(result)


def cmd_eval(args) -> int:
    try:
        doc = json.loads(_read(args.file))
        x = run_ops(doc)
    except (OSError, json.JSONDecodeError, IvifnError, KeyError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(format_ivifn(x, 6) if args.precise else format_ivifn(x))
    return EXIT_OK


def plot_rows(x: Ivifn, samples: int):
    lo, hi = x.a - x.l_nu_L, x.a + x.r_nu_L
    if hi - lo <= 0:
        lo, hi = x.a - 1.0, x.a + 1.0
    step = (hi - lo) / (samples - 1)
    for i in range(samples):
        t = hi if i == samples - 1 else lo + i * step
        yield (t,) + membership(x, t)


def cmd_plot(args) -> int:
    try:
        x = _number(args.ivifn)
    except (IvifnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.samples < 2:
        print("error: need at least 2 samples", file=sys.stderr)
        return EXIT_INPUT
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "mu_L", "mu_U", "nu_L", "nu_U"])
        for row in plot_rows(x, args.samples):
            w.writerow([f"{v:.10g}" for v in row])
    finally:
        if args.output:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ivif-lexopt", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub_ = ap.add_subparsers(dest="command", required=True)

    s = sub_.add_parser("solve", help="solve a model file (- for stdin)")
    s.add_argument("model", nargs="?", default="-")
    s.add_argument("--json", action="store_true", help="print the solution as JSON")
    s.add_argument("--trace", action="store_true", help="include the per-stage trace")
    s.add_argument("--branch-cap", type=int, default=DEFAULT_BRANCH_CAP)
    s.add_argument("--k", type=float, default=None, help="strictness margin")
    s.add_argument("--K", type=float, default=None, help="big-M constant")
    s.add_argument("--lex-slack", type=float, default=None)
    s.add_argument("--lp-tol", type=float, default=None)
    s.add_argument("--perm", type=_perm, default=KeyPermutation(), help="key order, e.g. SAMCDGH")
    s.add_argument("--mode", choices=("resolved", "bigm"), default="resolved")
    s.set_defaults(func=cmd_solve)

    r = sub_.add_parser("rank", help="compare two numbers")
    r.add_argument("x")
    r.add_argument("y")
    r.add_argument("--perm", type=_perm, default=KeyPermutation())
    r.set_defaults(func=cmd_rank)

    e = sub_.add_parser("eval", help="evaluate arithmetic from a JSON file (- for stdin)")
    e.add_argument("file", nargs="?", default="-")
    e.add_argument("--precise", action="store_true", help="6 decimals instead of 4")
    e.set_defaults(func=cmd_eval)

    p = sub_.add_parser("plot", help="membership curves as CSV")
    p.add_argument("ivifn")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
