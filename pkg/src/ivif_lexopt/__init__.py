"""Solver for fully LR-type interval-valued intuitionistic fuzzy linear programs."""
from .ivifn import Ivifn, add, format_ivifn, ivifn, mul, parse_tuple, scalar_mul, sign_class, sub, validate
from .ranking import KeyPermutation, accuracy, compare, lex_key, score
from .model import Problem, Solution, SolverParams, from_dict, load, parse
from .solver import (BranchBudgetExceeded, Infeasible, Unbounded, UnboundedAtStage, certify,
                     enumerate_branches, solve)

__version__ = "0.1.0"

__all__ = [
    "Ivifn", "ivifn", "validate", "parse_tuple", "format_ivifn", "add", "sub", "scalar_mul", "mul",
    "sign_class", "score", "accuracy", "lex_key", "compare", "KeyPermutation", "Problem",
    "Solution", "SolverParams", "from_dict", "parse", "load", "solve", "certify",
    "enumerate_branches", "Infeasible", "Unbounded", "UnboundedAtStage", "BranchBudgetExceeded",
]
