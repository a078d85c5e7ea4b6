"""scikit-learn style wrappers around the solver and the ranking keys.

There is no training data here, so ``fit`` takes a problem (or a list of
numbers for the transformer) in place of ``X`` and ignores ``y``.
"""
from __future__ import annotations

import json
import os
from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ivifn import Ivifn
from .model import ModelError, Problem, from_dict, normalize, parse, validate_problem
from .ranking import KeyPermutation, lex_key, score
from .solver import DEFAULT_BRANCH_CAP, solve


def check_problem(X) -> Problem:
    """Accept a Problem, a dict, a JSON string or a path and return a validated Problem."""
    if isinstance(X, Problem):
        p = normalize(X)
    elif isinstance(X, dict):
        p = from_dict(X)
    elif isinstance(X, (str, os.PathLike)):
        text = str(X)
        if not text.lstrip().startswith("{") and os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
        p = parse(text)
    else:
        raise TypeError(f"cannot build a problem from {type(X).__name__}")
    problems = validate_problem(p)
    if problems:
        raise ModelError("; ".join(problems))
    return p


def check_ivifns(X) -> list:
    if isinstance(X, (Ivifn, str, dict)):
        X = [X]
    return [x if isinstance(x, Ivifn) else Ivifn.from_json(x) for x in X]


class LexIvifLpSolver(BaseEstimator):
    """Solve one IVIF linear program per ``fit`` call."""

    def __init__(self, mode="resolved", perm="SAMCDGH", branch_cap=DEFAULT_BRANCH_CAP,
                 k=None, K=None, lex_slack=None, lp_tol=None, n_workers=1):
        self.mode = mode
        self.perm = perm
        self.branch_cap = branch_cap
        self.k = k
        self.K = K
        self.lex_slack = lex_slack
        self.lp_tol = lp_tol
        self.n_workers = n_workers

    def fit(self, X, y=None):
        p = check_problem(X)
        overrides = {name: getattr(self, name) for name in ("k", "K", "lex_slack", "lp_tol")
                     if getattr(self, name) is not None}
        if overrides:
            p = replace(p, solver_params=replace(p.solver_params, **overrides))
        self.problem_ = p
        self.solution_ = solve(p, mode=self.mode, perm=KeyPermutation.parse(self.perm),
                               branch_cap=self.branch_cap, workers=self.n_workers)
        self.stage_optima_ = np.asarray(self.solution_.stage_optima)
        self.objective_ = self.solution_.objective
        self.variables_ = dict(self.solution_.variables)
        self.branch_stats_ = dict(self.solution_.branch_stats)
        return self

    def predict(self, X=None):
        check_is_fitted(self, "solution_")
        return dict(self.variables_)

    def score(self, X=None, y=None):
        """Score index of the optimal objective."""
        check_is_fitted(self, "solution_")
        return score(self.objective_)

    def to_json(self) -> str:
        check_is_fitted(self, "solution_")
        return json.dumps(self.solution_.to_json(), indent=2)


class LexKeyTransformer(BaseEstimator, TransformerMixin):
    """Map IVIFNs to rows of their seven ranking keys."""

    def __init__(self, perm="SAMCDGH"):
        self.perm = perm

    def fit(self, X, y=None):
        self.perm_ = KeyPermutation.parse(self.perm)
        self.n_features_out_ = 7
        return self

    def transform(self, X):
        check_is_fitted(self, "perm_")
        return np.array([lex_key(x, self.perm_) for x in check_ivifns(X)], dtype=float).reshape(-1, 7)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "perm_")
        return np.array(list(self.perm_.order), dtype=object)
