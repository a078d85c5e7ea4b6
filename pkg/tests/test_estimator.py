import json

import numpy as np
import pytest
from sklearn.base import clone

from ivif_lexopt import parse_tuple
from ivif_lexopt.model import ModelError
from ivif_lexopt.estimator import LexIvifLpSolver, LexKeyTransformer, check_problem


def test_fit_predict_score(example_path):
    est = LexIvifLpSolver().fit(example_path)
    xs = est.predict()
    assert xs["x1"].a == pytest.approx(10) and xs["x2"].a == pytest.approx(-5)
    assert est.stage_optima_ == pytest.approx([1.875, 18.125, 10, -15, -30, -55, -60], abs=1e-6)
    assert est.score() == pytest.approx(1.875, abs=1e-6)
    assert json.loads(est.to_json())["stage_optima"][0] == pytest.approx(1.875)


def test_params_and_clone():
    est = LexIvifLpSolver(mode="bigm", K=500)
    params = est.get_params()
    assert params["mode"] == "bigm" and params["K"] == 500
    twin = clone(est).set_params(mode="resolved")
    assert twin.mode == "resolved" and est.mode == "bigm"


def test_fit_from_dict_and_text(example_path):
    text = open(example_path).read()
    a = LexIvifLpSolver().fit(text)
    b = LexIvifLpSolver(mode="bigm").fit(json.loads(text))
    assert a.stage_optima_ == pytest.approx(b.stage_optima_, abs=1e-6)


def test_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        LexIvifLpSolver().predict()


def test_check_problem_errors():
    with pytest.raises(ModelError):
        check_problem("{broken")
    with pytest.raises(TypeError):
        check_problem(42)


def test_transformer():
    xs = ["(5;2,2,3,3;5,5,5,4)", parse_tuple("(8;1,1,2,2;4,4,2,3)")]
    tr = LexKeyTransformer().fit(xs)
    out = tr.transform(xs)
    assert out.shape == (2, 7)
    np.testing.assert_allclose(out[0], [0.125, 9.875, 5, 3, 2, 0, 0])
    assert list(tr.get_feature_names_out()) == list("SAMCDGH")
    perm = LexKeyTransformer(perm="AMSCDGH").fit_transform(xs)
    np.testing.assert_allclose(perm[:, 0], out[:, 1])
