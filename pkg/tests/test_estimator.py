from __future__ import annotations

import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qsearch import SearchCriterion, complete_graph, erdos_renyi, joined_complete, laplacian


def test_params_and_clone():
    est = SearchCriterion(target=3, chi_min=5.0, operator="adjacency")
    params = est.get_params()
    assert params["target"] == 3 and params["chi_min"] == 5.0
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(gamma=0.1)
    assert est.gamma == 0.1


def test_fit_predict_complete():
    est = SearchCriterion(chi_min=5).fit(complete_graph(64))
    assert est.gap_ok_ and est.analysis_.m == 1
    assert est.n_features_in_ == 64
    T = est.analysis_.T
    curve = est.predict([0.0, T, 2 * T])
    assert curve[0] == 0 and curve[1] == pytest.approx(est.analysis_.peak_overlap)
    assert est.score() >= 0.99
    assert est.sensitivity_band_ > 0


def test_fit_falls_back_without_gap():
    est = SearchCriterion().fit(complete_graph(64))
    assert not est.gap_ok_
    assert est.analysis_.m == 1 and est.analysis_.flagged


def test_fit_fixed_m_and_simulate():
    est = SearchCriterion(m=2, chi_min=5, tol_degeneracy=0.0).fit(joined_complete(64))
    assert est.gap_ok_
    tr = est.simulate()
    assert 0.45 <= tr.peak_prob <= 0.55
    assert est.simulate(initial="sigma").peak_prob >= 0.9


def test_fit_operator_and_array_inputs():
    g = erdos_renyi(40, 0.5, 1)
    a = SearchCriterion(operator="adjacency", chi_min=2).fit(g)
    assert a.operator_.kind == "shifted_adjacency"
    b = SearchCriterion(chi_min=2).fit(laplacian(g).matrix)
    c = SearchCriterion(chi_min=2).fit(laplacian(g))
    assert b.analysis_.T == pytest.approx(c.analysis_.T, rel=1e-12)
    with pytest.raises(ValueError):
        SearchCriterion(operator="bogus").fit(g)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        SearchCriterion().predict([1.0])
