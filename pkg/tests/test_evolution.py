from __future__ import annotations

import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsearch import (
    CriterionError,
    Propagator,
    analyze,
    build_hamiltonian,
    complete_graph,
    eig_sym,
    evolve,
    ground_shift,
    hypercube,
    joined_complete,
    laplacian,
    paley,
    reconstruct_lambda_states,
    shift_operator,
    simplex_complete_operator,
    success_curve,
    target_overlaps,
    uniform_state,
    verify_eigen_condition,
)
from qsearch.evolution import EigenConditionError


def _unit(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def test_build_hamiltonian():
    h = build_hamiltonian(laplacian(complete_graph(4)), 0.25, 0)
    assert h[0, 0] == pytest.approx(-0.25, abs=1e-15)
    assert h[1, 1] == pytest.approx(0.75, abs=1e-15)
    assert np.array_equal(h, h.T)
    with pytest.raises(ValueError):
        build_hamiltonian(laplacian(complete_graph(4)), 0.0, 0)
    with pytest.raises(ValueError):
        build_hamiltonian(laplacian(complete_graph(4)), 1.0, 4)


def test_evolve_basics():
    op = laplacian(complete_graph(4))
    h = build_hamiltonian(op, 0.25, 0)
    psi = uniform_state(4)
    assert np.allclose(evolve(h, psi, 0.0), psi, atol=1e-14)
    assert abs(evolve(h, psi, math.pi)[0]) ** 2 >= 0.99
    # without the target term the uniform state is a ground state
    out = evolve(0.7 * op.matrix, psi, 3.3)
    assert abs(abs(np.vdot(psi, out)) - 1) <= 1e-12
    with pytest.raises(ValueError):
        evolve(h, psi, -1.0)
    with pytest.raises(ValueError):
        evolve(h, 2 * psi, 1.0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), tau=st.floats(0, 100), tau2=st.floats(0, 50))
def test_unitarity_and_composition(seed, tau, tau2):
    op = laplacian(hypercube(4))
    prop = Propagator(build_hamiltonian(op, 0.3, 2))
    psi = _unit(16, seed)
    out = prop.evolve(psi, tau)
    assert abs(np.linalg.norm(out) - 1) <= 1e-9
    two = prop.evolve(out / np.linalg.norm(out), tau2) * np.linalg.norm(out)
    assert np.abs(two - prop.evolve(psi, tau + tau2)).max() <= 1e-8


@settings(max_examples=10, deadline=None)
@given(c=st.floats(-50, 50), seed=st.integers(0, 100))
def test_shift_invariance(c, seed):
    op = laplacian(paley(13))
    psi = _unit(13, seed)
    a = success_curve(op, 0.2, 3, psi, 20.0, 201)
    b = success_curve(shift_operator(op, c), 0.2, 3, psi, 20.0, 201)
    assert np.abs(a.probs - b.probs).max() <= 1e-9


def test_ground_shift_leaves_curve_unchanged():
    raw = simplex_complete_operator(9, 2.0)
    spectrum = ground_shift(eig_sym(raw))
    shifted = shift_operator(raw, spectrum.shift_applied)
    assert eig_sym(shifted).eigenvalues[0] == pytest.approx(0, abs=1e-9)
    a = success_curve(raw, 0.2, 0, None, 30.0, 301)
    b = success_curve(shifted, 0.2, 0, None, 30.0, 301)
    assert np.abs(a.probs - b.probs).max() <= 1e-9


def test_trace_invariants_and_serialisation():
    op = laplacian(complete_graph(64))
    a = analyze(target_overlaps(ground_shift(eig_sym(op)), 0), 1)
    tr = success_curve(op, a.gamma, 0, "uniform", 2 * a.T)
    assert tr.taus.size == 1001 and tr.taus[0] == 0 and tr.taus[-1] == 2 * a.T
    assert np.all(tr.probs >= 0) and np.all(tr.probs <= 1 + 1e-9)
    assert tr.peak_prob >= 0.99
    assert abs(tr.peak_tau - 4 * math.pi) / (4 * math.pi) <= 0.02
    assert tr.refined_peak_prob >= tr.peak_prob
    assert abs(tr.refined_peak_tau - tr.peak_tau) <= tr.taus[1]
    rows = list(csv.reader(io.StringIO(tr.to_csv())))
    assert rows[0] == ["tau", "prob"] and len(rows) == 1002
    assert float(rows[1 + 500][0]) == tr.taus[500]
    assert tr.to_dict()["initial"] == "uniform"
    with pytest.raises(ValueError):
        success_curve(op, a.gamma, 0, None, 1.0, steps=1)
    with pytest.raises(ValueError):
        success_curve(op, a.gamma, 0, None, 0.0)


def test_norm_preserved_on_grid():
    op = laplacian(joined_complete(16))
    prop = Propagator(build_hamiltonian(op, 0.1, 0))
    psi = uniform_state(16)
    for tau in np.linspace(0, 40, 17):
        assert abs(np.linalg.norm(prop.evolve(psi, tau)) - 1) <= 1e-9


def test_joined_complete_half():
    op = laplacian(joined_complete(64))
    p = target_overlaps(ground_shift(eig_sym(op)), 0, 0.0)
    a = analyze(p, 2, "critical", 5)
    tr = success_curve(op, a.gamma, 0, None, 2 * a.T)
    assert 0.45 <= tr.peak_prob <= 0.55


# ----------------------------------------------------------------- eigenvalue condition


def _c(n):
    op = laplacian(complete_graph(n))
    p = target_overlaps(ground_shift(eig_sym(op)), 0)
    return op, p


def test_eigen_condition_exact_eigenvalues():
    op, p = _c(64)
    a = analyze(p, 1)
    lam = eig_sym(build_hamiltonian(op, a.gamma, 0)).eigenvalues
    nearest = lam[np.argmin(np.abs(lam - a.lambda_plus))]
    assert verify_eigen_condition(p, a.gamma, nearest) <= 1e-6
    below = lam[lam < 0].max()
    above = lam[lam > 0].min()
    for x in (below, above):
        assert verify_eigen_condition(p, a.gamma, x) <= 1e-6
    # a point between the poles that is not an eigenvalue
    mid = 0.5 * a.gamma * 64
    assert verify_eigen_condition(p, a.gamma, mid) > 0.5
    with pytest.raises(EigenConditionError):
        verify_eigen_condition(p, a.gamma, a.gamma * 64)


def test_eigen_condition_predicted_values():
    _, p = _c(256)
    a = analyze(p, 1)
    for lam in (a.lambda_plus, a.lambda_minus):
        assert verify_eigen_condition(p, a.gamma, lam) <= 1 / a.chi_eff


@pytest.mark.parametrize("g", [complete_graph(32), hypercube(6), paley(29)], ids=["c", "h", "p"])
def test_eigen_condition_straddling_pair(g):
    op = laplacian(g)
    p = target_overlaps(ground_shift(eig_sym(op)), 0)
    a = analyze(p, 1)
    lam = eig_sym(build_hamiltonian(op, a.gamma, 0)).eigenvalues
    for x in (lam[lam < 0].max(), lam[lam > 0].min()):
        assert verify_eigen_condition(p, a.gamma, x) <= 1e-6


def test_reconstruct_lambda_states():
    op, p = _c(64)
    a = analyze(p, 1, "critical", 5)
    st_ = reconstruct_lambda_states(p, a)
    s = eig_sym(build_hamiltonian(op, a.gamma, 0))
    e = s.eigenvalues
    for vec, lam in ((st_.plus, a.lambda_plus), (st_.minus, a.lambda_minus)):
        assert abs(np.linalg.norm(vec) - 1) <= 1e-12
        k = int(np.argmin(np.abs(e - lam)))
        assert abs(s.eigenvectors[:, k] @ vec) >= 1 - 5 / a.chi_eff
    assert st_.t_overlap_plus == pytest.approx(st_.predicted_t_overlap_plus, abs=1 / a.chi_eff)
    assert st_.t_overlap_minus == pytest.approx(st_.predicted_t_overlap_minus, abs=1 / a.chi_eff)
    assert abs(st_.t_overlap_plus - st_.t_overlap_minus) <= 1 / a.chi_eff
    assert abs(st_.sigma_overlap_plus) == pytest.approx(math.cos(a.eta), abs=1 / a.chi_eff)
    assert abs(st_.sigma_overlap_minus) == pytest.approx(math.sin(a.eta), abs=1 / a.chi_eff)
    assert np.sign(st_.sigma_overlap_plus) != np.sign(st_.sigma_overlap_minus)


def test_reconstruct_requires_margin():
    _, p = _c(16)
    a = analyze(p, 1)
    assert a.flagged
    with pytest.raises(CriterionError):
        reconstruct_lambda_states(p, a)
