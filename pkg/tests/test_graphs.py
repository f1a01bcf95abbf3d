from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsearch import (
    EdgeListError,
    Graph,
    complete_graph,
    cubic_lattice,
    disjoint_union,
    erdos_renyi,
    hypercube,
    joined_complete,
    laplacian,
    latin_square_graph,
    load_edgelist,
    paley,
    save_edgelist,
    shifted_adjacency,
    simplex_complete_operator,
    srg_parameters,
)
from qsearch.graphs import simplex_pairing


def _check_structure(g: Graph):
    a = g.adjacency()
    assert np.allclose(a, a.T)
    assert np.all(np.diag(a) == 0)
    assert np.all(a >= 0)
    assert g.num_edges == len(g.edges)


def test_complete_counts():
    g = complete_graph(4)
    assert g.num_edges == 6
    assert np.all(g.degrees() == 3)
    assert complete_graph(2).num_edges == 1
    assert np.allclose(np.linalg.eigvalsh(laplacian(g).matrix), [0, 4, 4, 4])
    assert np.allclose(laplacian(g).matrix, 4 * np.eye(4) - np.ones((4, 4)))


def test_joined_complete():
    g = joined_complete(8)
    assert g.num_edges == 13
    _check_structure(g)
    n = 200
    e = np.linalg.eigvalsh(laplacian(joined_complete(n)).matrix)
    assert e[1] == pytest.approx(4 / n, rel=0.05)


def test_joined_complete_bridge_removal():
    g = joined_complete(8)
    bridge = [(i, j) for i, j, _ in g.edges if (i < 4) != (j < 4)]
    assert len(bridge) == 1
    cut = g.without_edge(*bridge[0])
    e_cut = np.linalg.eigvalsh(laplacian(cut).matrix)
    e_union = np.linalg.eigvalsh(laplacian(disjoint_union([complete_graph(4)] * 2)).matrix)
    assert np.allclose(e_cut, e_union)
    assert np.sum(np.abs(e_cut) < 1e-9) == 2


def test_hypercube():
    g = hypercube(3)
    assert (g.n, g.num_edges) == (8, 12)
    assert np.allclose(np.linalg.eigvalsh(laplacian(hypercube(2)).matrix), [0, 2, 2, 4])
    e = np.round(np.linalg.eigvalsh(laplacian(hypercube(5)).matrix)).astype(int)
    for p in range(6):
        assert np.sum(e == 2 * p) == math.comb(5, p)


def test_cubic_lattice():
    g = cubic_lattice(2, 5)
    assert (g.n, g.num_edges) == (25, 50)
    assert np.all(g.degrees() == 4)
    e = np.linalg.eigvalsh(laplacian(cubic_lattice(1, 5)).matrix)
    assert e[1] == pytest.approx(2 * (1 - math.cos(2 * math.pi / 5)), abs=1e-12)
    assert e[1] == pytest.approx(1.381966, abs=1e-6)
    with pytest.raises(ValueError):
        cubic_lattice(2, 4)


def test_erdos_renyi_limits_and_determinism():
    assert erdos_renyi(7, 1.0, 3).edges == complete_graph(7).edges
    assert erdos_renyi(7, 0.0, 3).num_edges == 0
    assert erdos_renyi(40, 0.3, 11) == erdos_renyi(40, 0.3, 11)
    assert erdos_renyi(40, 0.3, 11) != erdos_renyi(40, 0.3, 12)


def test_paley_small():
    assert srg_parameters(paley(13)) == (13, 6, 2, 3)
    g = paley(5)
    assert srg_parameters(g) == (5, 2, 0, 1)
    assert sorted((i, j) for i, j, _ in g.edges) == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]
    with pytest.raises(ValueError):
        paley(7)


@pytest.mark.parametrize("q", [5, 13, 17, 29])
def test_paley_pair_scan(q):
    t = (q - 1) // 4
    N, k, lam, mu = srg_parameters(paley(q))
    assert (N, k, lam, mu) == (4 * t + 1, 2 * t, t - 1, t)
    assert k * (k - lam - 1) == (N - k - 1) * mu


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_latin_pair_scan(t):
    d = 3
    params = srg_parameters(latin_square_graph(t, d))
    assert params == (t * t, d * (t - 1), d * d - 3 * d + t, d * (d - 1))
    N, k, lam, mu = params
    assert k * (k - lam - 1) == (N - k - 1) * mu


def test_latin_t4():
    assert srg_parameters(latin_square_graph(4, 3)) == (16, 9, 4, 6)
    assert 9 * 4 == 6 * 6 == 36


def test_latin_more_squares():
    assert srg_parameters(latin_square_graph(5, 4)) == (25, 16, 9, 12)


def test_disjoint_union():
    g = complete_graph(5)
    assert disjoint_union([g]) == g
    u = disjoint_union([complete_graph(4), complete_graph(4)])
    e = np.linalg.eigvalsh(laplacian(u).matrix)
    assert np.sum(np.abs(e) < 1e-9) == 2
    u3 = disjoint_union([complete_graph(3), hypercube(2), complete_graph(2)])
    e3 = np.linalg.eigvalsh(laplacian(u3).matrix)
    assert np.sum(np.abs(e3) < 1e-9) == 3


def test_shifted_adjacency():
    op = shifted_adjacency(complete_graph(6))
    assert np.allclose(op.matrix, 5 * np.eye(6) - (np.ones((6, 6)) - np.eye(6)))
    assert np.allclose(np.linalg.eigvalsh(op.matrix), [0, 6, 6, 6, 6, 6])
    empty = shifted_adjacency(Graph(4))
    assert np.all(empty.matrix == 0)
    assert np.all(laplacian(Graph(4)).matrix == 0)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(5, 30), p=st.floats(0.3, 0.9), seed=st.integers(0, 1000))
def test_shifted_adjacency_ground_zero(n, p, seed):
    g = erdos_renyi(n, p, seed)
    e = np.linalg.eigvalsh(laplacian(g).matrix)
    if e[1] < 1e-6:  # disconnected
        return
    assert abs(np.linalg.eigvalsh(shifted_adjacency(g).matrix)[0]) <= 1e-9


@pytest.mark.parametrize("R", [4, 5, 9])
def test_simplex_pairing_is_perfect_cross_block(R):
    pairs = simplex_pairing(R)
    N = R * (R + 1)
    seen = [v for e in pairs for v in e]
    assert sorted(seen) == list(range(N))
    blocks = set()
    for i, j in pairs:
        assert i // R != j // R
        blocks.add(frozenset((i // R, j // R)))
    assert len(blocks) == R * (R + 1) // 2


@pytest.mark.parametrize("w", [1.0, 2.0, 3.0])
def test_simplex_operator_row_sums_and_shift(w):
    op = simplex_complete_operator(9, w)
    assert np.allclose(op.matrix.sum(axis=1), 1 - w)
    e = np.linalg.eigvalsh(op.matrix)
    assert abs(e[0] - (1 - w)) <= 1e-9


def test_edgelist_roundtrip_and_errors():
    g = load_edgelist("N 2\n0 1 1.0")
    assert g == Graph(2, ((0, 1, 1.0),))
    c4 = complete_graph(4)
    assert load_edgelist(save_edgelist(c4)) == c4
    weighted = Graph.from_edges(3, [(2, 0, 0.1), (1, 2, 1 / 3)])
    assert load_edgelist(save_edgelist(weighted)) == weighted
    with pytest.raises(EdgeListError, match="self loop"):
        load_edgelist("N 2\n0 0 1.0")
    with pytest.raises(EdgeListError) as exc:
        load_edgelist("N 3\n# comment\n0 1 1\n1 0 2\n")
    assert exc.value.line == 4
    with pytest.raises(EdgeListError):
        load_edgelist("N 2\n0 5 1.0")
    with pytest.raises(EdgeListError):
        load_edgelist("0 1 1.0")
    with pytest.raises(EdgeListError):
        load_edgelist("N 2\n0 1 -1")
    with pytest.raises(EdgeListError):
        load_edgelist("N 2\n0 x 1")


@pytest.mark.parametrize(
    "g",
    [complete_graph(5), joined_complete(10), hypercube(4), cubic_lattice(3, 3),
     erdos_renyi(30, 0.2, 1), paley(13), latin_square_graph(4)],
    ids=["complete", "jc", "hypercube", "lattice", "er", "paley", "latin"],
)
def test_generator_structure(g):
    _check_structure(g)
    L = laplacian(g).matrix
    assert np.allclose(L.sum(axis=1), 0)
