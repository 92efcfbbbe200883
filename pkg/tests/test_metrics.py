import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_local_clustering, brute_mixing, brute_transitivity, brute_triangles, random_graph
from rhbm.calibration import LatentState, default_radius, sample_angles
from rhbm.generation import Graph, edge_probabilities, sample_graph
from rhbm.metrics import (
    average_local_clustering,
    clustering_relative_error,
    degree_sequence,
    empirical_mixing,
    global_clustering,
    graph_stats,
    local_clustering,
    mixing_relative_error,
    triangles_per_node,
)
from rhbm.mixing import EDGE_COUNTS, NORMALIZED, BlockPartition, MixingMatrix, make_partition


def G(N, pairs):
    return Graph.from_pairs(N, pairs)


def test_triangle():
    g = G(3, [(0, 1), (1, 2), (0, 2)])
    assert global_clustering(g) == 1.0
    assert average_local_clustering(g) == 1.0
    part = BlockPartition(np.array([0, 1, 1]))
    np.testing.assert_array_equal(empirical_mixing(g, part).entries, [[0, 2], [2, 2]])


def test_path_and_empty():
    assert global_clustering(G(3, [(0, 1), (1, 2)])) == 0.0
    assert average_local_clustering(G(3, [(0, 1), (1, 2)])) == 0.0
    empty = G(5, [])
    assert global_clustering(empty) == 0.0 and average_local_clustering(empty) == 0.0
    assert np.all(empirical_mixing(empty, make_partition(5, 2)).entries == 0)


def test_k4_minus_edge():
    g = G(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    assert global_clustering(g) == pytest.approx(0.75)
    assert average_local_clustering(g) == pytest.approx(5 / 6)
    np.testing.assert_allclose(local_clustering(g), [2 / 3, 2 / 3, 1, 1])


def test_star_and_low_degree_convention():
    g = G(5, [(0, k) for k in range(1, 5)])
    assert global_clustering(g) == 0.0
    h = G(4, [(0, 1), (1, 2), (0, 2)])  # node 3 isolated
    assert average_local_clustering(h) == pytest.approx(0.75)
    assert average_local_clustering(h, exclude_low_degree=True) == 1.0


def test_k4_two_blocks():
    g = G(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    L = empirical_mixing(g, make_partition(4, 2)).entries
    np.testing.assert_array_equal(L, [[2, 4], [4, 2]])
    assert L.sum() == 2 * g.num_edges


def test_partition_mismatch():
    with pytest.raises(ValueError):
        empirical_mixing(G(3, [(0, 1)]), make_partition(4, 2))


def test_mixing_relative_error_examples():
    A = MixingMatrix([[1.0, 2.0], [2.0, 1.0]], EDGE_COUNTS)
    B = MixingMatrix([[1.0, 1.0], [1.0, 1.0]], EDGE_COUNTS)
    assert mixing_relative_error(A, B) == pytest.approx(0.5)
    assert mixing_relative_error(B, B) == 0.0
    with pytest.raises(ValueError):
        mixing_relative_error(A, MixingMatrix(np.zeros((2, 2)), EDGE_COUNTS))
    with pytest.raises(ValueError):
        mixing_relative_error(A, MixingMatrix([[1.0]], EDGE_COUNTS))
    with pytest.raises(ValueError):
        mixing_relative_error(A, MixingMatrix([[1.0, 0.0], [0.0, 1.0]], NORMALIZED))


def test_clustering_relative_error_examples():
    assert clustering_relative_error(0.3, 0.4) == pytest.approx(0.25)
    assert clustering_relative_error(0.4, 0.4) == 0.0
    with pytest.raises(ValueError):
        clustering_relative_error(0.1, 0.0)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(0, 40), p=st.floats(0, 1), n=st.integers(1, 4))
def test_against_brute_force(seed, N, p, n):
    rng = np.random.default_rng(seed)
    edges = random_graph(rng, N, p)
    g = G(N, edges)
    assert triangles_per_node(g).tolist() == brute_triangles(N, edges)
    assert global_clustering(g) == pytest.approx(brute_transitivity(N, edges), rel=1e-12, abs=0)
    np.testing.assert_allclose(local_clustering(g), brute_local_clustering(N, edges), rtol=1e-12)
    deg = degree_sequence(g)
    assert deg.sum() == 2 * len(edges)
    if N >= n:
        part = make_partition(N, n)
        L = empirical_mixing(g, part).entries
        np.testing.assert_array_equal(L, brute_mixing(edges, part.block_of, n))
        # handshake: each block's row sum is its total degree
        np.testing.assert_array_equal(L.sum(axis=1), np.bincount(part.block_of, weights=deg, minlength=n))


@pytest.mark.parametrize("seed", range(5))
def test_against_networkx(seed):
    rng = np.random.default_rng(seed)
    N = 150
    edges = random_graph(rng, N, 0.06)
    g = G(N, edges)
    nxg = nx.Graph()
    nxg.add_nodes_from(range(N))
    nxg.add_edges_from(edges)
    assert global_clustering(g) == pytest.approx(nx.transitivity(nxg), rel=1e-12)
    assert average_local_clustering(g) == pytest.approx(nx.average_clustering(nxg), rel=1e-12)


def test_sampled_mixing_converges_to_expectation():
    N, n = 120, 3
    rng = np.random.default_rng(6)
    part = make_partition(N, n)
    Phi = np.array([[200.0, 40.0, 10.0], [40.0, 150.0, 30.0], [10.0, 30.0, 100.0]])
    state = LatentState(sample_angles(N, rng), rng.uniform(0.2, 1, N), Phi, 2.0, default_radius(N), part)
    P = edge_probabilities(state)
    onehot = np.eye(n)[part.block_of]
    expected = onehot.T @ P @ onehot  # diagonal already counts each intra pair twice
    draws = np.array([empirical_mixing(sample_graph(state, s), part).entries for s in range(200)])
    se = draws.std(axis=0, ddof=1) / math.sqrt(200)
    assert np.all(np.abs(draws.mean(axis=0) - expected) <= 3 * se)


def test_graph_stats_row():
    g = G(4, [(0, 1), (1, 2), (0, 2)])
    rep = graph_stats(g, make_partition(4, 2))
    row = rep.row()
    assert row == {
        "N": 4,
        "edges": 3,
        "mean_degree": 1.5,
        "isolated": 1,
        "global_clustering": 1.0,
        "local_clustering": 0.75,
    }
