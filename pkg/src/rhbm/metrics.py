"""Empirical graph statistics and the reconstruction error measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generation import Graph
from .mixing import EDGE_COUNTS, BlockPartition, MixingMatrix


def _check_partition(g: Graph, part: BlockPartition) -> None:
    if part.N != g.N:
        raise ValueError(f"partition covers {part.N} nodes but the graph has {g.N}")


def empirical_mixing(g: Graph, part: BlockPartition) -> MixingMatrix:
    """Observed block link counts; intra-block links are counted twice."""
    _check_partition(g, part)
    L = np.zeros((part.n, part.n))
    if g.num_edges:
        bi = part.block_of[g.edges[:, 0]]
        bj = part.block_of[g.edges[:, 1]]
        np.add.at(L, (bi, bj), 1.0)
        np.add.at(L, (bj, bi), 1.0)
    return MixingMatrix(L, EDGE_COUNTS)


def degree_sequence(g: Graph) -> np.ndarray:
    return np.bincount(g.edges.ravel(), minlength=g.N)


def adjacency_lists(g: Graph) -> list[np.ndarray]:
    """Sorted neighbour arrays per node."""
    both = np.concatenate((g.edges, g.edges[:, ::-1]))
    both = both[np.lexsort((both[:, 1], both[:, 0]))]
    starts = np.searchsorted(both[:, 0], np.arange(g.N + 1))
    return [both[starts[v]:starts[v + 1], 1] for v in range(g.N)]


def triangles_per_node(g: Graph) -> np.ndarray:
    """Number of triangles through each node, by sorted-neighbour intersection."""
    adj = adjacency_lists(g)
    tri = np.zeros(g.N, dtype=np.int64)
    for u, v in g.edges:
        common = np.intersect1d(adj[u], adj[v], assume_unique=True).size
        tri[u] += common
        tri[v] += common
    # every triangle at u is seen from both of its edges incident on u
    return tri // 2


def global_clustering(g: Graph) -> float:
    """Transitivity: 3 x triangles / paths of length two (0 without such paths)."""
    deg = degree_sequence(g).astype(float)
    paths = np.sum(deg * (deg - 1) / 2)
    if paths == 0:
        return 0.0
    triangles = triangles_per_node(g).sum() / 3
    return float(3 * triangles / paths)


def local_clustering(g: Graph) -> np.ndarray:
    deg = degree_sequence(g).astype(float)
    tri = triangles_per_node(g)
    c = np.zeros(g.N)
    ok = deg >= 2
    c[ok] = 2 * tri[ok] / (deg[ok] * (deg[ok] - 1))
    return c


def average_local_clustering(g: Graph, exclude_low_degree: bool = False) -> float:
    """Mean local clustering.

    Nodes of degree below two contribute zero by default; with
    ``exclude_low_degree`` they are left out of the mean instead.
    """
    c = local_clustering(g)
    if exclude_low_degree:
        c = c[degree_sequence(g) >= 2]
    return float(c.mean()) if c.size else 0.0


def mixing_relative_error(F_out: MixingMatrix, F_in: MixingMatrix) -> float:
    """Entrywise L1 distance relative to the L1 norm of ``F_in``."""
    A, B = np.asarray(F_out.entries), np.asarray(F_in.entries)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    if F_out.convention != F_in.convention:
        raise ValueError("both matrices must use the same convention")
    denom = np.abs(B).sum()
    if denom == 0:
        raise ValueError("reference mixing matrix is identically zero")
    return float(np.abs(A - B).sum() / denom)


def clustering_relative_error(C: float, C_in: float) -> float:
    if not C_in > 0:
        raise ValueError("reference clustering must be positive")
    return abs(C - C_in) / C_in


STATS_COLUMNS = (
    "N",
    "edges",
    "mean_degree",
    "isolated",
    "global_clustering",
    "local_clustering",
)


@dataclass
class StatsReport:
    N: int
    edges: int
    mean_degree: float
    isolated: int
    global_clustering: float
    local_clustering: float
    degrees: np.ndarray
    mixing: MixingMatrix

    def row(self) -> dict:
        return {k: getattr(self, k) for k in STATS_COLUMNS}


def graph_stats(g: Graph, part: BlockPartition) -> StatsReport:
    deg = degree_sequence(g)
    return StatsReport(
        N=g.N,
        edges=g.num_edges,
        mean_degree=float(deg.mean()) if g.N else 0.0,
        isolated=int(np.sum(deg == 0)),
        global_clustering=global_clustering(g),
        local_clustering=average_local_clustering(g),
        degrees=deg,
        mixing=empirical_mixing(g, part),
    )
