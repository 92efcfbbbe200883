"""Sampling graphs from latent states with independent Bernoulli edges."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .calibration import LatentState, default_radius
from .kernel import _check_beta
from .pairrng import pair_uniforms

# rows per chunk of the pair scan; bounds temporaries to ~CHUNK * N doubles
CHUNK = 256


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..N-1``.

    ``edges`` is an ``(E, 2)`` array of pairs with ``i < j``, sorted
    lexicographically and free of duplicates.
    """

    N: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= self.N:
                raise ValueError(f"edge endpoint outside [0, {self.N})")
            if np.any(e[:, 0] >= e[:, 1]):
                raise ValueError("edges must be stored as (i, j) with i < j")
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
            if np.any(np.all(e[1:] == e[:-1], axis=1)):
                raise ValueError("duplicate edges")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_pairs(cls, N: int, pairs) -> "Graph":
        """Build from arbitrary pairs, orienting each as ``(min, max)`` and dropping repeats."""
        p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if np.any(p[:, 0] == p[:, 1]):
            raise ValueError("self-loops are not allowed")
        p = np.unique(np.sort(p, axis=1), axis=0)
        return cls(N, p)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def edge_set(self) -> set[tuple[int, int]]:
        return set(map(tuple, self.edges.tolist()))


def angular_separation(theta_i, theta_j):
    """Shortest arc between angles, in ``[0, pi]``."""
    return np.pi - np.abs(np.pi - np.abs(np.asarray(theta_i) - np.asarray(theta_j)))


def fermi_dirac(x, scale, beta: float):
    """``1 / (1 + (x / scale)**beta)`` with ``scale = 0`` giving probability 0."""
    x = np.asarray(x, dtype=float)
    scale = np.asarray(scale, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        p = 1.0 / (1.0 + (x / scale) ** beta)
    return np.where(scale > 0, p, 0.0)


def _rhbm_block(state: LatentState) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    theta, phi, b = state.theta, state.phi, state.partition.block_of
    coef = state.mu_tilde * state.Phi

    def block(rows, cols):
        x = state.R * angular_separation(theta[rows][:, None], theta[cols][None, :])
        scale = coef[b[rows][:, None], b[cols][None, :]] * (phi[rows][:, None] * phi[cols][None, :])
        return fermi_dirac(x, scale, state.beta)

    return block


def edge_probability(i: int, j: int, state: LatentState) -> float:
    if i == j:
        raise ValueError("no self-loops: i and j must differ")
    return float(_rhbm_block(state)(np.array([i]), np.array([j]))[0, 0])


def edge_probabilities(state: LatentState) -> np.ndarray:
    """Dense ``N x N`` probability matrix with a zero diagonal (small graphs only)."""
    idx = np.arange(state.N)
    P = _rhbm_block(state)(idx, idx)
    np.fill_diagonal(P, 0.0)
    return P


def _draws(seed, rows, cols, stream, rng):
    if rng is not None:
        return rng.random((rows.size, cols.size))
    return pair_uniforms(seed, rows[:, None], cols[None, :], stream=stream)


def scan_pairs(N: int, prob_block, seed: int, stream: int = 0, chunk: int = CHUNK) -> Graph:
    """Bernoulli-sample every pair ``i < j`` using pair-keyed uniforms."""
    found = []
    for r0 in range(0, N - 1, chunk):
        rows = np.arange(r0, min(r0 + chunk, N - 1))
        cols = np.arange(r0 + 1, N)
        P = prob_block(rows, cols)
        U = pair_uniforms(seed, rows[:, None], cols[None, :], stream=stream)
        hit = (U < P) & (cols[None, :] > rows[:, None])
        ii, jj = np.nonzero(hit)
        found.append(np.column_stack((rows[ii], cols[jj])))
    edges = np.concatenate(found) if found else np.zeros((0, 2), dtype=np.int64)
    return Graph(N, edges)


def sample_graph(state: LatentState, seed: int) -> Graph:
    """Direct construction: one scan over all node pairs."""
    return scan_pairs(state.N, _rhbm_block(state), seed)


def sample_graph_blockwise(state: LatentState, seed: int, pair_keyed: bool = True) -> Graph:
    """Union of one mono- or bipartite graph per block pair, sharing all latents.

    With ``pair_keyed`` the uniforms come from the same ``(seed, i, j)``
    stream as :func:`sample_graph`, so both return the same edge set.
    Otherwise each block pair draws from its own generator spawned from
    ``seed``.
    """
    part = state.partition
    block = _rhbm_block(state)
    blocks = part.block_slices()
    found = []
    for I in range(part.n):
        for J in range(I, part.n):
            rows, cols = blocks[I], blocks[J]
            rng = None
            if not pair_keyed:
                rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(I, J)))
            P = block(rows, cols)
            U = _draws(seed, rows, cols, 0, rng)
            hit = U < P
            if I == J:
                hit &= rows[:, None] < cols[None, :]
            ii, jj = np.nonzero(hit)
            found.append(np.column_stack((rows[ii], cols[jj])))
    edges = np.concatenate(found) if found else np.zeros((0, 2), dtype=np.int64)
    return Graph(state.N, np.sort(edges, axis=1))


@dataclass(frozen=True)
class S1Params:
    """Plain S1 model: hidden degrees on a circle of radius ``R``.

    ``mu`` defaults to ``beta sin(pi / beta) / (2 pi <kappa>)`` and ``R`` to
    ``N / (2 pi)``, which make expected degrees converge to ``kappa``.
    """

    kappa: np.ndarray
    beta: float
    mu: float | None = None
    R: float | None = None
    D: int = 1

    def __post_init__(self):
        _check_beta(self.beta)
        kappa = np.asarray(self.kappa, dtype=float)
        if np.any(kappa < 0):
            raise ValueError("hidden degrees must be non-negative")
        object.__setattr__(self, "kappa", kappa)
        if self.D != 1:
            raise ValueError("the baseline generator is one-dimensional")
        if self.mu is None:
            mean = kappa.mean() if kappa.size else 1.0
            object.__setattr__(self, "mu", float(self.beta * np.sin(np.pi / self.beta) / (2 * np.pi * mean)))
        if self.R is None:
            object.__setattr__(self, "R", default_radius(kappa.size))
        if not self.mu > 0:
            raise ValueError("mu must be positive")


def s1_block(params: S1Params, theta):
    theta = np.asarray(theta, dtype=float)
    kappa = params.kappa

    def block(rows, cols):
        x = params.R * angular_separation(theta[rows][:, None], theta[cols][None, :])
        scale = params.mu * kappa[rows][:, None] * kappa[cols][None, :]
        return fermi_dirac(x, scale, params.beta)

    return block


def s1_edge_probability(params: S1Params, theta, i: int, j: int) -> float:
    if i == j:
        raise ValueError("no self-loops: i and j must differ")
    return float(s1_block(params, theta)(np.array([i]), np.array([j]))[0, 0])


def sample_s1_graph(params: S1Params, theta, seed: int) -> Graph:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != params.kappa.shape:
        raise ValueError("theta and kappa must have the same length")
    return scan_pairs(theta.size, s1_block(params, theta), seed)
