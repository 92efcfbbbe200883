"""Latent node features and their calibration against degree and mixing targets."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .kernel import KernelTable, _check_beta
from .mixing import BlockPartition, MixingMatrix, capacity_load

logger = logging.getLogger(__name__)

DAMPING = 0.5


def default_radius(N: int) -> float:
    """Circle radius giving unit node density."""
    return N / (2.0 * np.pi)


def mu_tilde(beta: float, R: float) -> float:
    return R * beta * np.sin(np.pi / beta)


@dataclass(frozen=True)
class LatentState:
    """Angles, fitnesses and block forces; fixes every edge probability.

    The block gauge (fitnesses summing to one inside each block) is not
    enforced on construction so that gauge transformations can be represented;
    :meth:`gauge_fixed` restores it.
    """

    theta: np.ndarray
    phi: np.ndarray
    Phi: np.ndarray
    beta: float
    R: float
    partition: BlockPartition

    def __post_init__(self):
        _check_beta(self.beta)
        theta = np.asarray(self.theta, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        Phi = np.asarray(self.Phi, dtype=float)
        N, n = self.partition.N, self.partition.n
        if theta.shape != (N,) or phi.shape != (N,):
            raise ValueError(f"theta and phi must have shape ({N},)")
        if Phi.shape != (n, n):
            raise ValueError(f"Phi must have shape ({n}, {n}), got {Phi.shape}")
        if np.any(~(phi > 0)) or not np.all(np.isfinite(phi)):
            raise ValueError("fitnesses must be positive and finite")
        if np.any(Phi < 0) or not np.array_equal(Phi, Phi.T):
            raise ValueError("Phi must be symmetric and non-negative")
        if not self.R > 0:
            raise ValueError("R must be positive")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "Phi", Phi)

    @property
    def N(self) -> int:
        return self.partition.N

    @property
    def mu_tilde(self) -> float:
        return mu_tilde(self.beta, self.R)

    def block_sums(self) -> np.ndarray:
        return np.bincount(self.partition.block_of, weights=self.phi, minlength=self.partition.n)

    def rescale_block(self, block: int, c: float) -> "LatentState":
        """Multiply the fitnesses of ``block`` by ``c`` and divide its forces by ``c``."""
        phi = self.phi.copy()
        phi[self.partition.block_of == block] *= c
        scale = np.ones(self.partition.n)
        scale[block] = 1.0 / c
        # the diagonal force sees both endpoints rescaled, hence 1/c**2 there
        return replace(self, phi=phi, Phi=self.Phi * np.outer(scale, scale))

    def gauge_fixed(self) -> "LatentState":
        s = self.block_sums()
        return replace(self, phi=self.phi / s[self.partition.block_of], Phi=_sym(self.Phi * np.outer(s, s)))


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def sample_raw_fitness(N: int, gamma: float, rng: np.random.Generator) -> np.ndarray:
    """Pareto draws with minimum 1 and density exponent ``gamma``."""
    if not gamma > 2:
        raise ValueError(f"gamma must exceed 2 (finite mean), got {gamma}")
    return 1.0 + rng.pareto(gamma - 1.0, size=N)


def sample_fitness(part: BlockPartition, gamma: float, rng: np.random.Generator) -> np.ndarray:
    """Power-law fitness normalized to sum to one inside each block."""
    raw = sample_raw_fitness(part.N, gamma, rng)
    return normalize_shares(raw, part)


def normalize_shares(raw, part: BlockPartition) -> np.ndarray:
    raw = np.asarray(raw, dtype=float)
    sums = np.bincount(part.block_of, weights=raw, minlength=part.n)
    return raw / sums[part.block_of]


def sample_feasible_fitness(
    part: BlockPartition,
    F: MixingMatrix,
    gamma: float,
    rng: np.random.Generator,
    max_load: float = 1.0,
    max_rounds: int = 1000,
) -> tuple[np.ndarray, int]:
    """Block-normalized Pareto fitness with no node above its attainable degree.

    Blocks holding a node whose total target degree cannot be reached are
    redrawn whole until none is left. Returns the shares and the number of
    block redraws.
    """
    raw = sample_raw_fitness(part.N, gamma, rng)
    redraws = 0
    for _ in range(max_rounds):
        f = normalize_shares(raw, part)
        bad = np.flatnonzero(capacity_load(F, part, f) >= max_load)
        if bad.size == 0:
            return f, redraws
        for I in bad:
            members = part.block_of == I
            raw[members] = sample_raw_fitness(int(members.sum()), gamma, rng)
        redraws += bad.size
    raise RuntimeError(f"no feasible fitness draw after {max_rounds} rounds")


def sample_angles(N: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, 2.0 * np.pi, size=N)


def expected_block_degrees(state: LatentState, table: KernelTable | None = None) -> np.ndarray:
    """Angle-averaged expected degree of every node towards every block.

    Returns an ``(N, n)`` array; self-pairs are excluded.
    """
    if table is None:
        table = KernelTable(state.beta, state.R)
    part = state.partition
    blocks = part.block_slices()
    deg = np.zeros((part.N, part.n))
    log_phi = np.log(state.phi)
    log_c = np.log(state.mu_tilde)
    with np.errstate(divide="ignore"):
        log_Phi = np.log(state.Phi)
    for I in range(part.n):
        rows = blocks[I]
        for J in range(I, part.n):
            if state.Phi[I, J] == 0:
                continue
            cols = blocks[J]
            G = table.from_log((log_c + log_Phi[I, J]) + log_phi[rows][:, None] + log_phi[cols][None, :])
            if I == J:
                np.fill_diagonal(G, 0.0)
                deg[rows, I] = G.sum(axis=1)
            else:
                deg[rows, J] = G.sum(axis=1)
                deg[cols, I] = G.sum(axis=0)
    return deg


def block_link_totals(deg: np.ndarray, part: BlockPartition) -> np.ndarray:
    """``L[I, J] = sum_{i in I} deg[i, J]``; the diagonal counts intra links twice."""
    L = np.zeros((part.n, part.n))
    np.add.at(L, part.block_of, deg)
    return _sym(L)


@dataclass
class CalibrationReport:
    """Outcome of :func:`calibrate`.

    ``max_degree_residual`` and ``max_block_residual`` are the relative
    misfits of node total degrees and block link totals, the quantities the
    iteration controls. ``max_block_degree_residual`` is the stronger per-node,
    per-block misfit, kept as a diagnostic.
    """

    iterations: int
    max_degree_residual: float
    max_block_residual: float
    max_block_degree_residual: float
    converged: bool
    tol: float
    trace: list[tuple[float, float, float]] = field(default_factory=list)
    lam: np.ndarray | None = None
    eta: np.ndarray | None = None

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "tol": self.tol,
            "max_degree_residual": self.max_degree_residual,
            "max_block_residual": self.max_block_residual,
            "max_block_degree_residual": self.max_block_degree_residual,
        }


def _relative(actual: np.ndarray, target: np.ndarray) -> np.ndarray:
    out = np.zeros_like(target, dtype=float)
    pos = target > 0
    out[pos] = np.abs(actual[pos] - target[pos]) / target[pos]
    # a zero target is only matched by an exact zero
    out[~pos] = np.where(actual[~pos] > 0, np.inf, 0.0)
    return out


def residuals(deg: np.ndarray, f: np.ndarray, F: np.ndarray, part: BlockPartition) -> tuple[float, float, float]:
    """(total degree, block total, per-block degree) maximum relative residuals."""
    row_F = F[part.block_of, :]
    node = _relative(deg.sum(axis=1), f * row_F.sum(axis=1))
    block = _relative(block_link_totals(deg, part), F)
    node_block = _relative(deg, f[:, None] * row_F)
    as_max = lambda r: float(r.max()) if r.size else 0.0  # noqa: E731
    return as_max(node), as_max(block), as_max(node_block)


def lagrange_multipliers(state: LatentState) -> tuple[np.ndarray, np.ndarray]:
    """Degree and block multipliers consistent with a gauge-fixed state.

    Uses ``exp(-lambda_i / beta) = phi_i N_I`` and
    ``exp(-eta_IJ / beta) = mu_tilde Phi_IJ / (N_I N_J)``, i.e. the free
    normalization ``<exp(-lambda / beta)>`` set to one.
    """
    sizes = state.partition.sizes.astype(float)
    lam = -state.beta * np.log(state.phi * sizes[state.partition.block_of])
    with np.errstate(divide="ignore"):
        eta = -state.beta * np.log(state.mu_tilde * state.Phi / np.outer(sizes, sizes))
    return lam, eta


def calibrate(
    f,
    F: MixingMatrix,
    beta: float,
    R: float,
    part: BlockPartition,
    theta=None,
    tol: float = 1e-2,
    max_iter: int = 1000,
) -> tuple[LatentState, CalibrationReport]:
    """Solve for fitnesses and block forces hitting finite-size targets.

    Starts from the large-N solution ``phi = f, Phi = F`` and alternates a
    multiplicative block-force correction with a damped fitness correction,
    re-imposing the block gauge after each sweep. Angles do not enter the
    expected values; ``theta`` is only carried into the returned state.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    f = np.asarray(f, dtype=float)
    targets = F.entries
    if theta is None:
        theta = np.zeros(part.N)
    table = KernelTable(beta, R)
    state = LatentState(theta, f.copy(), targets.copy(), beta, R, part).gauge_fixed()
    node_target = f * targets[part.block_of, :].sum(axis=1)
    live = node_target > 0

    best = None
    trace = []
    sweep = 0
    while True:
        deg = expected_block_degrees(state, table)
        res = residuals(deg, f, targets, part)
        trace.append(res)
        if best is None or max(res[:2]) < max(best[1][:2]):
            best = (state, res)
        if max(res[:2]) <= tol or sweep >= max_iter:
            break
        sweep += 1

        L = block_link_totals(deg, part)
        ratio = np.ones_like(targets)
        np.divide(targets, L, out=ratio, where=L > 0)
        Phi = _sym(np.where(targets > 0, state.Phi * ratio, 0.0))
        state = replace(state, Phi=Phi)

        total = expected_block_degrees(state, table).sum(axis=1)
        step = np.ones(part.N)
        ok = live & (total > 0)
        step[ok] = (node_target[ok] / total[ok]) ** DAMPING
        state = replace(state, phi=state.phi * step).gauge_fixed()
        logger.debug("sweep %d residuals %s", sweep, res)

    state, res = best
    converged = max(res[:2]) <= tol
    if not converged:
        logger.warning("calibration stopped after %d sweeps at residual %.3g", sweep, max(res[:2]))
    lam, eta = lagrange_multipliers(state)
    report = CalibrationReport(
        iterations=sweep,
        max_degree_residual=res[0],
        max_block_residual=res[1],
        max_block_degree_residual=res[2],
        converged=converged,
        tol=tol,
        trace=trace,
        lam=lam,
        eta=eta,
    )
    return state, report
