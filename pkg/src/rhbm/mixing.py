"""Block partitions and target mixing matrices.

Mixing matrices follow the doubled-diagonal convention: ``F[I, J]`` is the
expected number of links between blocks I and J for I != J, and ``F[I, I]`` is
twice the expected number of links inside block I. Row sums are therefore the
total degree of each block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORMALIZED = "normalized"
EDGE_COUNTS = "edge-counts"

_SUM_RTOL = 1e-9
# link budgets may be used exactly; this absorbs rounding in the sums
BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class BlockPartition:
    """Assignment of ``N`` nodes to ``n`` disjoint, non-empty blocks."""

    block_of: np.ndarray
    sizes: np.ndarray = field(init=False)

    def __post_init__(self):
        block_of = np.asarray(self.block_of, dtype=np.int64)
        if block_of.ndim != 1:
            raise ValueError("block_of must be one-dimensional")
        if block_of.size and block_of.min() < 0:
            raise ValueError("block ids must be non-negative")
        sizes = np.bincount(block_of) if block_of.size else np.zeros(0, dtype=np.int64)
        if np.any(sizes == 0):
            raise ValueError("block ids must be contiguous 0..n-1 with no empty block")
        block_of.setflags(write=False)
        sizes.setflags(write=False)
        object.__setattr__(self, "block_of", block_of)
        object.__setattr__(self, "sizes", sizes)

    @property
    def N(self) -> int:
        return int(self.block_of.size)

    @property
    def n(self) -> int:
        return int(self.sizes.size)

    def members(self, block: int) -> np.ndarray:
        return np.flatnonzero(self.block_of == block)

    def block_slices(self) -> list[np.ndarray]:
        """Node ids of every block, in block order."""
        order = np.argsort(self.block_of, kind="stable")
        return np.split(order, np.cumsum(self.sizes)[:-1])


@dataclass(frozen=True)
class MixingMatrix:
    """Symmetric non-negative ``n x n`` matrix with a scale convention flag."""

    entries: np.ndarray
    convention: str = EDGE_COUNTS

    def __post_init__(self):
        F = np.array(self.entries, dtype=float)
        if F.ndim != 2 or F.shape[0] != F.shape[1]:
            raise ValueError(f"mixing matrix must be square, got shape {F.shape}")
        if self.convention not in (NORMALIZED, EDGE_COUNTS):
            raise ValueError(f"unknown convention {self.convention!r}")
        if not np.all(np.isfinite(F)) or np.any(F < 0):
            raise ValueError("mixing matrix entries must be finite and non-negative")
        if not np.allclose(F, F.T, rtol=1e-12, atol=0.0):
            raise ValueError("mixing matrix must be symmetric")
        F = 0.5 * (F + F.T)
        F.setflags(write=False)
        object.__setattr__(self, "entries", F)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def total(self) -> float:
        return float(self.entries.sum())


@dataclass(frozen=True)
class MixingParams:
    n: int
    rho: float
    q: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"q must lie in (0, 1], got {self.q}")


def build_normalized_mixing(params: MixingParams) -> MixingMatrix:
    """Parametric mixing matrix summing to 2.

    ``rho`` moves mass between the diagonal (assortative, ``rho -> 1``) and the
    off-diagonal (disassortative, ``rho -> -1``); off-diagonal entries decay as
    ``q**|I - J|``.
    """
    n, rho, q = int(params.n), float(params.rho), float(params.q)
    if n == 1:
        if rho != 1.0:
            raise ValueError("a single block cannot hold off-diagonal mass; use rho=1")
        return MixingMatrix(np.array([[2.0]]), NORMALIZED)
    dist = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    off = np.where(dist > 0, q ** dist.astype(float), 0.0)
    lags = np.arange(1, n)
    norm = 2.0 * np.sum((n - lags) * q ** lags.astype(float))
    F = (rho + 1.0) / n * np.eye(n) + (1.0 - rho) / norm * off
    return MixingMatrix(F, NORMALIZED)


def scale_mixing_to_edges(F_norm: MixingMatrix, N: int, avg_degree: float) -> MixingMatrix:
    """Scale a normalized matrix so its entries sum to ``N * avg_degree``."""
    if F_norm.convention != NORMALIZED or not np.isclose(F_norm.total, 2.0, rtol=_SUM_RTOL, atol=0):
        raise ValueError("expected a normalized mixing matrix summing to 2")
    M = N * avg_degree / 2.0
    return MixingMatrix(F_norm.entries * M, EDGE_COUNTS)


def make_partition(N: int, n: int, sizes=None) -> BlockPartition:
    """Contiguous partition of ``range(N)`` into ``n`` blocks.

    Without explicit ``sizes`` the first ``N % n`` blocks get one extra node.
    """
    if n < 1 or N < 0:
        raise ValueError(f"need n >= 1 and N >= 0, got N={N}, n={n}")
    if n > N:
        raise ValueError(f"cannot split {N} nodes into {n} non-empty blocks")
    if sizes is None:
        base, extra = divmod(N, n)
        sizes = np.full(n, base, dtype=np.int64)
        sizes[:extra] += 1
    else:
        sizes = np.asarray(sizes, dtype=np.int64)
        if sizes.shape != (n,) or np.any(sizes <= 0) or sizes.sum() != N:
            raise ValueError(f"explicit sizes must be {n} positive counts summing to {N}")
    return BlockPartition(np.repeat(np.arange(n), sizes))


@dataclass
class ValidationReport:
    """Feasibility violations of a set of calibration targets.

    ``hard`` entries make the block-level constraints impossible; ``soft``
    entries flag nodes whose per-block target degree cannot be met, which the
    calibrator absorbs through their other blocks.
    """

    hard: list[str] = field(default_factory=list)
    soft: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.hard

    def __bool__(self) -> bool:
        return bool(self.hard or self.soft)

    def lines(self) -> list[str]:
        return [f"hard: {m}" for m in self.hard] + [f"soft: {m}" for m in self.soft]


def validate_targets(F: MixingMatrix, part: BlockPartition, f, max_soft: int = 50) -> ValidationReport:
    """Check that edge-count targets fit inside the partition.

    ``max_soft`` caps the number of per-node messages; the count of omitted
    ones is appended as a final message.
    """
    report = ValidationReport()
    E = F.entries
    sizes = part.sizes.astype(float)
    f = np.asarray(f, dtype=float)
    if E.shape != (part.n, part.n):
        report.hard.append(f"mixing matrix is {E.shape}, partition has {part.n} blocks")
        return report
    if f.shape != (part.N,):
        report.hard.append(f"expected {part.N} shares, got {f.shape}")
        return report

    for I in range(part.n):
        for J in range(I, part.n):
            cap = sizes[I] * (sizes[I] - 1) if I == J else sizes[I] * sizes[J]
            if E[I, J] > cap:
                report.hard.append(f"F[{I},{J}]={E[I, J]:g} exceeds capacity {cap:g}")

    bad = np.flatnonzero(~(f > 0))
    for i in bad:
        report.hard.append(f"share f[{i}]={f[i]:g} is not positive")
    sums = np.bincount(part.block_of, weights=f, minlength=part.n)
    for I in np.flatnonzero(np.abs(sums - 1.0) > 1e-9):
        report.hard.append(f"shares of block {I} sum to {sums[I]:.12g}, not 1")

    # total degree f_i sum_J F_IJ against what block I's budget can ever give i
    ratio = node_capacity_ratio(F, part, f)
    for i in np.flatnonzero(ratio >= 1.0):
        report.hard.append(f"node {i}: target degree exceeds its attainable degree by a factor {ratio[i]:.3g}")
    load = block_capacity_ratio(F, part, f)
    for I, kind in np.argwhere(load > 1.0 + BUDGET_TOL):
        what = "intra" if kind == 0 else "inter"
        report.hard.append(f"block {I}: node excesses overload its {what}-block budget by a factor {load[I, kind]:.3g}")

    # f_i F_IJ against the available neighbours in J (self excluded when J = I_i)
    targets = f[:, None] * E[part.block_of, :]
    avail = np.broadcast_to(sizes, targets.shape).copy()
    avail[np.arange(part.N), part.block_of] -= 1
    over = np.argwhere((targets >= avail) & (targets > 0))
    for i, J in over[:max_soft]:
        report.soft.append(
            f"node {i}: target degree {targets[i, J]:.4g} towards block {J} "
            f"reaches its {int(avail[i, J])} available neighbours"
        )
    if len(over) > max_soft:
        report.soft.append(f"... {len(over) - max_soft} more node/block targets saturated")
    return report


def node_capacity_ratio(F: MixingMatrix, part: BlockPartition, f) -> np.ndarray:
    """Target total degree of each node over the most it could attain.

    Towards block J a node can have at most ``N_J`` neighbours (``N_I - 1`` in
    its own block), and no more than the block pair's link budget: ``F_IJ``
    off the diagonal, ``F_II / 2`` on it.
    """
    target, cap = _node_caps(F, part, f)
    return _ratio(target, cap.sum(axis=1))


def block_capacity_ratio(F: MixingMatrix, part: BlockPartition, f) -> np.ndarray:
    """Load of each block's intra and inter link budgets, shape ``(n, 2)``.

    Whatever a node's target exceeds its best intra-block degree must come
    from other blocks, and vice versa; summed over the block these excesses
    cannot outgrow ``sum_{J != I} F_IJ`` and ``F_II`` respectively.
    """
    target, cap = _node_caps(F, part, f)
    E = F.entries
    own = cap[np.arange(part.N), part.block_of]
    need_inter = np.maximum(target - own, 0.0)
    need_intra = np.maximum(target - (cap.sum(axis=1) - own), 0.0)
    budget_intra = np.diag(E)
    budget_inter = E.sum(axis=1) - budget_intra
    out = np.zeros((part.n, 2))
    out[:, 0] = _ratio(np.bincount(part.block_of, need_intra, part.n), budget_intra)
    out[:, 1] = _ratio(np.bincount(part.block_of, need_inter, part.n), budget_inter)
    return out


def capacity_load(F: MixingMatrix, part: BlockPartition, f) -> np.ndarray:
    """Per-block worst node load; ``inf`` where a link budget is overdrawn.

    A budget can be used exactly (a single block needs all of ``F_II``), so
    only loads above one count against it.
    """
    node = np.zeros(part.n)
    np.maximum.at(node, part.block_of, node_capacity_ratio(F, part, f))
    over = block_capacity_ratio(F, part, f).max(axis=1) > 1.0 + BUDGET_TOL
    return np.where(over, np.inf, node)


def _node_caps(F, part, f):
    E = F.entries
    sizes = part.sizes.astype(float)
    eye = np.eye(part.n, dtype=bool)
    cap = np.minimum(sizes[None, :] - eye, np.where(eye, E / 2.0, E))
    target = np.asarray(f, dtype=float) * E[part.block_of, :].sum(axis=1)
    return target, cap[part.block_of, :]


def _ratio(num, den):
    num = np.asarray(num, dtype=float)
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    out[(den == 0) & (num > 0)] = np.inf
    return out
