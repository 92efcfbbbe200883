"""Experiment workflow: calibrated graph generation, parameter sweeps, evaluation."""

from __future__ import annotations

import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import io
from .calibration import (
    CalibrationReport,
    LatentState,
    calibrate,
    default_radius,
    sample_angles,
    sample_feasible_fitness,
    sample_fitness,
)
from .embedding import EmbeddingSD, expected_degrees_and_mixing, sample_graphs_from_embedding
from .generation import Graph, sample_graph
from .metrics import (
    StatsReport,
    average_local_clustering,
    clustering_relative_error,
    degree_sequence,
    empirical_mixing,
    global_clustering,
    graph_stats,
    mixing_relative_error,
)
from .mixing import (
    BlockPartition,
    MixingMatrix,
    MixingParams,
    ValidationReport,
    build_normalized_mixing,
    make_partition,
    scale_mixing_to_edges,
    validate_targets,
)

logger = logging.getLogger(__name__)

DEFAULT_GRID = {
    "N": [1000, 3000, 5000],
    "avg_degree": [5.0, 10.0, 20.0],
    "n": [2, 10, 100],
    "rho": [-0.5, 0.0, 0.5],
    "q": [0.5, 0.75, 1.0],
    "beta": [2.0, 5.0, 10.0],
}


@dataclass(frozen=True)
class ExperimentConfig:
    N: int = 3000
    avg_degree: float = 10.0
    gamma: float = 2.5
    beta: float = 2.0
    n: int = 10
    rho: float = 0.5
    q: float = 1.0
    seed: int = 0
    tol: float = 1e-2
    max_iter: int = 1000
    out: str = "out"
    samples: int = 10
    # fitness blocks loading any capacity above this are redrawn
    max_load: float = 0.8

    def __post_init__(self):
        MixingParams(self.n, self.rho, self.q)
        if self.N < self.n:
            raise ValueError(f"N={self.N} is smaller than the number of blocks n={self.n}")
        if not self.avg_degree > 0:
            raise ValueError("avg_degree must be positive")
        if not self.gamma > 2:
            raise ValueError("gamma must exceed 2")
        if not self.beta > 1:
            raise ValueError("beta must exceed 1")
        if not self.tol > 0 or self.max_iter < 0 or self.samples < 1:
            raise ValueError("tol must be positive, max_iter non-negative, samples at least 1")
        if not 0 < self.max_load <= 1:
            raise ValueError("max_load must lie in (0, 1]")

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        """Build from string values (e.g. a key=value file); unknown keys raise."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in types:
                raise ValueError(f"unknown configuration key {key!r}")
            kind = types[key]
            kwargs[key] = int(raw) if kind == "int" else float(raw) if kind == "float" else str(raw)
        return cls(**kwargs)

    def digest(self) -> str:
        items = sorted((k, v) for k, v in asdict(self).items() if k != "out")
        return hashlib.sha256(repr(items).encode()).hexdigest()[:12]


def child_seeds(seed: int) -> dict[str, int]:
    """Independent 64-bit seeds for each random component, all derived from ``seed``."""
    ss = np.random.SeedSequence(int(seed))
    names = ("fitness", "angles", "graph")
    return {name: int(child.generate_state(1, np.uint64)[0]) for name, child in zip(names, ss.spawn(3))}


@dataclass
class Instance:
    config: ExperimentConfig
    partition: BlockPartition
    target: MixingMatrix
    shares: np.ndarray
    validation: ValidationReport
    state: LatentState | None = None
    report: CalibrationReport | None = None
    graph: Graph | None = None
    stats: StatsReport | None = None
    redraws: int = 0
    timings: dict = field(default_factory=dict)


def build_targets(config: ExperimentConfig) -> tuple[BlockPartition, MixingMatrix]:
    part = make_partition(config.N, config.n)
    F_norm = build_normalized_mixing(MixingParams(config.n, config.rho, config.q))
    return part, scale_mixing_to_edges(F_norm, config.N, config.avg_degree)


def generate_instance(config: ExperimentConfig, sample: bool = True) -> Instance:
    """Targets, feasible shares, calibrated latent state and (optionally) one graph."""
    seeds = child_seeds(config.seed)
    part, F = build_targets(config)
    t0 = time.perf_counter()
    try:
        f, redraws = sample_feasible_fitness(
            part, F, config.gamma, np.random.default_rng(seeds["fitness"]), max_load=config.max_load
        )
    except RuntimeError:
        # no block can be made feasible; keep a plain draw so validation explains why
        f, redraws = sample_fitness(part, config.gamma, np.random.default_rng(seeds["fitness"])), -1
    inst = Instance(config, part, F, f, validate_targets(F, part, f), redraws=redraws)
    if not inst.validation.ok:
        return inst

    theta = sample_angles(config.N, np.random.default_rng(seeds["angles"]))
    R = default_radius(config.N)
    inst.state, inst.report = calibrate(
        f, F, config.beta, R, part, theta=theta, tol=config.tol, max_iter=config.max_iter
    )
    inst.timings["calibrate"] = time.perf_counter() - t0
    if sample:
        t1 = time.perf_counter()
        inst.graph = sample_graph(inst.state, seeds["graph"])
        inst.timings["sample"] = time.perf_counter() - t1
        inst.stats = graph_stats(inst.graph, part)
    return inst


ARTIFACTS = {
    "target": "mixing_target.csv",
    "partition": "partition.csv",
    "latent": "latent_state.csv",
    "forces": "block_forces.csv",
    "calibration": "calibration.txt",
    "trace": "calibration_trace.csv",
    "edges": "edges.txt",
    "edges_meta": "edges.meta",
    "stats": "stats.csv",
    "stats_mixing": "stats_mixing.csv",
    "validation": "validation.txt",
}


def write_instance(inst: Instance, out) -> dict[str, Path]:
    """Persist every artifact of an instance; returns the written paths."""
    out = io.ensure_dir(out)
    paths = {k: out / v for k, v in ARTIFACTS.items()}
    io.write_mixing(paths["target"], inst.target)
    io.write_partition(paths["partition"], inst.partition)
    if inst.validation:
        with open(paths["validation"], "w") as fh:
            fh.write("\n".join(inst.validation.lines()) + "\n")
    if inst.state is not None:
        io.write_latent_state(paths["latent"], paths["forces"], inst.state, inst.config.seed)
        io.write_calibration_report(paths["calibration"], paths["trace"], inst.report)
    if inst.graph is not None:
        io.write_edge_list(paths["edges"], inst.graph)
        io.write_key_values(
            paths["edges_meta"],
            {
                "N": inst.graph.N,
                "seed": inst.config.seed,
                "model": "rhbm",
                "config": inst.config.digest(),
                "isolated": inst.stats.isolated,
            },
        )
        io.write_stats_report(paths["stats"], paths["stats_mixing"], inst.stats)
    return {k: p for k, p in paths.items() if p.exists()}


SWEEP_COLUMNS = (
    "param",
    "value",
    "seed",
    "N",
    "avg_degree",
    "n",
    "rho",
    "q",
    "beta",
    "converged",
    "iterations",
    "max_degree_residual",
    "max_block_residual",
    "median_fitness_deviation",
    "mixing_relative_error",
    "mean_degree",
    "mean_degree_error",
    "global_clustering",
    "local_clustering",
    "isolated",
    "wall_time",
)


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    seeds: int = 10
    base: ExperimentConfig = ExperimentConfig()

    def __post_init__(self):
        if self.param not in {f.name for f in fields(ExperimentConfig)}:
            raise ValueError(f"cannot sweep unknown parameter {self.param!r}")
        if self.seeds < 1:
            raise ValueError("seeds must be at least 1")

    @classmethod
    def default_grid(cls, param: str, seeds: int = 10, base: ExperimentConfig | None = None) -> "SweepSpec":
        return cls(param, tuple(DEFAULT_GRID[param]), seeds, base or ExperimentConfig())

    def cells(self) -> list[ExperimentConfig]:
        cast = type(getattr(self.base, self.param))
        return [
            replace(self.base, **{self.param: cast(v), "seed": self.base.seed + s})
            for v in self.values
            for s in range(self.seeds)
        ]


def sweep_row(config: ExperimentConfig, param: str) -> dict:
    t0 = time.perf_counter()
    row = {k: getattr(config, k) for k in ("N", "avg_degree", "n", "rho", "q", "beta", "seed")}
    row.update(param=param, value=getattr(config, param))
    inst = generate_instance(config)
    if inst.state is None:
        row.update(converged=False, iterations=0)
        row["wall_time"] = time.perf_counter() - t0
        return row
    rep, st = inst.report, inst.stats
    row.update(
        converged=rep.converged,
        iterations=rep.iterations,
        max_degree_residual=rep.max_degree_residual,
        max_block_residual=rep.max_block_residual,
        median_fitness_deviation=float(np.median(np.abs(inst.state.phi - inst.shares) / inst.shares)),
        mixing_relative_error=mixing_relative_error(st.mixing, inst.target),
        mean_degree=st.mean_degree,
        mean_degree_error=abs(st.mean_degree - config.avg_degree) / config.avg_degree,
        global_clustering=st.global_clustering,
        local_clustering=st.local_clustering,
        isolated=st.isolated,
        wall_time=time.perf_counter() - t0,
    )
    return row


def _sweep_task(args):
    return sweep_row(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """One row per (value, seed) cell, in cell order regardless of ``jobs``."""
    tasks = [(cfg, spec.param) for cfg in spec.cells()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_task, tasks))
    rows = []
    for task in tasks:
        rows.append(sweep_row(*task))
        logger.info("cell %s=%s seed=%s done", spec.param, rows[-1]["value"], rows[-1]["seed"])
    return rows


EVAL_COLUMNS = (
    "D",
    "samples",
    "mixing_relative_error",
    "mean_degree_error",
    "global_clustering_in",
    "global_clustering_mean",
    "global_clustering_std",
    "global_clustering_error_mean",
    "global_clustering_error_std",
    "local_clustering_in",
    "local_clustering_mean",
    "local_clustering_std",
    "local_clustering_error_mean",
    "local_clustering_error_std",
)


def _relative_errors(values, ref: float) -> np.ndarray:
    if not ref > 0:
        return np.full(len(values), np.nan)
    return np.array([clustering_relative_error(v, ref) for v in values])


@dataclass
class EmbeddingEvaluation:
    row: dict
    observed_degrees: np.ndarray
    expected_degrees: np.ndarray
    expected_mixing: MixingMatrix


def evaluate_embedding(
    g: Graph,
    part: BlockPartition,
    emb: EmbeddingSD,
    samples: int = 10,
    seed: int = 0,
    target: MixingMatrix | None = None,
) -> EmbeddingEvaluation:
    """Compare an embedding's implied statistics with the graph it was inferred from.

    The mixing reference is ``target`` when given, otherwise the graph's own
    empirical mixing.
    """
    if emb.N != g.N or part.N != g.N:
        raise ValueError(f"node sets differ: graph {g.N}, partition {part.N}, embedding {emb.N}")
    deg_exp, mix = expected_degrees_and_mixing(emb, part)
    F_out = MixingMatrix(0.5 * (mix + mix.T))
    F_in = target if target is not None else empirical_mixing(g, part)
    deg_obs = degree_sequence(g)

    C_g, C_l = global_clustering(g), average_local_clustering(g)
    sampled = sample_graphs_from_embedding(emb, samples, seed)
    gs = np.array([global_clustering(h) for h in sampled])
    ls = np.array([average_local_clustering(h) for h in sampled])
    eg, el = _relative_errors(gs, C_g), _relative_errors(ls, C_l)
    row = {
        "D": emb.D,
        "samples": samples,
        "mixing_relative_error": mixing_relative_error(F_out, F_in),
        "mean_degree_error": float(np.mean(np.abs(deg_exp - deg_obs)) / max(deg_obs.mean(), 1e-300)),
        "global_clustering_in": C_g,
        "global_clustering_mean": gs.mean(),
        "global_clustering_std": gs.std(),
        "global_clustering_error_mean": eg.mean(),
        "global_clustering_error_std": eg.std(),
        "local_clustering_in": C_l,
        "local_clustering_mean": ls.mean(),
        "local_clustering_std": ls.std(),
        "local_clustering_error_mean": el.mean(),
        "local_clustering_error_std": el.std(),
    }
    return EmbeddingEvaluation(row, deg_obs, deg_exp, F_out)
