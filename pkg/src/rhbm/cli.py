"""Command-line entry point: ``rhbm generate | sweep | stats | eval-embedding``.

Exit status is 0 on success, 1 on usage or I/O errors and 2 when calibration
does not converge (or its targets are infeasible).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields, replace

import numpy as np

from . import io
from .embedding import EmbeddingFormatError, load_embedding
from .experiment import (
    EVAL_COLUMNS,
    DEFAULT_GRID,
    SWEEP_COLUMNS,
    ExperimentConfig,
    SweepSpec,
    evaluate_embedding,
    generate_instance,
    run_sweep,
    write_instance,
)
from .metrics import STATS_COLUMNS, graph_stats

EXIT_OK, EXIT_USAGE, EXIT_CALIBRATION = 0, 1, 2

log = logging.getLogger("rhbm")

# flag name -> ExperimentConfig field
CONFIG_FLAGS = {
    "nodes": "N",
    "avg_degree": "avg_degree",
    "gamma": "gamma",
    "beta": "beta",
    "communities": "n",
    "rho": "rho",
    "q": "q",
    "seed": "seed",
    "tol": "tol",
    "max_iter": "max_iter",
    "samples": "samples",
    "out": "out",
    "max_load": "max_load",
}
SWEEP_ALIASES = {"nodes": "N", "N": "N", "k": "avg_degree", "avg-degree": "avg_degree", "communities": "n"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    cast = {"int": int, "float": float, "str": str}
    p.add_argument("--config", help="key=value file; flags override its values")
    for flag, name in CONFIG_FLAGS.items():
        default = getattr(ExperimentConfig, name)
        p.add_argument(
            "--" + flag.replace("_", "-"),
            dest=name,
            type=cast[types[name]],
            default=None,
            help=f"default {default}",
        )


def _config_from(args) -> ExperimentConfig:
    base = ExperimentConfig.from_mapping(io.read_key_values(args.config)) if args.config else ExperimentConfig()
    overrides = {name: getattr(args, name) for name in CONFIG_FLAGS.values() if getattr(args, name) is not None}
    return replace(base, **overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rhbm", description="Random Hyperbolic Block Model generator and evaluation toolkit")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="calibrate latents and sample one graph")
    _add_config_flags(gen)

    sw = sub.add_parser("sweep", help="vary one parameter with all others fixed")
    _add_config_flags(sw)
    sw.add_argument("--vary", required=True, help="parameter to vary: " + ", ".join(DEFAULT_GRID))
    sw.add_argument("--values", help="comma-separated values (default: the default grid); empty for none")
    sw.add_argument("--seeds", type=int, default=10, help="seeds per value (default 10)")
    sw.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    st = sub.add_parser("stats", help="statistics of an edge list")
    st.add_argument("edges")
    st.add_argument("partition")
    st.add_argument("--out", help="output CSV (default stdout); mixing goes to <out stem>_mixing.csv")

    ev = sub.add_parser("eval-embedding", help="evaluate an S^D embedding against its input graph")
    ev.add_argument("edges")
    ev.add_argument("partition")
    ev.add_argument("embedding")
    ev.add_argument("--samples", type=int, default=10)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--target", help="reference mixing matrix (default: empirical mixing of the graph)")
    ev.add_argument("--out", help="output directory (default: print the row)")
    return parser


def _write_rows(rows, columns, out) -> None:
    import csv

    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
    finally:
        if out:
            fh.close()


def cmd_generate(args) -> int:
    config = _config_from(args)
    inst = generate_instance(config)
    paths = write_instance(inst, config.out)
    if not inst.validation.ok:
        for line in inst.validation.lines():
            print(line, file=sys.stderr)
        return EXIT_CALIBRATION
    rep = inst.report
    print(
        f"calibration: converged={rep.converged} sweeps={rep.iterations} "
        f"degree_residual={rep.max_degree_residual:.3g} block_residual={rep.max_block_residual:.3g}"
    )
    print(
        f"graph: N={inst.stats.N} edges={inst.stats.edges} mean_degree={inst.stats.mean_degree:.3f} "
        f"isolated={inst.stats.isolated}"
    )
    for name, path in paths.items():
        log.info("wrote %s: %s", name, path)
    return EXIT_OK if rep.converged else EXIT_CALIBRATION


def _parse_values(raw: str | None, param: str):
    if raw is None:
        if param not in DEFAULT_GRID:
            raise UsageError(f"no default grid for {param!r}; pass --values")
        return tuple(DEFAULT_GRID[param])
    return tuple(float(v) for v in raw.split(",") if v.strip())


def cmd_sweep(args) -> int:
    config = _config_from(args)
    param = SWEEP_ALIASES.get(args.vary, args.vary.replace("-", "_"))
    spec = SweepSpec(param, _parse_values(args.values, param), args.seeds, config)
    rows = run_sweep(spec, jobs=args.jobs)
    out = io.ensure_dir(config.out) / f"sweep_{param}.csv"
    _write_rows(rows, SWEEP_COLUMNS, out)
    print(f"{len(rows)} rows written to {out}")
    return EXIT_OK if all(r.get("converged") for r in rows) else EXIT_CALIBRATION


def cmd_stats(args) -> int:
    part = io.read_partition(args.partition)
    g = io.read_edge_list(args.edges, N=part.N)
    report = graph_stats(g, part)
    _write_rows([report.row()], STATS_COLUMNS, args.out)
    if args.out:
        stem = args.out[:-4] if args.out.endswith(".csv") else args.out
        io.write_mixing(stem + "_mixing.csv", report.mixing)
    return EXIT_OK


def cmd_eval_embedding(args) -> int:
    part = io.read_partition(args.partition)
    g = io.read_edge_list(args.edges, N=part.N)
    emb = load_embedding(args.embedding)
    if emb.N != part.N:
        raise UsageError(f"node sets differ: embedding has {emb.N} nodes, partition {part.N}")
    target = io.read_mixing(args.target) if args.target else None
    ev = evaluate_embedding(g, part, emb, samples=args.samples, seed=args.seed, target=target)
    if args.out:
        out = io.ensure_dir(args.out)
        _write_rows([ev.row], EVAL_COLUMNS, out / "evaluation.csv")
        np.savetxt(
            out / "degrees.csv",
            np.column_stack((np.arange(g.N), ev.observed_degrees, ev.expected_degrees)),
            delimiter=",",
            header="node,observed,expected",
            comments="",
            fmt=["%d", "%d", "%.12g"],
        )
        io.write_mixing(out / "expected_mixing.csv", ev.expected_mixing)
    else:
        _write_rows([ev.row], EVAL_COLUMNS, None)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "sweep": cmd_sweep,
    "stats": cmd_stats,
    "eval-embedding": cmd_eval_embedding,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, EmbeddingFormatError, io.FormatError, OSError) as exc:
        print(f"rhbm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
