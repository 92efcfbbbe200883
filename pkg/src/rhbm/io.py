"""Plain-text file formats for partitions, matrices, latent states and graphs.

Every format is CSV or whitespace text; matrices carry a one-line ``# label``
header and latent states a ``# key=value`` header with provenance.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .calibration import CalibrationReport, LatentState
from .generation import Graph
from .metrics import STATS_COLUMNS, StatsReport
from .mixing import EDGE_COUNTS, NORMALIZED, BlockPartition, MixingMatrix


class FormatError(ValueError):
    pass


def _fmt(x) -> str:
    return repr(float(x))


def write_partition(path, part: BlockPartition) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "block"])
        w.writerows(zip(range(part.N), part.block_of.tolist()))


def read_partition(path) -> BlockPartition:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["node", "block"]:
            raise FormatError(f"{path}: expected header 'node,block'")
        pairs = []
        for lineno, row in enumerate(reader, start=2):
            try:
                pairs.append((int(row[0]), int(row[1])))
            except (ValueError, IndexError):
                raise FormatError(f"{path}:{lineno}: malformed row {row!r}") from None
    nodes = np.array([p[0] for p in pairs], dtype=np.int64)
    if not np.array_equal(np.sort(nodes), np.arange(nodes.size)):
        raise FormatError(f"{path}: node ids must be exactly 0..N-1")
    block_of = np.empty(nodes.size, dtype=np.int64)
    block_of[nodes] = [p[1] for p in pairs]
    try:
        return BlockPartition(block_of)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_matrix(path, M: np.ndarray, label: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {label}\n")
        csv.writer(fh).writerows([[_fmt(x) for x in row] for row in np.atleast_2d(M)])


def read_matrix(path) -> tuple[np.ndarray, str]:
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise FormatError(f"{path}: missing '# <label>' header line")
        rows = [line for line in fh.read().splitlines() if line.strip()]
    try:
        M = np.array([[float(x) for x in r.split(",")] for r in rows])
    except ValueError:
        raise FormatError(f"{path}: non-numeric matrix entry") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise FormatError(f"{path}: matrix is not square")
    return M, first[1:].strip()


def write_mixing(path, F: MixingMatrix) -> None:
    write_matrix(path, F.entries, F.convention)


def read_mixing(path) -> MixingMatrix:
    M, label = read_matrix(path)
    if label not in (NORMALIZED, EDGE_COUNTS):
        raise FormatError(f"{path}: header must be '# {NORMALIZED}' or '# {EDGE_COUNTS}'")
    return MixingMatrix(M, label)


def write_latent_state(path, forces_path, state: LatentState, seed: int) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# beta={_fmt(state.beta)} R={_fmt(state.R)} seed={int(seed)}\n")
        w = csv.writer(fh)
        w.writerow(["node", "block", "theta", "phi"])
        for i in range(state.N):
            w.writerow([i, int(state.partition.block_of[i]), _fmt(state.theta[i]), _fmt(state.phi[i])])
    write_matrix(forces_path, state.Phi, "block-forces")


def read_latent_state(path, forces_path) -> tuple[LatentState, int]:
    with open(path, newline="") as fh:
        meta = dict(re.findall(r"(\w+)=(\S+)", fh.readline()))
        reader = csv.DictReader(fh)
        rows = list(reader)
    try:
        beta, R, seed = float(meta["beta"]), float(meta["R"]), int(meta["seed"])
    except KeyError as exc:
        raise FormatError(f"{path}: header lacks {exc}") from None
    rows.sort(key=lambda r: int(r["node"]))
    part = BlockPartition(np.array([int(r["block"]) for r in rows]))
    theta = np.array([float(r["theta"]) for r in rows])
    phi = np.array([float(r["phi"]) for r in rows])
    Phi, _ = read_matrix(forces_path)
    return LatentState(theta, phi, Phi, beta, R, part), seed


def write_calibration_report(path, trace_path, report: CalibrationReport) -> None:
    write_key_values(path, report.as_dict())
    with open(trace_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep", "max_degree_residual", "max_block_residual", "max_block_degree_residual"])
        for k, res in enumerate(report.trace):
            w.writerow([k] + [_fmt(x) for x in res])


def write_key_values(path, values: dict) -> None:
    with open(path, "w") as fh:
        for k, v in values.items():
            fh.write(f"{k}={v}\n")


def read_key_values(path) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for line in fh:
            if "=" in line:
                k, v = line.rstrip("\n").split("=", 1)
                out[k.strip()] = v.strip()
    return out


def write_edge_list(path, g: Graph) -> None:
    np.savetxt(path, g.edges, fmt="%d")


def read_edge_list(path, N: int | None = None) -> Graph:
    """Read ``i j`` lines; ``N`` defaults to one past the largest id."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                i, j = int(parts[0]), int(parts[1])
            except (ValueError, IndexError):
                raise FormatError(f"{path}:{lineno}: expected two integer node ids") from None
            if N is not None and not (0 <= i < N and 0 <= j < N):
                bad = i if not 0 <= i < N else j
                raise FormatError(f"{path}:{lineno}: node {bad} is outside the {N} partitioned nodes")
            pairs.append((i, j))
    if N is None:
        N = 1 + max((max(p) for p in pairs), default=-1)
    try:
        return Graph.from_pairs(N, pairs)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_stats(path, rows: list[dict], columns=STATS_COLUMNS) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)


def write_stats_report(path, mixing_path, report: StatsReport) -> None:
    write_stats(path, [report.row()])
    write_mixing(mixing_path, report.mixing)


def read_csv_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
