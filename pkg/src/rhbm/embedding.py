"""Evaluation of externally inferred S^D embeddings.

An embedding gives each node a hidden degree ``kappa`` and a unit vector in
``D + 1`` dimensions; with the global ``beta``, ``mu`` and sphere radius ``R``
it defines the connection probability

    p_ij = 1 / (1 + (R dtheta_ij / (mu kappa_i kappa_j)**(1/D))**beta).

File layout (``# D=.. beta=.. mu=.. R=..`` then ``node,kappa,x1,...``) is
handled by :func:`load_embedding` / :func:`save_embedding`;
:func:`convert_inf_coord` reads the whitespace-separated coordinate files
written by Mercator-style embedders.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .generation import Graph, fermi_dirac, scan_pairs
from .mixing import EDGE_COUNTS, BlockPartition, MixingMatrix

NORM_TOL = 1e-6
CHUNK = 128


class EmbeddingFormatError(ValueError):
    """Malformed embedding file; the message names the offending line."""


def sphere_radius(N: int, D: int) -> float:
    """Radius giving unit node density on S^D (surface ``2 pi^((D+1)/2) / Gamma((D+1)/2)``)."""
    log_area = np.log(2.0) + (D + 1) / 2 * np.log(np.pi) - gammaln((D + 1) / 2)
    return float(np.exp((np.log(N) - log_area) / D))


@dataclass(frozen=True)
class EmbeddingSD:
    D: int
    kappa: np.ndarray
    positions: np.ndarray
    beta: float
    mu: float
    R: float

    def __post_init__(self):
        if int(self.D) != self.D or self.D < 1:
            raise ValueError(f"D must be a positive integer, got {self.D}")
        kappa = np.asarray(self.kappa, dtype=float)
        pos = np.asarray(self.positions, dtype=float)
        if pos.shape != (kappa.size, self.D + 1):
            raise ValueError(f"positions must have shape ({kappa.size}, {self.D + 1}), got {pos.shape}")
        if np.any(~(kappa > 0)):
            raise ValueError("hidden degrees must be positive")
        norms = np.linalg.norm(pos, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("positions must be unit vectors")
        if not self.beta > self.D:
            raise ValueError(f"beta must exceed D={self.D}, got {self.beta}")
        if not (self.mu > 0 and self.R > 0):
            raise ValueError("mu and R must be positive")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "positions", pos)

    @property
    def N(self) -> int:
        return int(self.kappa.size)

    @classmethod
    def from_angles(cls, theta, kappa, beta: float, mu: float, R: float | None = None) -> "EmbeddingSD":
        """One-dimensional embedding from circle angles."""
        theta = np.asarray(theta, dtype=float)
        pos = np.column_stack((np.cos(theta), np.sin(theta)))
        pos /= np.linalg.norm(pos, axis=1, keepdims=True)
        if R is None:
            R = sphere_radius(theta.size, 1)
        return cls(1, kappa, pos, beta, mu, R)


def angular_distance(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Great-circle angle between unit vectors (last axis), via the chord length.

    Equal to ``arccos(u . v)`` but without its loss of precision for nearby
    points.
    """
    chord = np.linalg.norm(u - v, axis=-1)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def _sd_block(e: EmbeddingSD):
    pos, kappa = e.positions, e.kappa

    def block(rows, cols):
        dtheta = angular_distance(pos[rows][:, None, :], pos[cols][None, :, :])
        scale = (e.mu * kappa[rows][:, None] * kappa[cols][None, :]) ** (1.0 / e.D)
        return fermi_dirac(e.R * dtheta, scale, e.beta)

    return block


def sd_edge_probability(e: EmbeddingSD, i: int, j: int) -> float:
    if i == j:
        raise ValueError("no self-loops: i and j must differ")
    return float(_sd_block(e)(np.array([i]), np.array([j]))[0, 0])


def expected_degrees_and_mixing(e: EmbeddingSD, part: BlockPartition | None = None):
    """One pass over all pairs: expected degrees and (optionally) mixing."""
    if part is not None and part.N != e.N:
        raise ValueError(f"partition covers {part.N} nodes, embedding has {e.N}")
    block = _sd_block(e)
    idx = np.arange(e.N)
    deg = np.zeros(e.N)
    mix = None
    if part is not None:
        onehot = np.zeros((e.N, part.n))
        onehot[idx, part.block_of] = 1.0
        mix = np.zeros((part.n, part.n))
    for r0 in range(0, e.N, CHUNK):
        rows = idx[r0:r0 + CHUNK]
        P = block(rows, idx)
        P[np.arange(rows.size), rows] = 0.0
        deg[rows] = P.sum(axis=1)
        if part is not None:
            np.add.at(mix, part.block_of[rows], P @ onehot)
    return deg, mix


def expected_degrees_from_embedding(e: EmbeddingSD) -> np.ndarray:
    return expected_degrees_and_mixing(e)[0]


def expected_mixing_from_embedding(e: EmbeddingSD, part: BlockPartition) -> MixingMatrix:
    """Expected block link counts, intra-block links counted twice."""
    mix = expected_degrees_and_mixing(e, part)[1]
    return MixingMatrix(0.5 * (mix + mix.T), EDGE_COUNTS)


def sample_graphs_from_embedding(e: EmbeddingSD, count: int, seed: int) -> list[Graph]:
    """``count`` independent graphs; graph ``k`` uses pair-keyed stream ``k``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    block = _sd_block(e)
    return [scan_pairs(e.N, block, seed, stream=k) for k in range(count)]


_HEADER_KEYS = ("D", "beta", "mu", "R")


def save_embedding(e: EmbeddingSD, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# D={e.D} beta={float(e.beta)!r} mu={float(e.mu)!r} R={float(e.R)!r}\n")
        w = csv.writer(fh)
        w.writerow(["node", "kappa"] + [f"x{k + 1}" for k in range(e.D + 1)])
        for i in range(e.N):
            w.writerow([i, repr(float(e.kappa[i]))] + [repr(float(x)) for x in e.positions[i]])


def _parse_header(line: str, lineno: int) -> dict:
    fields = dict(re.findall(r"(\w+)\s*=\s*(\S+)", line))
    missing = [k for k in ("D", "beta", "mu") if k not in fields]
    if missing:
        raise EmbeddingFormatError(f"line {lineno}: header lacks {', '.join(missing)}")
    try:
        out = {"D": int(fields["D"]), "beta": float(fields["beta"]), "mu": float(fields["mu"])}
        if "R" in fields:
            out["R"] = float(fields["R"])
    except ValueError as exc:
        raise EmbeddingFormatError(f"line {lineno}: bad header value ({exc})") from None
    return out


def load_embedding(path) -> EmbeddingSD:
    """Read an embedding CSV, renormalizing positions that are off by at most 1e-6."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise EmbeddingFormatError("line 1: expected '# D=.. beta=.. mu=.. R=..' header")
    meta = _parse_header(lines[0], 1)
    D = meta["D"]
    expected = ["node", "kappa"] + [f"x{k + 1}" for k in range(D + 1)]
    if len(lines) < 2 or [c.strip() for c in lines[1].split(",")] != expected:
        raise EmbeddingFormatError(f"line 2: expected column header {','.join(expected)}")

    nodes, kappa, pos = [], [], []
    for lineno, row in enumerate(csv.reader(lines[2:]), start=3):
        if not row:
            continue
        if len(row) != D + 3:
            raise EmbeddingFormatError(f"line {lineno}: expected {D + 3} fields, got {len(row)}")
        try:
            node = int(row[0])
            vals = np.array([float(x) for x in row[1:]])
        except ValueError:
            raise EmbeddingFormatError(f"line {lineno}: non-numeric field") from None
        if not np.all(np.isfinite(vals)):
            raise EmbeddingFormatError(f"line {lineno}: non-finite value")
        if not vals[0] > 0:
            raise EmbeddingFormatError(f"line {lineno}: kappa must be positive")
        norm = np.linalg.norm(vals[1:])
        if abs(norm - 1.0) > NORM_TOL:
            raise EmbeddingFormatError(f"line {lineno}: position norm {norm:.9g} is not 1")
        nodes.append(node)
        kappa.append(vals[0])
        pos.append(vals[1:] / norm)

    nodes = np.array(nodes, dtype=np.int64)
    if not np.array_equal(np.sort(nodes), np.arange(nodes.size)):
        raise EmbeddingFormatError("node ids must be exactly 0..N-1")
    order = np.argsort(nodes)
    kappa = np.array(kappa)[order]
    pos = np.array(pos).reshape(-1, D + 1)[order]
    R = meta.get("R", sphere_radius(nodes.size, D))
    return EmbeddingSD(D, kappa, pos, meta["beta"], meta["mu"], R)


_INF_KEYS = {
    "beta": "beta",
    "mu": "mu",
    "radius": "R",
    "radius_s^d": "R",
    "radius_s1": "R",
    "dimension": "D",
}


def convert_inf_coord(path, D: int | None = None) -> EmbeddingSD:
    """Read a Mercator-style ``.inf_coord`` file.

    Header comments of the form ``#  - beta: 2.3`` supply ``beta``, ``mu``,
    the radius and the dimension. Data rows are ``vertex kappa theta [r]``
    for D = 1, or ``vertex kappa r x1 .. x{D+1}`` otherwise. Vertex labels
    must be the integer node ids of the embedded edge list. Parameters are
    taken as emitted; positions are rescaled to unit length and a missing
    radius falls back to unit node density.
    """
    meta: dict = {}
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                m = re.match(r"#\s*-?\s*([\w^]+)\s*:\s*(\S+)", text)
                if m and m.group(1).lower() in _INF_KEYS:
                    meta[_INF_KEYS[m.group(1).lower()]] = m.group(2)
                continue
            parts = text.split()
            try:
                rows.append((lineno, int(parts[0]), [float(x) for x in parts[1:]]))
            except ValueError:
                raise EmbeddingFormatError(f"line {lineno}: non-numeric field") from None
    if D is None:
        D = int(meta.get("D", 1))
    for key in ("beta", "mu"):
        if key not in meta:
            raise EmbeddingFormatError(f"header lacks {key}")

    nodes, kappa, pos = [], [], []
    for lineno, node, vals in rows:
        if D == 1 and len(vals) in (2, 3):
            x = np.array([np.cos(vals[1]), np.sin(vals[1])])
        elif len(vals) == D + 3:
            x = np.array(vals[2:])
        else:
            raise EmbeddingFormatError(f"line {lineno}: unexpected number of columns for D={D}")
        norm = np.linalg.norm(x)
        if not (np.isfinite(norm) and norm > 0 and np.isfinite(vals[0])):
            raise EmbeddingFormatError(f"line {lineno}: degenerate coordinates")
        nodes.append(node)
        kappa.append(vals[0])
        pos.append(x / norm)
    nodes = np.array(nodes, dtype=np.int64)
    if not np.array_equal(np.sort(nodes), np.arange(nodes.size)):
        raise EmbeddingFormatError("vertex labels must be exactly 0..N-1")
    order = np.argsort(nodes)
    R = float(meta["R"]) if "R" in meta else sphere_radius(nodes.size, D)
    return EmbeddingSD(D, np.array(kappa)[order], np.array(pos)[order], float(meta["beta"]), float(meta["mu"]), R)
