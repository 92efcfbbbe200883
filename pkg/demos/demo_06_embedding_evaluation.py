"""
Evaluating an embedding
=======================

An S^D embedding (hidden degrees, positions on a sphere, beta, mu) implies
an ensemble of graphs. Here the embedding is the exact set of parameters
that generated the graph, so its implied mixing and degrees should match
the graph up to sampling noise. A file written by an external embedder can
be read with ``convert_inf_coord`` and evaluated the same way.
"""

import tempfile
from pathlib import Path

import numpy as np

from rhbm.calibration import sample_angles
from rhbm.embedding import EmbeddingSD, load_embedding, save_embedding
from rhbm.experiment import evaluate_embedding
from rhbm.generation import S1Params, sample_s1_graph
from rhbm.mixing import make_partition

N, k, gamma, beta = 1500, 10.0, 2.5, 2.0
rng = np.random.default_rng(4)
raw = 1 + rng.pareto(gamma - 1, N)
kappa = raw * k / raw.mean()
theta = sample_angles(N, rng)
params = S1Params(kappa, beta)
g = sample_s1_graph(params, theta, seed=4)
part = make_partition(N, 6)

# round trip through the on-disk format
path = Path(tempfile.mkdtemp()) / "embedding.csv"
save_embedding(EmbeddingSD.from_angles(theta, kappa, beta, params.mu, params.R), path)
emb = load_embedding(path)

ev = evaluate_embedding(g, part, emb, samples=10, seed=0)
for key in ("mixing_relative_error", "mean_degree_error", "global_clustering_in", "global_clustering_mean",
            "local_clustering_in", "local_clustering_mean"):
    print(f"{key:>24}: {ev.row[key]:.4f}")
