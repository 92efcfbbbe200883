"""
Mixing matrices and block partitions
====================================

The target mixing matrix F says how many links run between each pair of
blocks. Its diagonal stores twice the intra-block count, so row sums are
block total degrees.
"""

import numpy as np

from rhbm.mixing import MixingParams, build_normalized_mixing, make_partition, scale_mixing_to_edges

np.set_printoptions(precision=3, suppress=True)

# rho moves mass between the diagonal and the off-diagonal entries
for rho in (-1.0, 0.0, 1.0):
    F = build_normalized_mixing(MixingParams(n=4, rho=rho, q=1.0))
    print(f"rho={rho:+.1f}, entries sum to {F.total:.1f}")
    print(F.entries)

# q < 1 makes links between distant block labels rarer
F = build_normalized_mixing(MixingParams(n=5, rho=0.0, q=0.5))
print("rho=0, q=0.5, first row:", F.entries[0])

# scaling to a graph with N nodes and mean degree k gives edge counts
part = make_partition(3000, 10)
F_edges = scale_mixing_to_edges(build_normalized_mixing(MixingParams(10, 0.5, 1.0)), part.N, 10)
print("block sizes:", part.sizes)
print("links per block (row sums):", F_edges.entries.sum(axis=1))
