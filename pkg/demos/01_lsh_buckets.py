"""
Candidate generation with MinHash and banding
=============================================

Nodes with overlapping neighbourhoods should land in a shared bucket.
"""

# %%
import numpy as np

from wgsum.graph import WeightedGraph
from wgsum.lsh import LshParams, build_index_for_graph, candidates, compute_signatures, generate_permutations

# the small graph: nodes 1 and 2 share both neighbours 3 and 4
g = WeightedGraph.from_labeled_edges([(1, 3, 2.0), (2, 3, 2.0), (1, 4, 4.0), (2, 4, 4.0)])
print(g.n, "nodes,", g.num_edges, "edges")

# %%
# four hash functions cut into two bands of two rows
perms = generate_permutations(g.n, 4, seed=7)
sig = compute_signatures(g, perms)
print(sig)

# identical neighbourhoods give identical columns
assert np.array_equal(sig[:, 0], sig[:, 1])

# %%
index, _ = build_index_for_graph(g, LshParams(4, 2, 2, seed=7))
for v in range(g.n):
    print("label", g.labels[v], "->", sorted(g.labels[c] for c in candidates(index, v)))

# %%
# the collision curve 1 - (1 - s^r)^b for the default 100 hashes in 25 bands
params = LshParams()
for s in (0.2, 0.4, 0.5, 0.6, 0.8, 1.0):
    print(f"s={s:.1f}  P(candidate)={params.collision_probability(s):.3f}")
print("threshold about", round(params.threshold, 3))
