"""
Summarizing a graph with planted blocks
=======================================

"""

# %%
from wgsum.evaluation import decompress, rmse, summary_rmse
from wgsum.graph import WeightedGraph, generate_synthetic
from wgsum.sags import MergeConfig, summarize

g1 = WeightedGraph.from_labeled_edges([(1, 3, 2.0), (2, 3, 2.0), (1, 4, 4.0), (2, 4, 4.0)])
s, stats = summarize(g1, MergeConfig(target_cr=0.6, theta_sim=1.0, theta_w=0.0))
for sid, members in s.members.items():
    print(sid, [g1.labels[v] for v in members])
for e in s.superedges():
    print(e)
print("cr", stats.final_cr, "rmse", rmse(g1, decompress(s)))

# %%
# 600 nodes in 20 blocks, 15% of nodes deviate from their block
g = generate_synthetic(600, n_blocks=20, p_block=0.15, p_share=0.85, weight_levels=5, weight_noise=0.1, seed=1)
print(g.n, "nodes,", g.num_edges, "edges")

# %%
# a looser weight threshold allows deeper compression at higher error
for theta_w in (0.0, 0.5, 2.0):
    for cr in (0.7, 0.4, 0.2):
        s, st = summarize(g, MergeConfig(target_cr=cr, theta_sim=0.5, theta_w=theta_w, seed=0))
        err = summary_rmse(g, s) if st.reached else float("nan")
        print(f"theta_w={theta_w:<4} target={cr:<4} reached={st.reached!s:<5} cr={st.final_cr:.3f} "
              f"supernodes={st.supernodes:<4} rmse={err:.4f} merge_ms={st.merge_time_ms:.1f}")
