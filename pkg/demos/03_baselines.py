"""
Set-based merging against the pairwise randomized baseline
==========================================================

Both methods are halted at the same number of supernodes.
"""

# %%
from wgsum.evaluation import summary_rmse
from wgsum.graph import generate_synthetic, path_graph
from wgsum.randomized import b_randomized, randomized_summarize
from wgsum.sags import MergeConfig, summarize

g = generate_synthetic(1000, n_blocks=50, p_block=0.05, p_share=0.9, weight_levels=5, weight_noise=0.05, seed=3)
print(g.n, "nodes,", g.num_edges, "edges")

# %%
for cr in (0.7, 0.5):
    s, st = summarize(g, MergeConfig(target_cr=cr, theta_sim=0.5, theta_w=0.5))
    b, bt = b_randomized(g, st.supernodes, seed=0)
    print(f"cr={cr}: supernodes={st.supernodes}")
    print(f"  sags         {st.merge_time_ms:8.1f} ms  rmse={summary_rmse(g, s):.4f}")
    print(f"  brandomized  {bt.merge_time_ms:8.1f} ms  rmse={summary_rmse(g, b):.4f}")

# %%
# on a path with all-distinct weights no two nodes agree exactly, so a zero
# weight threshold stops set-based merging early; the baseline keeps going
p = path_graph([float(i) for i in range(1, 21)])
s, st = summarize(p, MergeConfig(target_cr=0.5, theta_sim=0.5, theta_w=0.0))
r, rt = randomized_summarize(p, target_cr=0.5, seed=0)
print("sags reached", st.reached, "cr", round(st.final_cr, 3))
print("randomized reached", rt.reached, "cr", round(rt.final_cr, 3), "rmse", round(summary_rmse(p, r), 3))
