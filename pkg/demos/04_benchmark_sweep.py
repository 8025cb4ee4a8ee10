"""
A compression-ratio sweep written to CSV
========================================

"""

# %%
import csv
import io

from wgsum.evaluation import run_benchmark, write_reports_csv
from wgsum.graph import generate_synthetic
from wgsum.sags import MergeConfig

g = generate_synthetic(400, n_blocks=20, p_block=0.15, p_share=0.85, weight_levels=5, weight_noise=0.1, seed=7)
reports = run_benchmark(g, [0.9, 0.7, 0.5, 0.3], [MergeConfig(theta_sim=0.5, theta_w=0.5)], seed=0, dataset="planted")

# %%
buf = io.StringIO()
write_reports_csv(reports, buf)
rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
for row in rows:
    print(f"{row['method']:<12} target={row['target_cr']:<4} cr={float(row['achieved_cr']):.3f} "
          f"reached={row['reached']:<5} rmse={row['rmse'] or '-':<22} total_ms={float(row['total_ms']):.1f}")
