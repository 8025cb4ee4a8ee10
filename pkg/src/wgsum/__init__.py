"""Lossy summarization of weighted graphs by set-based supernode merging."""

from wgsum.evaluation import decompress, rmse, run_benchmark, summary_rmse
from wgsum.graph import WeightedGraph, generate_synthetic, load_edge_list, write_edge_list
from wgsum.lsh import LshIndex, LshParams, build_index, build_index_for_graph, candidates, compute_signatures
from wgsum.randomized import b_randomized, randomized_summarize
from wgsum.sags import MergeConfig, SummarizeStats, summarize
from wgsum.summary import SummaryGraph, compression_ratio, read_summary, write_summary

__all__ = [
    "LshIndex",
    "LshParams",
    "MergeConfig",
    "SummarizeStats",
    "SummaryGraph",
    "WeightedGraph",
    "b_randomized",
    "build_index",
    "build_index_for_graph",
    "candidates",
    "compression_ratio",
    "compute_signatures",
    "decompress",
    "generate_synthetic",
    "load_edge_list",
    "randomized_summarize",
    "read_summary",
    "rmse",
    "run_benchmark",
    "summarize",
    "summary_rmse",
    "write_edge_list",
    "write_summary",
]

__version__ = "0.1.0"
