"""Set-based summarization: merge whole sets of LSH candidates per query node."""

from __future__ import annotations

import time
from typing import Callable
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from .graph import WeightedGraph
from .lsh import LshParams, LshIndex, build_index_for_graph, candidates
from .summary import (
    GroupAccumulator,
    SummaryGraph,
    cost_reduction,
    neighborhood_similarity,
)


@dataclass(frozen=True)
class MergeConfig:
    """Parameters of one summarization run.

    ``theta_sim`` is the minimum Jaccard similarity of supernode neighbour
    sets between a candidate and the query node; ``theta_w`` bounds how far
    any original edge weight may lie from the mean of the superedge that
    absorbs it.
    """

    target_cr: float = 0.5
    theta_sim: float = 0.5
    theta_w: float = 0.0
    lsh: LshParams = field(default_factory=LshParams)
    seed: int | None = 0

    def __post_init__(self):
        if not 0.0 < self.target_cr < 1.0:
            raise ValueError(f"target_cr must lie in (0, 1), got {self.target_cr}")
        if not 0.0 <= self.theta_sim <= 1.0:
            raise ValueError(f"theta_sim must lie in [0, 1], got {self.theta_sim}")
        if not self.theta_w >= 0.0:
            raise ValueError(f"theta_w must be >= 0, got {self.theta_w}")

    def lsh_params(self) -> LshParams:
        """LSH parameters, with the run seed taking precedence over ``lsh.seed``."""
        return self.lsh if self.seed is None else replace(self.lsh, seed=self.seed)


@dataclass
class SummarizeStats:
    method: str
    reached: bool = False
    index_time_ms: float = 0.0
    merge_time_ms: float = 0.0
    iterations: int = 0
    merges: int = 0
    final_cr: float = 1.0
    supernodes: int = 0
    superedges: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _select_set(s: SummaryGraph, q: int, pool: list[int], theta_sim: float, theta_w: float) -> list[int]:
    ranked = sorted(pool, key=lambda c: (-cost_reduction(s, q, c), c))
    acc = GroupAccumulator(s, [q])
    chosen = [q]
    for c in ranked:
        if neighborhood_similarity(s, q, c) >= theta_sim and acc.try_add(c, theta_w):
            chosen.append(c)
    return chosen


def summarize_with_index(
    g: WeightedGraph,
    cfg: MergeConfig,
    index: LshIndex,
    stats: SummarizeStats | None = None,
    on_merge: Callable[[SummaryGraph, list[int]], None] | None = None,
) -> tuple[SummaryGraph, SummarizeStats]:
    """Run the merge loop over a prebuilt index (built on ``g``'s original nodes).

    ``on_merge(summary, merged_nodes)`` is called after every merge.
    """
    if g.num_edges == 0:
        raise ValueError("graph has no edges")
    if index.n != g.n:
        raise ValueError("index was built for a different node count")
    stats = stats or SummarizeStats(method="sags")
    t0 = time.perf_counter()
    s = SummaryGraph.identity(g)
    visited = np.zeros(g.n, dtype=bool)
    for q in range(g.n):
        if visited[q]:
            continue
        stats.iterations += 1
        visited[q] = True
        pool = [c for c in candidates(index, q) if not visited[c]]
        if not pool:
            continue
        chosen = _select_set(s, q, pool, cfg.theta_sim, cfg.theta_w)
        visited[chosen] = True
        if len(chosen) >= 2:
            s.merge(chosen)
            stats.merges += 1
            if on_merge is not None:
                on_merge(s, chosen)
            if s.compression_ratio() <= cfg.target_cr:
                stats.reached = True
                break
    stats.merge_time_ms = (time.perf_counter() - t0) * 1e3
    stats.final_cr = s.compression_ratio()
    stats.supernodes = s.num_supernodes
    stats.superedges = s.num_superedges
    return s, stats


def summarize(g: WeightedGraph, cfg: MergeConfig, on_merge=None) -> tuple[SummaryGraph, SummarizeStats]:
    """Summarize ``g`` until the compression ratio drops to ``cfg.target_cr``.

    Query nodes are taken in ascending id order. Each one gathers its
    unvisited LSH candidates, ranks them by cost reduction (ties by id) and
    greedily grows a set, admitting a candidate only if it is similar enough
    to the query node and every superedge the enlarged set would produce
    stays within ``theta_w``. The set is merged and all its nodes are marked
    visited. If every node is visited first, the summary is returned with
    ``stats.reached = False``.
    """
    if g.num_edges == 0:
        raise ValueError("graph has no edges")
    stats = SummarizeStats(method="sags")
    t0 = time.perf_counter()
    index, _ = build_index_for_graph(g, cfg.lsh_params())
    stats.index_time_ms = (time.perf_counter() - t0) * 1e3
    return summarize_with_index(g, cfg, index, stats, on_merge)
