"""Randomized pairwise merging baseline and its supernode-count-matched variant."""

from __future__ import annotations

import time

import numpy as np

from .graph import WeightedGraph
from .sags import SummarizeStats
from .summary import SummaryGraph, combine, combined_m2


def merge_error(s: SummaryGraph, u: int, v: int) -> float:
    """Total squared deviation from the group means if ``u`` and ``v`` were merged.

    Groups are the original edges between the merged node and each of its
    neighbour supernodes, the merged node's own self-superedge included.
    """
    u, v = s.check_sid(u), s.check_sid(v)
    if u == v:
        raise ValueError("merge_error needs two distinct supernodes")
    au = s.adj[u]
    return max(_base_error(u, au) + _partner_error(s, u, v, au), 0.0)


def _base_error(u: int, au: dict) -> float:
    return sum(st.m2 for t, st in au.items() if t != u)


def _partner_error(s: SummaryGraph, u: int, v: int, au: dict) -> float:
    # merge_error minus the v-independent _base_error(u)
    uv = au.get(v)
    err = -uv.m2 if uv is not None else 0.0
    for t, st in s.adj[v].items():
        if t == u or t == v:
            continue
        other = au.get(t)
        if other is None:
            err += st.m2
        else:
            err += combined_m2(other, st) - other.m2
    inner = combine(combine(au.get(u), au.get(v)), s.adj[v].get(v))
    if inner is not None:
        err += inner.m2
    return err


def _two_hop(s: SummaryGraph, u: int) -> set[int]:
    out: set[int] = set()
    for t in s.adj[u]:
        out.add(t)
        out.update(s.adj[t])
    out.discard(u)
    return out


def randomized_summarize(
    g: WeightedGraph,
    target_cr: float | None = None,
    target_supernodes: int | None = None,
    seed=None,
) -> tuple[SummaryGraph, SummarizeStats]:
    """Pairwise merging until ``target_cr`` or ``target_supernodes`` is met.

    Each step picks a random live supernode ``u``, finds the supernode within
    two hops of it whose merge adds the least squared weight deviation (ties
    to the smaller sid) and merges the pair. A supernode with nothing within
    two hops is retired from sampling. Running out of live supernodes before
    either halt condition holds returns the summary with ``reached=False``.
    """
    if target_cr is None and target_supernodes is None:
        raise ValueError("give target_cr and/or target_supernodes")
    if target_supernodes is not None and not 1 <= target_supernodes <= g.n:
        raise ValueError(f"target_supernodes must lie in [1, {g.n}]")
    if g.num_edges == 0:
        raise ValueError("graph has no edges")
    rng = np.random.default_rng(seed)
    stats = SummarizeStats(method="randomized")
    t0 = time.perf_counter()
    s = SummaryGraph.identity(g)

    def halted() -> bool:
        if target_cr is not None and s.compression_ratio() <= target_cr:
            return True
        return target_supernodes is not None and s.num_supernodes <= target_supernodes

    # live sids in a swap-remove array for O(1) uniform sampling
    live = list(range(g.n))
    pos = {x: i for i, x in enumerate(live)}

    def retire(x: int) -> None:
        i = pos.pop(x)
        last = live.pop()
        if last != x:
            live[i] = last
            pos[last] = i

    reached = halted()
    while not reached and live:
        stats.iterations += 1
        u = live[int(rng.integers(len(live)))]
        pool = _two_hop(s, u)
        if not pool:
            retire(u)
            continue
        au = s.adj[u]
        best, best_err = None, None
        for v in sorted(pool):
            err = _partner_error(s, u, v, au)
            if best_err is None or err < best_err:
                best, best_err = v, err
        keep = s.merge([u, best])
        stats.merges += 1
        retire(best if keep == u else u)
        reached = halted()

    stats.reached = reached
    stats.merge_time_ms = (time.perf_counter() - t0) * 1e3
    stats.final_cr = s.compression_ratio()
    stats.supernodes = s.num_supernodes
    stats.superedges = s.num_superedges
    return s, stats


def b_randomized(g: WeightedGraph, supernode_count: int, seed=None) -> tuple[SummaryGraph, SummarizeStats]:
    """Randomized merging halted at exactly ``supernode_count`` supernodes."""
    s, stats = randomized_summarize(g, target_supernodes=supernode_count, seed=seed)
    stats.method = "brandomized"
    return s, stats
