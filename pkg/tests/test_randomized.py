import itertools
import math

import numpy as np
import pytest

from wgsum.graph import WeightedGraph, generate_synthetic, path_graph, random_graph
from wgsum.randomized import b_randomized, merge_error, randomized_summarize
from wgsum.summary import SummaryGraph


def brute_merge_error(g, s, u, v):
    """Squared deviation of every group of the merged node, recomputed from g."""
    members = set(s.members[u]) | set(s.members[v])
    groups = {}
    for a, b, w in g.edges():
        ina, inb = a in members, b in members
        if ina and inb:
            groups.setdefault("self", []).append(w)
        elif ina or inb:
            other = b if ina else a
            groups.setdefault(int(s.provenance[other]), []).append(w)
    total = 0.0
    for ws in groups.values():
        mean = math.fsum(ws) / len(ws)
        total += sum((w - mean) ** 2 for w in ws)
    return total


def test_merge_error_twins_zero(g1):
    s = SummaryGraph.identity(g1)
    assert merge_error(s, 0, 1) == 0.0


def test_merge_error_shared_target():
    g = WeightedGraph.from_edges(3, [(0, 2, 2.0), (1, 2, 4.0)])
    assert merge_error(SummaryGraph.identity(g), 0, 1) == pytest.approx(2.0)


def test_merge_error_disjoint_single_edges():
    g = WeightedGraph.from_edges(4, [(0, 2, 2.0), (1, 3, 7.0)])
    assert merge_error(SummaryGraph.identity(g), 0, 1) == 0.0


def test_merge_error_rejects_same_node(g1):
    with pytest.raises(ValueError):
        merge_error(SummaryGraph.identity(g1), 0, 0)


@pytest.mark.parametrize("seed", range(15))
def test_merge_error_matches_bruteforce(seed):
    g = random_graph(9, 0.45, weight_levels=4, seed=seed)
    s = SummaryGraph.identity(g)
    rng = np.random.default_rng(seed)
    s.merge(rng.choice(9, 3, replace=False).tolist())
    for u, v in itertools.permutations(s.sids(), 2):
        assert merge_error(s, u, v) == pytest.approx(brute_merge_error(g, s, u, v), abs=1e-9)
        assert merge_error(s, u, v) >= 0


def test_g1_three_supernodes_all_seeds(g1):
    # every 2-hop pair in G1 has zero merge error, so the pair is the
    # sampled node plus its smallest-sid 2-hop neighbour
    pairs = set()
    for seed in range(20):
        s, stats = b_randomized(g1, 3, seed=seed)
        assert s.num_supernodes == 3 and stats.merges == 1 and stats.reached
        (merged,) = [m for m in s.members.values() if len(m) == 2]
        pairs.add(tuple(g1.labels[v] for v in merged))
    assert (1, 2) in pairs
    assert pairs <= {(1, 2), (1, 3), (1, 4)}


def test_target_cr_one_returns_identity(g1):
    s, stats = randomized_summarize(g1, target_cr=1.0, seed=3)
    assert stats.merges == 0 and s.num_supernodes == 4 and stats.reached


def test_deterministic_under_seed():
    g = generate_synthetic(150, n_blocks=6, p_block=0.4, p_share=0.7, weight_noise=0.2, seed=2)
    a, sa = randomized_summarize(g, target_cr=0.4, seed=5)
    b, sb = randomized_summarize(g, target_cr=0.4, seed=5)
    assert a.members == b.members and sa.merges == sb.merges


def test_b_randomized_identity_at_full_count(g1):
    s, stats = b_randomized(g1, g1.n, seed=0)
    assert s.num_supernodes == g1.n and stats.merges == 0


def test_b_randomized_connected_graph_to_one():
    g = path_graph([1.0, 2.0, 3.0, 4.0, 5.0])
    s, stats = b_randomized(g, 1, seed=0)
    assert s.num_supernodes == 1 and stats.reached
    assert s.members[next(iter(s.members))] == list(range(g.n))


def test_b_randomized_rejects_bad_count(g1):
    with pytest.raises(ValueError):
        b_randomized(g1, 0)
    with pytest.raises(ValueError):
        b_randomized(g1, 5)


def test_unreachable_flagged():
    # two disjoint edges can shrink to two supernodes with two self-superedges, never below cr 1
    g = WeightedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 2.0)])
    s, stats = randomized_summarize(g, target_cr=0.4, seed=0)
    assert not stats.reached
    assert s.num_supernodes == 2


@pytest.mark.parametrize("seed", range(5))
def test_one_merge_per_iteration_and_invariants(seed):
    g = random_graph(25, 0.2, seed=seed)
    for target in (20, 12, 5):
        s, stats = b_randomized(g, max(target, 1), seed=seed)
        assert s.num_supernodes == g.n - stats.merges
        s.check_invariants(g)
