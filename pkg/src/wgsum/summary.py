"""Summary graphs: supernodes, mean-weight superedges and the merge primitives.

A superedge keeps running statistics of the original edges it covers
(count, sum, centred second moment, min and max) so merges never need to
revisit the original graph and the mean is always taken over all member
edges rather than over earlier means.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import WeightedGraph, format_weight


class EdgeStats:
    """Aggregate of a multiset of edge weights."""

    __slots__ = ("count", "total", "m2", "lo", "hi")

    def __init__(self, count: int, total: float, m2: float, lo: float, hi: float):
        self.count = count
        self.total = total
        self.m2 = m2
        self.lo = lo
        self.hi = hi

    @classmethod
    def single(cls, w: float) -> "EdgeStats":
        return cls(1, w, 0.0, w, w)

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def sum_sq(self) -> float:
        return self.m2 + self.total * self.total / self.count

    def max_deviation(self) -> float:
        """Largest ``|w - mean|`` over the member weights."""
        if self.lo == self.hi:
            return 0.0
        mean = self.mean
        return max(self.hi - mean, mean - self.lo)

    def __add__(self, other: "EdgeStats") -> "EdgeStats":
        return combine(self, other)

    def __repr__(self):
        return f"EdgeStats(count={self.count}, mean={self.mean:.6g}, lo={self.lo:.6g}, hi={self.hi:.6g})"


def combine(a: EdgeStats | None, b: EdgeStats | None) -> EdgeStats | None:
    if a is None:
        return b
    if b is None:
        return a
    n = a.count + b.count
    delta = b.total / b.count - a.total / a.count
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / n
    return EdgeStats(n, a.total + b.total, m2, min(a.lo, b.lo), max(a.hi, b.hi))


def combined_m2(a: EdgeStats, b: EdgeStats) -> float:
    n = a.count + b.count
    delta = b.total / b.count - a.total / a.count
    return a.m2 + b.m2 + delta * delta * a.count * b.count / n


def within_tolerance(st: EdgeStats, theta_w: float) -> bool:
    dev = st.max_deviation()
    if dev == 0.0:
        return True
    # absorbs rounding in the mean; zero spread is handled exactly above
    return dev <= theta_w + 1e-12 * max(abs(st.lo), abs(st.hi))


@dataclass(frozen=True)
class SuperEdge:
    a: int
    b: int
    weight: float
    member_count: int
    sum_sq: float

    @property
    def is_self(self) -> bool:
        return self.a == self.b


class SummaryGraph:
    """Partition of a graph's nodes into supernodes, plus the superedges between them.

    ``adj[x][y]`` holds the :class:`EdgeStats` of all original edges between
    members of ``x`` and ``y``; ``adj[x][x]`` is the self-superedge. Both
    directions share one object. A merged supernode takes the sid of its
    largest part (smallest sid on ties).
    """

    def __init__(self, n: int, labels: list, num_original_edges: int):
        self.n = n
        self.labels = labels
        self.num_original_edges = num_original_edges
        self.members: dict[int, list[int]] = {}
        self.adj: dict[int, dict[int, EdgeStats]] = {}
        self.provenance = np.arange(n, dtype=np.int64)
        self.num_superedges = 0

    @classmethod
    def identity(cls, g: WeightedGraph) -> "SummaryGraph":
        s = cls(g.n, g.labels, g.num_edges)
        s.members = {v: [v] for v in range(g.n)}
        s.adj = {v: {} for v in range(g.n)}
        for a, b, w in g.edges():
            st = EdgeStats.single(w)
            s.adj[a][b] = st
            s.adj[b][a] = st
        s.num_superedges = g.num_edges
        return s

    @classmethod
    def from_partition(cls, g: WeightedGraph, groups: Iterable[Iterable[int]]) -> "SummaryGraph":
        """Summary whose supernodes are ``groups`` (must partition ``g``'s nodes)."""
        groups = [sorted(set(grp)) for grp in groups]
        flat = [v for grp in groups for v in grp]
        if sorted(flat) != list(range(g.n)):
            raise ValueError("groups must partition the node set exactly")
        s = cls.identity(g)
        for grp in groups:
            if len(grp) > 1:
                s.merge(grp)
        return s

    def copy(self) -> "SummaryGraph":
        out = SummaryGraph(self.n, self.labels, self.num_original_edges)
        out.members = {x: list(m) for x, m in self.members.items()}
        memo: dict[int, EdgeStats] = {}
        out.adj = {}
        for x, row in self.adj.items():
            new_row = {}
            for y, st in row.items():
                key = id(st)
                if key not in memo:
                    memo[key] = EdgeStats(st.count, st.total, st.m2, st.lo, st.hi)
                new_row[y] = memo[key]
            out.adj[x] = new_row
        out.provenance = self.provenance.copy()
        out.num_superedges = self.num_superedges
        return out

    @property
    def num_supernodes(self) -> int:
        return len(self.members)

    def sids(self) -> list[int]:
        return sorted(self.members)

    def check_sid(self, x) -> int:
        x = int(x)
        if x not in self.members:
            raise KeyError(f"unknown supernode {x}")
        return x

    def superedges(self) -> list[SuperEdge]:
        """All superedges with ``a <= b``, sorted."""
        out = []
        for x in sorted(self.adj):
            for y in sorted(self.adj[x]):
                if y >= x:
                    st = self.adj[x][y]
                    out.append(SuperEdge(x, y, st.mean, st.count, st.sum_sq))
        return out

    def merge(self, sids: Iterable[int]) -> int:
        """Collapse ``sids`` into one supernode in place; returns the new sid."""
        sids = list(dict.fromkeys(int(x) for x in sids))
        if len(sids) < 2:
            raise ValueError("merge needs at least two distinct supernodes")
        for x in sids:
            self.check_sid(x)
        group = set(sids)
        keep = min(sids, key=lambda x: (-len(self.members[x]), x))

        self_stats = None
        outside: dict[int, EdgeStats] = {}
        touched = 0
        for x in sids:
            for y, st in self.adj[x].items():
                if y in group:
                    if y >= x:
                        self_stats = combine(self_stats, st)
                        touched += 1
                else:
                    outside[y] = combine(outside.get(y), st)
                    touched += 1
                    del self.adj[y][x]

        members: list[int] = []
        for x in sids:
            part = self.members.pop(x)
            if x != keep:
                self.provenance[part] = keep
            members.extend(part)
            del self.adj[x]
        members.sort()
        self.members[keep] = members
        row = dict(outside)
        for y, st in outside.items():
            self.adj[y][keep] = st
        if self_stats is not None:
            row[keep] = self_stats
        self.adj[keep] = row
        self.num_superedges += len(row) - touched
        return keep

    def compression_ratio(self) -> float:
        if self.num_original_edges == 0:
            raise ValueError("compression ratio is undefined for a graph without edges")
        return self.num_superedges / self.num_original_edges

    def check_invariants(self, g: WeightedGraph | None = None) -> None:
        """Raise ``AssertionError`` if the summary is internally inconsistent."""
        nodes = sorted(v for m in self.members.values() for v in m)
        assert nodes == list(range(self.n)), "members do not partition V"
        for x, m in self.members.items():
            assert all(self.provenance[v] == x for v in m), "provenance mismatch"
        count = 0
        for x, row in self.adj.items():
            assert x in self.members, "dangling sid in adjacency"
            for y, st in row.items():
                assert self.adj[y][x] is st, "asymmetric adjacency"
                count += y >= x
        assert count == self.num_superedges, "superedge count drift"
        if g is not None:
            totals: dict[tuple[int, int], list[float]] = {}
            for a, b, w in g.edges():
                x, y = sorted((int(self.provenance[a]), int(self.provenance[b])))
                totals.setdefault((x, y), []).append(w)
            assert len(totals) == self.num_superedges, "superedge set does not match g"
            for (x, y), ws in totals.items():
                st = self.adj[x][y]
                assert st.count == len(ws)
                assert math.isclose(st.total, math.fsum(ws), rel_tol=1e-9, abs_tol=1e-12)


def compression_ratio(s: SummaryGraph, g: WeightedGraph | None = None) -> float:
    """``|E_S| / |E|``; self-superedges count as superedges."""
    if g is not None and g.num_edges != s.num_original_edges:
        raise ValueError("summary does not belong to this graph")
    return s.compression_ratio()


def merge_set(s: SummaryGraph, members: Iterable[int]) -> SummaryGraph:
    """Merge ``members`` (sids) into one supernode. Mutates and returns ``s``."""
    s.merge(members)
    return s


def cost(s: SummaryGraph, x: int) -> int:
    """Number of superedges incident to ``x`` (a self-superedge counts once)."""
    return len(s.adj[s.check_sid(x)])


def merged_cost(s: SummaryGraph, q: int, c: int) -> int:
    aq, ac = s.adj[q], s.adj[c]
    targets = (aq.keys() | ac.keys()) - {q, c}
    has_self = q in aq or c in ac or c in aq
    return len(targets) + has_self


def cost_reduction(s: SummaryGraph, q: int, c: int) -> float:
    """Normalised saving in superedges if ``q`` and ``c`` were merged."""
    q, c = s.check_sid(q), s.check_sid(c)
    if q == c:
        raise ValueError("cost_reduction needs two distinct supernodes")
    before = len(s.adj[q]) + len(s.adj[c])
    if before == 0:
        return 0.0
    return (before - merged_cost(s, q, c)) / before


def neighborhood_similarity(s: SummaryGraph, q: int, c: int) -> float:
    """Jaccard similarity of supernode neighbour sets, with ``q`` and ``c`` removed from both."""
    q, c = s.check_sid(q), s.check_sid(c)
    if q == c:
        raise ValueError("neighborhood_similarity needs two distinct supernodes")
    a = s.adj[q].keys() - {q, c}
    b = s.adj[c].keys() - {q, c}
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


class GroupAccumulator:
    """Grows a tentative merge set while tracking the superedges it would produce.

    ``groups[t]`` aggregates original edges between the set and outside
    supernode ``t`` (including future members not yet added); ``inner``
    aggregates edges within the set.
    """

    def __init__(self, s: SummaryGraph, members: Iterable[int]):
        self.s = s
        self.members: set[int] = set()
        self.inner: EdgeStats | None = None
        self.groups: dict[int, EdgeStats] = {}
        for x in members:
            self.add(s.check_sid(x))

    def _proposal(self, c: int):
        s = self.s
        inner = combine(self.inner, self.groups.get(c))
        changed = {}
        for t, st in s.adj[c].items():
            if t == c:
                inner = combine(inner, st)
            elif t not in self.members:
                changed[t] = combine(self.groups.get(t), st)
        return inner, changed

    def add(self, c: int) -> None:
        if c in self.members:
            raise ValueError(f"supernode {c} already in the set")
        inner, changed = self._proposal(c)
        self.inner = inner
        self.groups.pop(c, None)
        self.groups.update(changed)
        self.members.add(c)

    def accepts(self, c: int, theta_w: float) -> bool:
        """Whether adding ``c`` keeps every superedge it changes within ``theta_w``."""
        inner, changed = self._proposal(c)
        if inner is not None and not within_tolerance(inner, theta_w):
            return False
        return all(within_tolerance(st, theta_w) for st in changed.values())

    def try_add(self, c: int, theta_w: float) -> bool:
        if self.accepts(c, theta_w):
            self.add(c)
            return True
        return False

    def all_within(self, theta_w: float) -> bool:
        if self.inner is not None and not within_tolerance(self.inner, theta_w):
            return False
        return all(within_tolerance(st, theta_w) for st in self.groups.values())


def weight_compatible(s: SummaryGraph, members: Iterable[int], c: int, theta_w: float) -> bool:
    """True iff every superedge of ``members + {c}`` has max weight deviation ``<= theta_w``.

    The merged set's own self-superedge is included among the groups checked.
    """
    members = list(members)
    c = s.check_sid(c)
    if c in members:
        raise ValueError("candidate already in the member set")
    acc = GroupAccumulator(s, members + [c])
    return acc.all_within(theta_w)


# -- summary files ---------------------------------------------------------

def write_summary(s: SummaryGraph, directory, stats: dict | None = None) -> dict:
    """Write ``membership.txt``, ``superedges.txt`` and optionally ``stats.json``.

    Membership lines are ``sid node_label``; superedge lines are
    ``sidA sidB weight member_count``.
    """
    os.makedirs(directory, exist_ok=True)
    paths = {
        "membership": os.path.join(directory, "membership.txt"),
        "superedges": os.path.join(directory, "superedges.txt"),
    }
    with open(paths["membership"], "w", encoding="utf-8") as fh:
        for x in s.sids():
            for v in s.members[x]:
                fh.write(f"{x} {s.labels[v]}\n")
    with open(paths["superedges"], "w", encoding="utf-8") as fh:
        for e in s.superedges():
            fh.write(f"{e.a} {e.b} {format_weight(e.weight)} {e.member_count}\n")
    if stats is not None:
        paths["stats"] = os.path.join(directory, "stats.json")
        with open(paths["stats"], "w", encoding="utf-8") as fh:
            json.dump(stats, fh, indent=2, sort_keys=True)
    return paths


class SummaryFileError(ValueError):
    pass


@dataclass
class LoadedSummary:
    """Summary read back from disk: a partition plus superedge means and counts."""

    members: dict[int, list[int]]
    superedges: list[SuperEdge]
    n: int
    labels: list

    @property
    def num_supernodes(self) -> int:
        return len(self.members)

    @property
    def num_superedges(self) -> int:
        return len(self.superedges)


def read_summary(directory, g: WeightedGraph) -> LoadedSummary:
    """Read summary files written by :func:`write_summary`, validated against ``g``."""
    members: dict[int, list[int]] = {}
    seen: set[int] = set()
    with open(os.path.join(directory, "membership.txt"), encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise SummaryFileError(f"membership line {lineno}: expected 'sid label'")
            try:
                sid, label = int(parts[0]), int(parts[1])
                v = g.index_of(label)
            except (ValueError, KeyError):
                raise SummaryFileError(f"membership line {lineno}: unknown node {parts[1]!r}") from None
            if v in seen:
                raise SummaryFileError(f"membership line {lineno}: node {label} listed twice")
            seen.add(v)
            members.setdefault(sid, []).append(v)
    if len(seen) != g.n:
        raise SummaryFileError(f"membership covers {len(seen)} of {g.n} nodes")
    edges = []
    pairs = set()
    with open(os.path.join(directory, "superedges.txt"), encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            try:
                a, b, w, cnt = int(parts[0]), int(parts[1]), float(parts[2]), int(parts[3])
            except (ValueError, IndexError):
                raise SummaryFileError(f"superedge line {lineno}: expected 'sidA sidB weight count'") from None
            if a not in members or b not in members:
                raise SummaryFileError(f"superedge line {lineno}: unknown supernode")
            a, b = min(a, b), max(a, b)
            if (a, b) in pairs:
                raise SummaryFileError(f"superedge line {lineno}: duplicate superedge")
            pairs.add((a, b))
            edges.append(SuperEdge(a, b, w, cnt, float("nan")))
    for m in members.values():
        m.sort()
    return LoadedSummary(members, edges, g.n, g.labels)
