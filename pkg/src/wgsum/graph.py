"""Weighted undirected graphs: storage, edge-list I/O and synthetic generators."""

from __future__ import annotations

import io
import os
import warnings
from typing import Iterable, Sequence

import numpy as np

AGGREGATIONS = ("sum", "mean", "max")


class EdgeListParseError(ValueError):
    """Raised for malformed edge-list input; ``lineno`` is 1-based (0 when not line specific)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        if lineno:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class WeightedGraph:
    """Immutable simple undirected graph with strictly positive edge weights.

    Nodes are the dense ids ``0..n-1``. The original labels are kept in
    ``labels`` so that output can be written in terms of the input. Adjacency
    is stored in CSR form with neighbours in ascending id order.
    """

    def __init__(self, n: int, u, v, w, labels: Sequence | None = None):
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if not (u.shape == v.shape == w.shape) or u.ndim != 1:
            raise ValueError("edge arrays must be one-dimensional and of equal length")
        if n < 0:
            raise ValueError("node count must be non-negative")
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(u == v):
            raise ValueError("self-loops are not allowed")
        if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
            raise ValueError("edge weights must be finite and strictly positive")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if len(lo) > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise ValueError("duplicate edges are not allowed")

        self.n = int(n)
        self.labels = list(range(n)) if labels is None else list(labels)
        if len(self.labels) != n:
            raise ValueError("label count does not match node count")
        self.edge_u, self.edge_v, self.edge_w = lo, hi, w
        for arr in (self.edge_u, self.edge_v, self.edge_w):
            arr.flags.writeable = False

        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        ww = np.concatenate([w, w])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        self.weights = ww[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.indptr[1:])
        for arr in (self.indices, self.weights, self.indptr):
            arr.flags.writeable = False
        self._label_index = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], labels: Sequence | None = None) -> "WeightedGraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples over dense ids."""
        us, vs, ws = [], [], []
        for e in edges:
            us.append(e[0])
            vs.append(e[1])
            ws.append(e[2] if len(e) > 2 else 1.0)
        return cls(n, us, vs, ws, labels)

    @classmethod
    def from_labeled_edges(cls, edges: Iterable[tuple]) -> "WeightedGraph":
        """Build from labelled ``(a, b, w)`` tuples; labels are remapped in sorted order."""
        edges = list(edges)
        labels = sorted({e[0] for e in edges} | {e[1] for e in edges})
        index = {lab: i for i, lab in enumerate(labels)}
        return cls.from_edges(
            len(labels), [(index[e[0]], index[e[1]], *e[2:]) for e in edges], labels
        )

    @property
    def num_edges(self) -> int:
        return len(self.edge_u)

    def degree(self, v: int | None = None):
        deg = np.diff(self.indptr)
        return deg if v is None else int(deg[self._check(v)])

    def neighbor_ids(self, v: int) -> np.ndarray:
        v = self._check(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def neighbor_weights(self, v: int) -> np.ndarray:
        v = self._check(v)
        return self.weights[self.indptr[v]:self.indptr[v + 1]]

    def weight(self, u: int, v: int) -> float:
        """Weight of edge ``(u, v)``, or 0.0 when absent."""
        nbrs = self.neighbor_ids(u)
        i = np.searchsorted(nbrs, self._check(v))
        if i < len(nbrs) and nbrs[i] == v:
            return float(self.neighbor_weights(u)[i])
        return 0.0

    def edges(self):
        """Iterate ``(u, v, w)`` with ``u < v`` in ascending order."""
        for a, b, w in zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist()):
            yield a, b, w

    def edge_dict(self) -> dict:
        return {(a, b): w for a, b, w in self.edges()}

    def index_of(self, label) -> int:
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        return self._label_index[label]

    def _check(self, v) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range for graph with {self.n} nodes")
        return v

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.labels == other.labels
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
            and np.array_equal(self.edge_w, other.edge_w)
        )

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.num_edges})"


def neighbors(g: WeightedGraph, v: int) -> list[tuple[int, float]]:
    """Neighbours of ``v`` as ``(id, weight)`` pairs in ascending id order."""
    return list(zip(g.neighbor_ids(v).tolist(), g.neighbor_weights(v).tolist()))


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8")), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8"), None


def parse_edge_list(text: str, aggregate: str = "sum") -> WeightedGraph:
    """Parse edge-list text held in memory. See :func:`load_edge_list`."""
    return load_edge_list(io.StringIO(text), aggregate=aggregate)


def load_edge_list(source, aggregate: str = "sum") -> WeightedGraph:
    """Read a whitespace separated ``u v [w]`` edge list.

    ``source`` may be a path, raw bytes, or a text/binary stream. Lines
    starting with ``#`` or ``%`` are comments and a missing weight means 1.0.
    Node labels must be integers and are remapped to dense ids in ascending
    label order. Repeated edges (in either orientation) are combined with
    ``aggregate`` (``sum``, ``mean`` or ``max``). Self-loop lines are dropped
    with a single warning that reports how many were seen.
    """
    if aggregate not in AGGREGATIONS:
        raise ValueError(f"aggregate must be one of {AGGREGATIONS}, got {aggregate!r}")
    fh, close = _open_text(source)
    acc: dict[tuple[int, int], list[float]] = {}
    seen: set[int] = set()
    self_loops = 0
    data_lines = 0
    try:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line[0] in "#%":
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise EdgeListParseError(f"expected 'u v [w]', got {line!r}", lineno)
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(f"non-integer node label in {line!r}", lineno) from None
            try:
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise EdgeListParseError(f"non-numeric weight in {line!r}", lineno) from None
            if not np.isfinite(w) or w <= 0:
                raise EdgeListParseError(f"weight must be positive and finite, got {parts[2]}", lineno)
            data_lines += 1
            seen.add(a)
            seen.add(b)
            if a == b:
                self_loops += 1
                continue
            acc.setdefault((min(a, b), max(a, b)), []).append(w)
    finally:
        if close:
            fh.close()
        elif close is None:
            fh.detach()
    if data_lines == 0:
        raise EdgeListParseError("empty edge list")
    if self_loops:
        warnings.warn(f"dropped {self_loops} self-loop line(s)", stacklevel=2)

    labels = sorted(seen)
    index = {lab: i for i, lab in enumerate(labels)}
    combine = {"sum": sum, "mean": lambda ws: sum(ws) / len(ws), "max": max}[aggregate]
    us, vs, ws = [], [], []
    for (a, b), group in acc.items():
        us.append(index[a])
        vs.append(index[b])
        ws.append(combine(group))
    return WeightedGraph(len(labels), us, vs, ws, labels)


def format_weight(w: float) -> str:
    return repr(float(w))


def write_edge_list(g: WeightedGraph, dest) -> None:
    """Write ``label_u label_v w`` lines in ascending ``(u, v)`` id order."""
    lines = [
        f"{g.labels[a]} {g.labels[b]} {format_weight(w)}\n" for a, b, w in g.edges()
    ]
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.writelines(lines)
    else:
        dest.writelines(lines)


def generate_synthetic(
    n: int,
    n_blocks: int = 10,
    p_block: float = 0.2,
    p_share: float = 1.0,
    p_keep: float = 0.5,
    weight_levels: int = 5,
    weight_noise: float = 0.0,
    seed=None,
) -> WeightedGraph:
    """Planted-block graph whose blocks are groups of structurally similar nodes.

    Nodes are split into ``n_blocks`` contiguous, near-equal blocks. Exactly
    ``max(1, round(p_block * C(n_blocks, 2)))`` block pairs are picked at
    random and joined completely, so a block is a set of twins. Each node
    follows its block's pattern with probability ``p_share``; otherwise it
    keeps each of its pattern edges with probability ``p_keep``. An edge
    survives only if both endpoints keep it.

    Every connected block pair gets a base weight drawn from
    ``1..weight_levels`` (``weight_levels=1`` gives constant weight 1) and each
    edge weight is ``base * (1 + weight_noise * U(-1, 1))``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 2 <= n_blocks <= n:
        raise ValueError("n_blocks must be in [2, n]")
    for name, p in (("p_block", p_block), ("p_share", p_share), ("p_keep", p_keep)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {p}")
    if weight_levels < 1:
        raise ValueError("weight_levels must be >= 1")
    if not 0.0 <= weight_noise < 1.0:
        raise ValueError("weight_noise must be in [0, 1)")

    rng = np.random.default_rng(seed)
    block = (np.arange(n) * n_blocks) // n
    starts = np.searchsorted(block, np.arange(n_blocks + 1))
    pairs = [(a, b) for a in range(n_blocks) for b in range(a + 1, n_blocks)]
    n_pairs = max(1, int(round(p_block * len(pairs))))
    chosen = rng.choice(len(pairs), size=n_pairs, replace=False)
    chosen.sort()
    base = rng.integers(1, weight_levels + 1, size=n_pairs).astype(np.float64)
    deviant = rng.random(n) >= p_share

    us, vs, ws = [], [], []
    for idx, pair_id in enumerate(chosen):
        a, b = pairs[pair_id]
        left = np.arange(starts[a], starts[a + 1])
        right = np.arange(starts[b], starts[b + 1])
        uu = np.repeat(left, len(right))
        vv = np.tile(right, len(left))
        keep = np.ones(len(uu), dtype=bool)
        drop_u = deviant[uu] & (rng.random(len(uu)) >= p_keep)
        drop_v = deviant[vv] & (rng.random(len(uu)) >= p_keep)
        keep &= ~(drop_u | drop_v)
        uu, vv = uu[keep], vv[keep]
        noise = rng.uniform(-1.0, 1.0, size=len(uu)) if weight_noise > 0 else 0.0
        us.append(uu)
        vs.append(vv)
        ws.append(base[idx] * (1.0 + weight_noise * noise) * np.ones(len(uu)))
    return WeightedGraph(n, np.concatenate(us), np.concatenate(vs), np.concatenate(ws))


def path_graph(weights: Sequence[float]) -> WeightedGraph:
    """Path ``0-1-...-len(weights)`` with the given edge weights."""
    k = len(weights)
    return WeightedGraph(k + 1, np.arange(k), np.arange(1, k + 1), weights)


def star_graph(leaves: int, weight: float = 1.0) -> WeightedGraph:
    """Star with centre 0 and ``leaves`` leaves."""
    return WeightedGraph(leaves + 1, np.zeros(leaves, dtype=int), np.arange(1, leaves + 1), [weight] * leaves)


def random_graph(n: int, p: float, weight_levels: int = 3, seed=None) -> WeightedGraph:
    """Erdos-Renyi graph with integer weights drawn from ``1..weight_levels``."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    w = rng.integers(1, weight_levels + 1, size=int(keep.sum())).astype(float)
    return WeightedGraph(n, iu[keep], iv[keep], w)
