"""MinHash signatures of adjacency sets and banded LSH buckets.

Each node is represented by its open neighbourhood (its column of the
adjacency matrix). Edge weights play no part here; candidates produced by
the index are verified downstream.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, asdict

import numpy as np

from .graph import WeightedGraph

# minhash of an empty neighbourhood
EMPTY = np.iinfo(np.int64).max


@dataclass(frozen=True)
class LshParams:
    k: int = 100
    b: int = 25
    r: int = 4
    seed: int | None = 0

    def __post_init__(self):
        if min(self.k, self.b, self.r) < 1:
            raise ValueError("k, b and r must all be >= 1")
        if self.k != self.b * self.r:
            raise ValueError(f"k must equal b*r, got k={self.k}, b={self.b}, r={self.r}")

    @classmethod
    def from_bands(cls, b: int, r: int, seed=0) -> "LshParams":
        return cls(k=b * r, b=b, r=r, seed=seed)

    @property
    def threshold(self) -> float:
        """Similarity at which the collision curve is steepest, ``(1/b)**(1/r)``."""
        return (1.0 / self.b) ** (1.0 / self.r)

    def collision_probability(self, s: float) -> float:
        return 1.0 - (1.0 - s ** self.r) ** self.b


def generate_permutations(n: int, k: int, seed=None) -> np.ndarray:
    """``k`` independent uniform permutations of ``0..n-1`` as a ``(k, n)`` array.

    Row ``i`` maps node id ``u`` to its rank ``perms[i, u]``.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.permuted(np.tile(np.arange(n, dtype=np.int64), (k, 1)), axis=1)


def compute_signatures(g: WeightedGraph, perms: np.ndarray) -> np.ndarray:
    """Minhash matrix of shape ``(k, n)``.

    Entry ``(i, v)`` is ``min(perms[i, u] for u in N(v))``, or :data:`EMPTY`
    for isolated ``v``.
    """
    perms = np.asarray(perms)
    if perms.ndim != 2 or perms.shape[1] != g.n:
        raise ValueError(f"permutations must have shape (k, {g.n}), got {perms.shape}")
    k = perms.shape[0]
    sig = np.full((k, g.n), EMPTY, dtype=np.int64)
    deg = np.diff(g.indptr)
    nonempty = np.flatnonzero(deg)
    if len(nonempty) == 0:
        return sig
    starts = g.indptr[nonempty]
    for i in range(k):
        sig[i, nonempty] = np.minimum.reduceat(perms[i][g.indices], starts)
    return sig


class LshIndex:
    """Banded hash tables over a signature matrix.

    ``bucket_of[j, v]`` is the bucket id of node ``v`` in band ``j`` (``-1``
    when the band holds the empty sentinel) and ``buckets[j][id]`` lists the
    nodes of that bucket in ascending order. Bucket keys are the exact tuple of
    the band's ``r`` values, so distinct sequences never collide.
    """

    def __init__(self, params: LshParams, bucket_of: np.ndarray, buckets: list[list[np.ndarray]]):
        self.params = params
        self.bucket_of = bucket_of
        self.buckets = buckets

    @property
    def n(self) -> int:
        return self.bucket_of.shape[1]

    def bucket_sizes(self) -> np.ndarray:
        return np.array([len(bk) for band in self.buckets for bk in band], dtype=np.int64)

    def stats(self) -> dict:
        sizes = self.bucket_sizes()
        hist = np.bincount(sizes) if len(sizes) else np.zeros(1, dtype=np.int64)
        return {
            "params": asdict(self.params),
            "nodes": int(self.n),
            "buckets": int(len(sizes)),
            "max_bucket": int(sizes.max()) if len(sizes) else 0,
            "bucket_size_histogram": {str(s): int(c) for s, c in enumerate(hist) if c},
        }

    def dump(self, directory, signatures: np.ndarray | None = None) -> None:
        """Write ``index.json`` (bucket statistics) and optionally ``signatures.npy``."""
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "index.json"), "w", encoding="utf-8") as fh:
            json.dump(self.stats(), fh, indent=2)
        if signatures is not None:
            np.save(os.path.join(directory, "signatures.npy"), signatures)


def build_index(sig: np.ndarray, params: LshParams) -> LshIndex:
    sig = np.asarray(sig, dtype=np.int64)
    if sig.ndim != 2 or sig.shape[0] != params.k:
        raise ValueError(f"signature matrix needs {params.k} rows, got shape {sig.shape}")
    n = sig.shape[1]
    r = params.r
    bucket_of = np.full((params.b, n), -1, dtype=np.int64)
    buckets: list[list[np.ndarray]] = []
    for j in range(params.b):
        band = sig[j * r:(j + 1) * r].T
        live = np.flatnonzero(~np.any(band == EMPTY, axis=1))
        if len(live) == 0:
            buckets.append([])
            continue
        _, inverse = np.unique(band[live], axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        bucket_of[j, live] = inverse
        order = np.argsort(inverse, kind="stable")
        cuts = np.flatnonzero(np.diff(inverse[order])) + 1
        buckets.append(np.split(live[order], cuts))
    return LshIndex(params, bucket_of, buckets)


def build_index_for_graph(g: WeightedGraph, params: LshParams) -> tuple[LshIndex, np.ndarray]:
    perms = generate_permutations(g.n, params.k, params.seed)
    sig = compute_signatures(g, perms)
    return build_index(sig, params), sig


def candidates(index: LshIndex, q: int) -> set[int]:
    """All nodes sharing at least one bucket with ``q``, excluding ``q``."""
    q = int(q)
    if not 0 <= q < index.n:
        raise IndexError(f"node {q} out of range for index over {index.n} nodes")
    out: set[int] = set()
    for j in range(index.params.b):
        bid = index.bucket_of[j, q]
        if bid >= 0:
            out.update(index.buckets[j][bid].tolist())
    out.discard(q)
    return out
