"""Random-walk corpora over the building graph."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._backend import kernels
from ..errors import ValidationError
from ..graph.model import AttributedGraph

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def derive_seeds(seed: int, count: int, stream: int = 0) -> np.ndarray:
    """``count`` decorrelated 64-bit seeds (splitmix64 finaliser over a counter)."""
    with np.errstate(over="ignore"):
        base = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ (np.uint64(stream) * np.uint64(0xD1B54A32D192ED03))
        z = base + (np.arange(1, count + 1, dtype=np.uint64) * _GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


@dataclass
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 40
    seed: int = 0
    # second-order return/in-out bias; 1.0/1.0 is the uniform walk
    p: float = 1.0
    q: float = 1.0


@dataclass
class WalkCorpus:
    nodes: list[str]
    array: np.ndarray  # (n_walks, walk_length) node positions, -1 padded
    params: WalkConfig = field(default_factory=WalkConfig)

    @property
    def walks(self) -> list[list[str]]:
        return [[self.nodes[i] for i in row if i >= 0] for row in self.array]

    def __len__(self) -> int:
        return len(self.array)


def random_walks(graph: AttributedGraph, walks_per_node: int = 10, walk_length: int = 40, seed: int = 0,
                 p: float = 1.0, q: float = 1.0, backend=None) -> WalkCorpus:
    """``walks_per_node`` walks from every node, each with its own seeded stream.

    Walk r from node i uses stream ``r * n + i``, so the corpus does not depend
    on how walks are scheduled. A walk stops early at a node with no neighbours.
    """
    if len(graph) == 0:
        raise ValidationError("graph has no nodes")
    if walk_length < 1 or walks_per_node < 1:
        raise ValidationError("walk_length and walks_per_node must be >= 1")
    nodes, indptr, indices = graph.to_csr()
    n = len(nodes)
    starts = np.tile(np.arange(n, dtype=np.int64), walks_per_node)
    seeds = derive_seeds(seed, len(starts))
    cfg = WalkConfig(walks_per_node, walk_length, seed, p, q)
    if p == 1.0 and q == 1.0:
        arr = (backend or kernels).random_walks(indptr, indices, starts, seeds, walk_length)
    else:
        arr = _biased_walks(indptr, indices, starts, seeds, walk_length, p, q)
    return WalkCorpus(nodes, arr, cfg)


def _biased_walks(indptr, indices, starts, seeds, walk_length, p, q) -> np.ndarray:
    """Second-order (return p, in-out q) walks by direct weighting; pure Python."""
    out = np.full((len(starts), walk_length), -1, dtype=np.int64)
    nbrs = [set(indices[indptr[i]:indptr[i + 1]].tolist()) for i in range(len(indptr) - 1)]
    for w, (start, s) in enumerate(zip(starts, seeds)):
        rng = np.random.default_rng(int(s))
        out[w, 0] = prev = cur = int(start)
        for step in range(1, walk_length):
            cand = indices[indptr[cur]:indptr[cur + 1]]
            if len(cand) == 0:
                break
            if step == 1:
                nxt = int(cand[rng.integers(len(cand))])
            else:
                wts = np.array([1.0 / p if c == prev else (1.0 if c in nbrs[prev] else 1.0 / q) for c in cand])
                nxt = int(cand[rng.choice(len(cand), p=wts / wts.sum())])
            prev, cur = cur, nxt
            out[w, step] = cur
    return out
