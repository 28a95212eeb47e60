"""Spatial-coherence measures of a cell embedding against the scene's AoI layout."""

from __future__ import annotations

from collections import deque
from itertools import combinations

import numpy as np
from scipy.stats import spearmanr

from ..embedding.skipgram import EmbeddingMatrix
from ..graph.model import AttributedGraph
from .scene import ComfortField


def _unit_rows(emb: EmbeddingMatrix, ids) -> np.ndarray:
    V = emb.rows(ids)
    n = np.linalg.norm(V, axis=1, keepdims=True)
    return V / np.where(n > 0, n, 1.0)


def aoi_similarity_gap(emb: EmbeddingMatrix, fld: ComfortField, seed: int = 0, pairs: int = 2000) -> dict:
    """Class-balanced mean cosine similarity within and between AoI classes.

    Within: mean over classes of the mean similarity of random same-class
    pairs. Between: mean over class pairs of the mean cross-class similarity.
    """
    rng = np.random.default_rng(seed)
    groups: dict[str, np.ndarray] = {}
    for i, c in enumerate(fld.aoi_class):
        groups.setdefault(c, []).append(i)
    groups = {k: np.asarray(v) for k, v in sorted(groups.items()) if len(v) >= 2}
    U = _unit_rows(emb, fld.cell_ids)
    within = {}
    for k, idx in groups.items():
        a = rng.choice(idx, pairs)
        b = rng.choice(idx, pairs)
        keep = a != b
        within[k] = float(np.mean(np.sum(U[a[keep]] * U[b[keep]], axis=1)))
    between = {}
    for k1, k2 in combinations(groups, 2):
        a = rng.choice(groups[k1], pairs)
        b = rng.choice(groups[k2], pairs)
        between[f"{k1}|{k2}"] = float(np.mean(np.sum(U[a] * U[b], axis=1)))
    w = float(np.mean(list(within.values()))) if within else float("nan")
    bt = float(np.mean(list(between.values()))) if between else float("nan")
    return {"within": w, "between": bt, "gap": w - bt, "within_by_class": within, "between_by_pair": between}


def hop_distances(graph: AttributedGraph, source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def hop_similarity_spearman(graph: AttributedGraph, emb: EmbeddingMatrix, anchors, cell_ids) -> dict:
    """Spearman rank correlation of graph hop distance against similarity, per anchor."""
    U = _unit_rows(emb, cell_ids)
    pos = {c: i for i, c in enumerate(cell_ids)}
    per_anchor = {}
    for a in anchors:
        hops = hop_distances(graph, a)
        reach = [c for c in cell_ids if c in hops and c != a]
        if len(reach) < 3:
            continue
        sims = U[[pos[c] for c in reach]] @ U[pos[a]]
        rho = spearmanr([hops[c] for c in reach], sims).statistic
        per_anchor[a] = float(rho)
    mean = float(np.mean(list(per_anchor.values()))) if per_anchor else float("nan")
    return {"mean_rho": mean, "per_anchor": per_anchor}


def choose_anchors(fld: ComfortField, model, k: int = 5) -> list[str]:
    """One cell per AoI class and per ventilation mode where available, then evenly spaced fill.

    Within a group the pick is the group's middle cell in id order.
    """
    modes = {sp.id: sp.ventilation_mode.value for sp in model.spaces}
    groups: dict[str, list[str]] = {}
    for c, cls in zip(fld.cells, fld.aoi_class):
        key = cls if cls != "none" else f"none:{modes[c.space_id]}"
        groups.setdefault(key, []).append(c.id)
    picks = []
    for key in sorted(groups, key=lambda g: ("+" in g, g)):
        ids = sorted(groups[key])
        picks.append(ids[len(ids) // 2])
        if len(picks) == k:
            return picks
    ids = sorted(fld.cell_ids)
    for j in range(k):
        c = ids[(2 * j + 1) * len(ids) // (2 * k)]
        if c not in picks and len(picks) < k:
            picks.append(c)
    return picks[:k]
