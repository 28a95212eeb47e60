"""Occupant grouping by vote-label histograms."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..embedding.cluster import kmeans
from .records import CLASSES, FeedbackRecord


def label_histograms(records: Sequence[FeedbackRecord]) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    for r in records:
        out.setdefault(r.user_id, np.zeros(len(CLASSES)))[int(r.label)] += 1
    return out


def cluster_personalities(histograms: Mapping[str, Sequence[float]], k: int = 10, seed: int = 0) -> dict[str, int]:
    """k-means over per-user label frequencies (points on the 3-class simplex)."""
    users = sorted(histograms)
    H = np.array([np.asarray(histograms[u], dtype=float) for u in users])
    totals = H.sum(axis=1, keepdims=True)
    F = np.divide(H, totals, out=np.full_like(H, 1.0 / H.shape[1]), where=totals > 0)
    labels = kmeans(F, k, seed)
    return dict(zip(users, labels.tolist()))
