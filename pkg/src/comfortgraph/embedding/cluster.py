"""k-means with k-means++ seeding, used for cell and occupant clustering."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import KTooLarge, ValidationError
from ..graph.cells import Cell
from .skipgram import EmbeddingMatrix


def kmeans(X: np.ndarray, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-4) -> np.ndarray:
    """Lloyd iterations from k-means++ centres; returns a label per row.

    Stops when the total squared centre shift falls below ``tol`` times the
    mean per-feature variance. Distance ties go to the lower centre index.
    """
    X = np.asarray(X, dtype=float)
    n = len(X)
    if k < 1:
        raise ValidationError("k must be >= 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of points ({n})")
    rng = np.random.default_rng(seed)
    centers = np.empty((k, X.shape[1]))
    chosen = np.zeros(n, dtype=bool)
    first = int(rng.integers(n))
    centers[0] = X[first]
    chosen[first] = True
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        w = np.where(chosen, 0.0, d2)
        total = w.sum()
        if total > 0:
            pick = int(rng.choice(n, p=w / total))
        else:
            pick = int(rng.choice(np.flatnonzero(~chosen)))
        centers[j] = X[pick]
        chosen[pick] = True
        d2 = np.minimum(d2, ((X - centers[j]) ** 2).sum(axis=1))
    threshold = tol * float(np.mean(X.var(axis=0))) if n > 1 else 0.0
    for _ in range(max_iter):
        labels = _assign(X, centers)
        new = centers.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new[j] = X[members].mean(axis=0)
        shift = float(((new - centers) ** 2).sum())
        centers = new
        if shift <= threshold:
            break
    return _assign(X, centers)


def _assign(X: np.ndarray, centers: np.ndarray, chunk: int = 512) -> np.ndarray:
    out = np.empty(len(X), dtype=np.int64)
    for s in range(0, len(X), chunk):
        block = X[s:s + chunk]
        out[s:s + chunk] = np.argmin(((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2), axis=1)
    return out


def cluster_cells(emb: EmbeddingMatrix, cells: Sequence[Cell | str], k: int, seed: int = 0) -> dict[str, int]:
    """Group cells by their embedding vectors."""
    ids = [c.id if isinstance(c, Cell) else c for c in cells]
    labels = kmeans(emb.rows(ids), k, seed)
    return dict(zip(ids, labels.tolist()))
