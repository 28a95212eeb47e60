"""Cosine similarity, per-anchor similarity maps and their exports."""

from __future__ import annotations

import csv
import json
import math
from typing import Sequence

import numpy as np

from ..errors import UnknownCell, ZeroVector
from ..graph.cells import Cell
from ..spatial.model import CoordinateTransform
from .skipgram import EmbeddingMatrix


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """``sum(a_i b_i) / (sqrt(sum a_i^2) sqrt(sum b_i^2))``, clipped to [-1, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return max(-1.0, min(1.0, float(np.dot(a, b)) / (na * nb)))


def similarity_matrix(vectors: np.ndarray) -> np.ndarray:
    v = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(v, axis=1)
    if (norms == 0).any():
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    u = v / norms[:, None]
    return np.clip(u @ u.T, -1.0, 1.0)


def similarity_map(emb: EmbeddingMatrix, anchor: str, cells: Sequence[Cell | str]) -> list[tuple[str, float]]:
    """Similarity of every cell to ``anchor``, in the order given."""
    ids = [c.id if isinstance(c, Cell) else c for c in cells]
    if anchor not in ids or anchor not in emb:
        raise UnknownCell(f"anchor {anchor!r} is not a known cell")
    missing = [c for c in ids if c not in emb]
    if missing:
        raise UnknownCell(f"no embedding for cell {missing[0]!r}")
    v = emb.rows(ids)
    a = emb[anchor]
    na = np.linalg.norm(a)
    norms = np.linalg.norm(v, axis=1)
    if na == 0 or (norms == 0).any():
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    sims = np.clip((v @ a) / (norms * na), -1.0, 1.0)
    sims[ids.index(anchor)] = 1.0
    return list(zip(ids, sims.tolist()))


def _normalized(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0 for _ in values]
    return [(v - lo) / (hi - lo) for v in values]


def write_similarity_csv(rows: list[tuple[str, float]], cells: Sequence[Cell], path, normalize: bool = False):
    where = {c.id: c.center for c in cells}
    values = _normalized([s for _, s in rows]) if normalize else [s for _, s in rows]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cell_id", "x", "y", "similarity"])
        for (cid, _), s in zip(rows, values):
            x, y = where[cid]
            w.writerow([cid, repr(x), repr(y), repr(s)])


def similarity_geojson(rows: list[tuple[str, float]], cells: Sequence[Cell], transform: CoordinateTransform,
                       anchor: str | None = None, normalize: bool = False) -> dict:
    """FeatureCollection of cell points (lon, lat) carrying a ``similarity`` property."""
    where = {c.id: c for c in cells}
    values = _normalized([s for _, s in rows]) if normalize else [s for _, s in rows]
    feats = []
    for (cid, _), s in zip(rows, values):
        c = where[cid]
        lat, lon = transform.local_to_global(*c.center)
        feats.append({"type": "Feature",
                      "geometry": {"type": "Point", "coordinates": [lon, lat]},
                      "properties": {"cell_id": cid, "space_id": c.space_id, "x": c.center[0], "y": c.center[1],
                                     "similarity": s}})
    out = {"type": "FeatureCollection", "features": feats}
    if anchor is not None:
        out["properties"] = {"anchor": anchor, "normalized": normalize}
    return out


def write_geojson(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
