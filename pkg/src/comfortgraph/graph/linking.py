"""Attach occupants and their votes to the building graph by proximity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NoCellOnLevel
from .cells import Cell
from .knn import KnnIndex, knn_build, knn_query_many
from .model import AttributedGraph, Relation

PERSONALITY_LABEL = "ThermalComfortPersonality"
TIE_TOL = 1e-9


@dataclass(frozen=True)
class LocatedEvent:
    """A vote (or bare fix) already expressed in the local metric frame."""

    user_id: str
    timestamp: float
    x: float
    y: float
    level_id: str
    kind: str = "vote"


class CellLocator:
    """Per-level HNSW indexes over cell centres with a deterministic tie rule."""

    def __init__(self, cells: list[Cell], seed: int = 0, **index_params):
        self.cells = {c.id: c for c in cells}
        self.indexes: dict[str, KnnIndex] = {}
        by_level: dict[str, list[Cell]] = {}
        for c in cells:
            by_level.setdefault(c.level_id, []).append(c)
        for lv, cs in by_level.items():
            self.indexes[lv] = knn_build([c.center for c in cs], [c.id for c in cs], seed=seed, **index_params)

    def nearest_many(self, xy, level_id: str) -> list[str]:
        """Nearest cell per point; equidistant centres resolve to the smallest id."""
        index = self.indexes.get(level_id)
        if index is None:
            raise NoCellOnLevel(f"no cells indexed on level {level_id!r}")
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        pos, dist = knn_query_many(index, xy, min(8, len(index)))
        out = []
        for row_p, row_d in zip(pos, dist):
            best = row_d[0]
            tied = [index.ids[p] for p, d in zip(row_p, row_d) if p >= 0 and d <= best + TIE_TOL]
            out.append(min(tied))
        return out

    def nearest(self, x: float, y: float, level_id: str) -> str:
        return self.nearest_many([(x, y)], level_id)[0]


def feedback_node(user_id: str, timestamp: float) -> str:
    return f"FB:{user_id}:{timestamp:.0f}"


def occupant_node(user_id: str) -> str:
    return f"U:{user_id}"


def personality_node(personality: int) -> str:
    return f"P{personality:02d}"


def link_feedback(graph: AttributedGraph, events: list[LocatedEvent], locator: CellLocator,
                  personalities: dict[str, int] | None = None) -> AttributedGraph:
    """Copy of ``graph`` with Feedback, Occupant and personality nodes attached.

    Each vote links (VOTED_AT) to its nearest cell; each occupant links to its
    personality cluster when ``personalities`` maps it.
    """
    g = graph.copy()
    personalities = personalities or {}
    for p in sorted(set(personalities.values())):
        g.add_node(personality_node(p), PERSONALITY_LABEL, cluster=p)
    by_level: dict[str, list[int]] = {}
    for i, ev in enumerate(events):
        by_level.setdefault(ev.level_id, []).append(i)
    nearest: dict[int, str] = {}
    for lv, idx in by_level.items():
        cells = locator.nearest_many([(events[i].x, events[i].y) for i in idx], lv)
        nearest.update(zip(idx, cells))
    for i, ev in enumerate(events):
        occ = occupant_node(ev.user_id)
        if occ not in g:
            g.add_node(occ, "Occupant", user=ev.user_id)
            if ev.user_id in personalities:
                g.add_edge(occ, personality_node(personalities[ev.user_id]), Relation.BELONGS_TO_PERSONALITY)
        if ev.kind != "vote":
            continue
        fb = feedback_node(ev.user_id, ev.timestamp)
        n = 1
        while fb in g:
            n += 1
            fb = f"{feedback_node(ev.user_id, ev.timestamp)}#{n}"
        g.add_node(fb, "Feedback", user=ev.user_id, timestamp=ev.timestamp, cell=nearest[i])
        g.add_edge(fb, nearest[i], Relation.VOTED_AT)
    return g
