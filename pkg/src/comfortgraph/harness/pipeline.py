"""Graph, linking and embedding stages run on a simulated study."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from ..classifier.forest import ForestParams
from ..classifier.personality import cluster_personalities
from ..classifier.records import FeedbackRecord
from ..embedding.skipgram import EmbeddingMatrix, train_skipgram
from ..embedding.walks import derive_seeds, random_walks
from ..graph.build import build_graph
from ..graph.cells import Cell, discretize
from ..graph.linking import CellLocator, LocatedEvent, link_feedback
from ..graph.model import AttributedGraph
from ..spatial.model import SpatialModel
from .simulate import SimOutput

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineParams:
    cell_size: float = 1.0
    walks_per_node: int = 10
    walk_length: int = 40
    dim: int = 20
    window: int = 5
    negatives: int = 5
    epochs: int = 1
    n_personalities: int = 10
    n_splits: int = 30
    test_fraction: float = 0.03
    forest: ForestParams = field(default_factory=ForestParams)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Artifacts:
    cells: list[Cell]
    graph: AttributedGraph
    locator: CellLocator
    personalities: dict[str, int]
    vote_cells: list[str]
    records: list[FeedbackRecord]
    emb: EmbeddingMatrix


def stage_seeds(seed: int) -> dict[str, int]:
    names = ("locator", "personality", "walks", "skipgram", "splits", "forest")
    return dict(zip(names, (int(s) for s in derive_seeds(seed, len(names), stream=41))))


def vote_events(model: SpatialModel, votes) -> list[LocatedEvent]:
    """Votes in the local metric frame, on the level their floor number names."""
    floor_level = {lv.number: lv.id for lv in model.levels}
    out = []
    for v in votes:
        x, y = model.transform.global_to_local(v.lat, v.lon)
        out.append(LocatedEvent(v.user_id, v.timestamp, x, y, floor_level.get(v.floor, f"?{v.floor}")))
    return out


def snap_events(locator: CellLocator, events: list[LocatedEvent]) -> list[str]:
    """Nearest cell per event, batched per level."""
    out: list[str] = [""] * len(events)
    by_level: dict[str, list[int]] = {}
    for i, ev in enumerate(events):
        by_level.setdefault(ev.level_id, []).append(i)
    for lv, idx in by_level.items():
        for i, c in zip(idx, locator.nearest_many([(events[i].x, events[i].y) for i in idx], lv)):
            out[i] = c
    return out


def run_pipeline(model: SpatialModel, sim: SimOutput, params: PipelineParams = PipelineParams(),
                 seed: int = 0, cells: list[Cell] | None = None) -> Artifacts:
    seeds = stage_seeds(seed)
    cells = cells if cells is not None else discretize(model, params.cell_size)
    base = build_graph(model, cells)
    locator = CellLocator(cells, seed=seeds["locator"])
    events = vote_events(model, sim.votes)
    vote_cells = snap_events(locator, events)
    k = min(params.n_personalities, len(sim.onboarding))
    personalities = cluster_personalities(sim.onboarding, k, seeds["personality"])
    graph = link_feedback(base, events, locator, personalities)
    corpus = random_walks(graph, params.walks_per_node, params.walk_length, seeds["walks"])
    emb = train_skipgram(corpus, params.dim, params.window, params.negatives, params.epochs,
                         seed=seeds["skipgram"])
    records = [FeedbackRecord(v.user_id, v.timestamp, c, v.label, v.heart_rate, v.near_body_temp)
               for v, c in zip(sim.votes, vote_cells)]
    return Artifacts(cells, graph, locator, personalities, vote_cells, records, emb)
