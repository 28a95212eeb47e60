"""Assemble the attributed building graph from a spatial model and its cells."""

from __future__ import annotations

import numpy as np

from ..spatial.aoi import aoi_region
from ..spatial.model import NODE_LABELS, SpatialModel
from .cells import Cell
from .model import AttributedGraph, Relation

MODE_LABEL = "VentilationMode"
OBJECT_ATTRIBUTE_LABEL = "ObjectAttribute"


def mode_node(mode: str) -> str:
    return f"ATTR:{mode}"


def object_attribute_node(label: str, key: str, value: str) -> str:
    return f"ATTR:{label}:{key}={value}"


def build_graph(model: SpatialModel, cells: list[Cell], cell_adjacency: bool = True) -> AttributedGraph:
    """Levels, spaces, objects, cells and attribute nodes with their typed edges.

    ``cell_adjacency=False`` drops the lattice ADJACENT edges (ablation).
    """
    g = AttributedGraph()
    for lv in model.levels:
        g.add_node(lv.id, "Level", name=lv.name, number=lv.number)
    for sp in model.spaces:
        g.add_node(sp.id, "Space", name=sp.name, mode=sp.ventilation_mode.value)
        g.add_edge(sp.id, sp.level_id, Relation.ON_LEVEL)
        attr = mode_node(sp.ventilation_mode.value)
        g.add_node(attr, MODE_LABEL, mode=sp.ventilation_mode.value)
        g.add_edge(sp.id, attr, Relation.HAS_ATTRIBUTE)
    for ob in model.objects:
        label = NODE_LABELS[ob.kind]
        g.add_node(ob.id, label, kind=ob.kind.value, x=ob.position[0], y=ob.position[1])
        g.add_edge(ob.id, ob.space_id, Relation.CONTAINED_IN)
        for key, value in sorted(ob.attributes.items()):
            attr = object_attribute_node(label, key, value)
            g.add_node(attr, OBJECT_ATTRIBUTE_LABEL, key=key, value=value)
            g.add_edge(ob.id, attr, Relation.HAS_ATTRIBUTE)
    for c in cells:
        g.add_node(c.id, "Cell", x=c.center[0], y=c.center[1], space=c.space_id, level=c.level_id)
        g.add_edge(c.id, c.space_id, Relation.CONTAINED_IN)
    if cell_adjacency:
        for (a, b) in lattice_pairs(cells):
            g.add_edge(a, b, Relation.ADJACENT)
    for src, dst in aoi_pairs(model, cells):
        g.add_edge(src, dst, Relation.IN_AOI_OF)
    return g


def lattice_pairs(cells: list[Cell]) -> list[tuple[str, str]]:
    """4-neighbourhood pairs within each space, smaller id first."""
    at = {(c.space_id, c.row, c.col): c.id for c in cells}
    pairs = []
    for c in cells:
        for dr, dc in ((0, 1), (1, 0)):
            other = at.get((c.space_id, c.row + dr, c.col + dc))
            if other is not None:
                pairs.append((min(c.id, other), max(c.id, other)))
    return pairs


def aoi_pairs(model: SpatialModel, cells: list[Cell]) -> list[tuple[str, str]]:
    """(cell id, object id) for every cell centre inside an object's AoI on the same level."""
    by_level: dict[str, list[Cell]] = {}
    for c in cells:
        by_level.setdefault(c.level_id, []).append(c)
    centers = {lv: np.array([c.center for c in cs]) for lv, cs in by_level.items()}
    out = []
    for ob in model.objects:
        region = aoi_region(ob, model)
        if region is None:
            continue
        lv = model.space(ob.space_id).level_id
        if lv not in centers:
            continue
        hit = region.contains_many(centers[lv])
        out.extend((by_level[lv][i].id, ob.id) for i in np.flatnonzero(hit))
    return out
