import json
import math
import warnings

import numpy as np
import pytest

from comfortgraph.errors import EmptyIndex, NoCellOnLevel, ValidationError
from comfortgraph.graph import (AttributedGraph, CellLocator, EmptySpace, LocatedEvent, Relation, build_graph,
                                discretize, exact_knn, knn_build, knn_query, link_feedback)
from comfortgraph.graph.build import mode_node
from comfortgraph.graph.io import read_adjacency, read_cells, write_adjacency, write_cells, write_census
from comfortgraph.harness.config import default_config
from comfortgraph.harness.scene import build_model
from comfortgraph.spatial import aoi_region, parse_floorplan
from comfortgraph.spatial.geometry import point_in_polygon

from conftest import small_scene_config, square_doc


def _model(doc):
    return parse_floorplan(json.dumps(doc))


# ---- discretize

def test_square_gives_100_cells(square_model):
    cells = discretize(square_model, 1.0)
    assert len(cells) == 100
    assert cells[0].id == "C1010001" and cells[-1].id == "C1010100"
    assert cells[0].center == (0.5, 0.5) and cells[1].center == (1.5, 0.5)  # row-major


def test_l_shape_matches_brute_force():
    doc = square_doc()
    L = [[0, 0], [7.3, 0], [7.3, 3.1], [3.2, 3.1], [3.2, 8.6], [0, 8.6]]
    doc["spaces"][0]["footprint"] = L
    for size in (0.5, 1.0, 0.7):
        cells = discretize(_model(doc), size)
        expected = sum(point_in_polygon((i + 0.5) * size, (j + 0.5) * size, L)
                       for i in range(int(7.3 / size)) for j in range(int(8.6 / size)))
        assert len(cells) == expected
        assert all(point_in_polygon(*c.center, L) for c in cells)


def test_tiny_space_warns():
    doc = square_doc(size=0.4)
    with pytest.warns(EmptySpace):
        assert discretize(_model(doc), 1.0) == []


def test_bad_cell_size(square_model):
    with pytest.raises(ValidationError):
        discretize(square_model, 0.0)


def test_default_scene_cell_count_order():
    cells = discretize(build_model(default_config()), 1.0)
    assert 4000 <= len(cells) <= 5500  # same order as the case-study floor
    assert len({c.id for c in cells}) == len(cells)


# ---- build_graph

def test_fan_at_lattice_point_hits_one_cell():
    fan = {"id": "F1", "kind": "CeilingFan", "space_id": "S1", "position": [4.5, 4.5, 3.0],
           "aoi_params": {"radius": 0.9}}
    m = _model(square_doc(objects=[fan]))
    g = build_graph(m, discretize(m, 1.0))
    hits = [e for e in g.canonical_edges() if e[1] is Relation.IN_AOI_OF]
    assert len(hits) == 1 and set(hits[0]) - {Relation.IN_AOI_OF} == {"C1010045", "F1"}


def test_nv_attribute_node_degree():
    g = build_graph(build_model(default_config()), [])
    nv = mode_node("NV")
    assert g.degree(nv) == 2
    assert g.degree(mode_node("HC")) == 3
    census = g.census()
    assert census["Space"] == 5 and census["VentilationMode"] == 2


def test_edges_respect_invariants():
    m = build_model(small_scene_config())
    cells = discretize(m, 1.0)
    g = build_graph(m, cells)
    where = {c.id: c for c in cells}
    edges = g.canonical_edges()
    assert len(edges) == len(set(edges))
    for a, rel, b in edges:
        assert a != b
        assert b in g.neighbors(a) and a in g.neighbors(b)
        if rel is Relation.ADJACENT:
            ca, cb = where[a], where[b]
            assert math.dist(ca.center, cb.center) == pytest.approx(1.0) and ca.space_id == cb.space_id


def test_aoi_edges_match_brute_force():
    m = build_model(small_scene_config(seed=3))
    cells = discretize(m, 0.5)
    g = build_graph(m, cells)
    got = {(a, b) if a.startswith("C") else (b, a) for a, rel, b in g.canonical_edges() if rel is Relation.IN_AOI_OF}
    want = set()
    for c in cells:
        for ob in m.objects:
            r = aoi_region(ob, m)
            if r is not None and r.contains(*c.center):
                want.add((c.id, ob.id))
    assert got == want and want


def test_build_is_deterministic_and_ablation():
    m = build_model(small_scene_config())
    cells = discretize(m)
    a, b = build_graph(m, cells), build_graph(m, list(cells))
    assert a.canonical_edges() == b.canonical_edges()
    plain = build_graph(m, cells, cell_adjacency=False)
    assert not any(rel is Relation.ADJACENT for _, rel, _ in plain.canonical_edges())


def test_graph_rejects_self_loops_and_duplicates():
    g = AttributedGraph()
    g.add_node("a", "Cell")
    g.add_node("b", "Cell")
    assert g.add_edge("a", "b", Relation.ADJACENT)
    assert not g.add_edge("b", "a", Relation.ADJACENT)
    with pytest.raises(ValidationError):
        g.add_edge("a", "a", Relation.ADJACENT)


def test_adjacency_and_cells_roundtrip(tmp_path):
    m = build_model(small_scene_config())
    cells = discretize(m)
    g = build_graph(m, cells)
    write_adjacency(g, tmp_path / "adj.tsv")
    back = read_adjacency(tmp_path / "adj.tsv")
    assert back.canonical_edges() == g.canonical_edges()
    write_cells(cells, tmp_path / "cells.csv")
    assert read_cells(tmp_path / "cells.csv") == cells
    write_census(g, tmp_path / "census.csv")
    lines = (tmp_path / "census.csv").read_text().splitlines()
    assert lines[0] == "label,count" and f"Cell,{len(cells)}" in lines


def test_adjacency_bad_relation_is_positioned(tmp_path):
    p = tmp_path / "adj.tsv"
    p.write_text("a\tADJACENT\tb\nb\tNEAR\tc\n")
    with pytest.raises(ValidationError, match=":2"):
        read_adjacency(p)


# ---- HNSW

def test_single_point_index():
    idx = knn_build([[1.0, 2.0]], ["only"])
    assert knn_query(idx, (4.0, 6.0), k=3) == [("only", 5.0)]


def test_empty_index():
    with pytest.raises(EmptyIndex):
        knn_query(knn_build(np.zeros((0, 2))), (0, 0))


def test_query_results_sorted_and_exact_distances(rng):
    pts = rng.random((800, 2))
    idx = knn_build(pts)
    for q in rng.random((20, 2)):
        res = knn_query(idx, q, k=10)
        d = [r[1] for r in res]
        assert d == sorted(d) and len(res) == 10
        for pid, dist in res:
            assert dist == pytest.approx(math.dist(pts[int(pid)], q), abs=1e-12)


def test_indexed_point_is_its_own_nearest(rng):
    pts = rng.random((500, 2))
    idx = knn_build(pts)
    for i in range(0, 500, 25):
        pid, d = knn_query(idx, pts[i], 1)[0]
        assert pid == str(i) and d == 0.0


@pytest.mark.parametrize("k", [1, 5, 10])
def test_recall_against_linear_scan(rng, k):
    pts = rng.random((2000, 2))
    idx = knn_build(pts, seed=1)
    rec = []
    for q in rng.random((50, 2)):
        want = {p for p, _ in exact_knn(pts, q, k)}
        got = {int(p) for p, _ in knn_query(idx, q, k)}
        rec.append(len(want & got) / k)
    assert np.mean(rec) >= 0.95


# ---- linking

def _locator(cells):
    return CellLocator(cells, seed=0)


def test_vote_at_center_and_tie_break(square_model):
    cells = discretize(square_model)
    loc = _locator(cells)
    assert loc.nearest(3.5, 2.5, "L1") == "C1010024"
    # halfway between C1010001 (0.5, 0.5) and C1010002 (1.5, 0.5)
    assert loc.nearest(1.0, 0.5, "L1") == "C1010001"
    # corner shared by four cells
    assert loc.nearest(1.0, 1.0, "L1") == "C1010001"
    with pytest.raises(NoCellOnLevel):
        loc.nearest(1.0, 1.0, "L2")


def test_link_feedback_nodes(square_model):
    cells = discretize(square_model)
    g = build_graph(square_model, cells)
    users = [f"U{i:02d}" for i in range(20)]
    events = [LocatedEvent(u, 1000.0 + i, 0.5 + i % 10, 0.5, "L1") for i, u in enumerate(users)]
    pers = {u: i % 10 for i, u in enumerate(users)}
    out = link_feedback(g, events, _locator(cells), pers)
    census = out.census()
    assert census["ThermalComfortPersonality"] == 10
    assert census["Occupant"] == 20 and census["Feedback"] == 20
    assert len(g.nodes_with_label("Feedback")) == 0  # input untouched
    fb = out.nodes_with_label("Feedback")[0]
    assert out.neighbors(fb)[0].startswith("C101")
