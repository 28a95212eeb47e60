"""Property tests for the invariants that must hold for any input."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from comfortgraph.classifier import ForestParams, make_split_plan, train_forest
from comfortgraph.classifier.forest import predict_proba
from comfortgraph.embedding import cosine_similarity, random_walks
from comfortgraph.errors import ZeroVector
from comfortgraph.graph import AttributedGraph, Relation
from comfortgraph.localization import LocationFix, preprocess_stream
from comfortgraph.spatial import (CoordinateTransform, ObjectKind, SpatialObject, aoi_region, global_to_local,
                                  local_to_global)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vec = st.integers(2, 12).flatmap(lambda n: st.tuples(arrays(float, n, elements=finite),
                                                     arrays(float, n, elements=finite)))


@given(vec)
def test_cosine_symmetric_and_bounded(ab):
    a, b = ab
    assume(np.linalg.norm(a) > 1e-6 and np.linalg.norm(b) > 1e-6)
    s = cosine_similarity(a, b)
    assert s == pytest.approx(cosine_similarity(b, a), abs=1e-12)
    assert -1.0 - 1e-12 <= s <= 1.0 + 1e-12


@given(vec, st.floats(1e-3, 1e3))
def test_cosine_scale_invariant(ab, c):
    a, b = ab
    assume(np.linalg.norm(a) > 1e-3 and np.linalg.norm(b) > 1e-3)
    assert cosine_similarity(c * a, b) == pytest.approx(cosine_similarity(a, b), abs=1e-9)


def test_cosine_zero_vector():
    with pytest.raises(ZeroVector):
        cosine_similarity([0.0, 0.0], [1.0, 0.0])


@given(st.integers(2, 3000), st.integers(1, 10), st.floats(0.01, 0.5), st.integers(0, 2 ** 32))
def test_split_plan_disjoint_and_deterministic(n, k, frac, seed):
    assume(math.floor(frac * n + 0.5) < n)
    plan = make_split_plan(n, k, frac, seed)
    again = make_split_plan(n, k, frac, seed)
    for (tr, te), (tr2, te2) in zip(plan.splits, again.splits):
        assert np.array_equal(tr, tr2) and np.array_equal(te, te2)
        assert len(te) == plan.test_size
        assert len(np.intersect1d(tr, te)) == 0 and len(tr) + len(te) == n
        assert np.array_equal(np.union1d(tr, te), np.arange(n))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32), st.floats(0.1, 10), st.floats(-5, 5))
def test_forest_invariant_to_monotone_transform(seed, scale, shift):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(120, 4))
    y = (X[:, 0] + 0.3 * rng.normal(size=120) > 0).astype(np.int32) + (X[:, 2] > 1)
    Xt = rng.normal(size=(40, 4))
    params = ForestParams(n_trees=5)
    a = train_forest(X, y, params, seed=1)
    b = train_forest(scale * X + shift, y, params, seed=1)
    # thresholds are observed values and rounding is monotone, so the split order survives
    assert np.array_equal(predict_proba(a, Xt), predict_proba(b, scale * Xt + shift))


pts = st.tuples(st.floats(-20, 20), st.floats(-20, 20))


@given(pts, st.floats(0.1, 5), st.floats(0.0, 5))
def test_fan_region_grows_with_radius(p, r, extra):
    small = aoi_region(SpatialObject("f", ObjectKind.CeilingFan, "S", (0.0, 0.0, 3.0), aoi_params={"radius": r}))
    big = aoi_region(SpatialObject("f", ObjectKind.CeilingFan, "S", (0.0, 0.0, 3.0),
                                   aoi_params={"radius": r + extra}))
    if small.contains(*p):
        assert big.contains(*p)


@given(pts, st.floats(0.1, 5), st.floats(0.0, 5))
def test_window_band_grows_with_depth(p, d, extra):
    def win(depth):
        return aoi_region(SpatialObject("w", ObjectKind.Window, "S", (0.0, 0.0, 1.0),
                                        aoi_params={"start": [-3, 0], "end": [3, 0], "side": 1, "depth": depth}))
    if win(d).contains(*p):
        assert win(d + extra).contains(*p)


@given(st.floats(-5000, 5000), st.floats(-5000, 5000), st.floats(-60, 60), st.floats(-170, 170),
       st.floats(0, 360))
def test_transform_roundtrip(x, y, lat0, lon0, rot):
    t = CoordinateTransform(lat0, lon0, rot)
    back = global_to_local(*local_to_global((x, y), t), t)
    assert math.dist(back, (x, y)) < 1e-6


fix_stream = st.lists(st.tuples(st.sampled_from("ab"), st.integers(0, 2000), st.integers(-30, 30),
                                st.floats(0.25, 8.0)), max_size=80)


@given(fix_stream)
def test_preprocess_idempotent_and_subset(rows):
    fixes = [LocationFix(u, 1.3 + dy * 1e-5, 103.77, 12.0, 3, float(t), acc) for u, t, dy, acc in rows]
    once = preprocess_stream(fixes)
    assert preprocess_stream(once) == once
    assert all(f in fixes for f in once)


@st.composite
def graphs(draw):
    n = draw(st.integers(2, 15))
    g = AttributedGraph()
    for i in range(n):
        g.add_node(f"n{i}", "Cell")
    for a, b in draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40)):
        if a != b:
            g.add_edge(f"n{a}", f"n{b}", Relation.ADJACENT)
    return g


@settings(suppress_health_check=[HealthCheck.too_slow])
@given(graphs(), st.integers(0, 1000))
def test_walks_follow_edges(g, seed):
    corpus = random_walks(g, 2, 10, seed)
    for walk in corpus.array:
        steps = [corpus.nodes[i] for i in walk if i >= 0]
        for u, v in zip(steps, steps[1:]):
            assert v in g.neighbors(u)
