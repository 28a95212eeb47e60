"""The compiled kernels and the pure-Python twin must agree bit for bit."""

import numpy as np
import pytest

from comfortgraph import _backend
from comfortgraph.classifier import ForestParams, train_forest
from comfortgraph.classifier.forest import predict_proba
from comfortgraph.embedding import random_walks, train_skipgram
from comfortgraph.graph import build_graph, discretize, knn_build, knn_query_many
from comfortgraph.harness.scene import build_model

from conftest import small_scene_config

py = _backend.load("python")
try:
    cy = _backend.load("compiled")
except ImportError:  # pragma: no cover - only without a built extension
    cy = None

needs_compiled = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def test_backend_names():
    assert py.BACKEND == "python"
    if cy is not None:
        assert cy.BACKEND == "compiled"


@pytest.fixture(scope="module")
def graph():
    m = build_model(small_scene_config())
    return build_graph(m, discretize(m))


@needs_compiled
def test_hnsw_identical(rng):
    pts = rng.random((600, 2))
    a, b = knn_build(pts, seed=4, backend=cy), knn_build(pts, seed=4, backend=py)
    assert np.array_equal(a.links, b.links) and np.array_equal(a.counts, b.counts)
    assert (a.entry, a.max_level) == (b.entry, b.max_level)
    q = rng.random((40, 2))
    (pa, da), (pb, db) = knn_query_many(a, q, 7, backend=cy), knn_query_many(b, q, 7, backend=py)
    assert np.array_equal(pa, pb) and np.array_equal(da, db)


@needs_compiled
def test_walks_and_skipgram_identical(graph):
    wa = random_walks(graph, 2, 15, seed=9, backend=cy)
    wb = random_walks(graph, 2, 15, seed=9, backend=py)
    assert np.array_equal(wa.array, wb.array)
    ea = train_skipgram(wa, dim=8, epochs=1, seed=2, backend=cy)
    eb = train_skipgram(wb, dim=8, epochs=1, seed=2, backend=py)
    assert np.array_equal(ea.vectors, eb.vectors)
    assert ea.final_loss == eb.final_loss


@needs_compiled
def test_forest_identical(rng):
    X = rng.normal(size=(300, 10))
    X[:, 3] = 1.0  # a constant column exercises the skip rule
    y = ((X[:, 0] > 0).astype(int) + (X[:, 1] > 0.8)).astype(np.int32)
    fa = train_forest(X, y, ForestParams(n_trees=8), seed=5, backend=cy)
    fb = train_forest(X, y, ForestParams(n_trees=8), seed=5, backend=py)
    for ta, tb in zip(fa.trees, fb.trees):
        for name in ("feature", "threshold", "left", "right", "counts"):
            assert np.array_equal(getattr(ta, name), getattr(tb, name)), name
    Xt = rng.normal(size=(100, 10))
    assert np.array_equal(predict_proba(fa, Xt, backend=cy), predict_proba(fa, Xt, backend=py))
