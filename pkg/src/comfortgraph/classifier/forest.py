"""Random forest of Gini CART trees grown by the kernel backend."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .._backend import kernels
from ..embedding.walks import derive_seeds
from ..errors import DimensionMismatch, ValidationError

N_CLASSES = 3


class DegenerateLabels(UserWarning):
    """Training labels hold a single class; the model predicts it constantly."""


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 200
    max_depth: int = 220
    max_features: int | None = None  # None: floor(sqrt(n_features))
    min_samples_split: int = 2
    bootstrap: bool = True
    n_jobs: int = 1


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray
    importances: np.ndarray
    depth: int

    @property
    def leaf_class(self) -> np.ndarray:
        return np.argmax(self.counts, axis=1)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray, backend=None) -> np.ndarray:
        return (backend or kernels).apply_tree(self.feature, self.threshold, self.left, self.right, X)

    def predict(self, X: np.ndarray, backend=None) -> np.ndarray:
        return self.leaf_class[self.apply(X, backend)]


@dataclass
class ForestModel:
    trees: list[Tree]
    n_features: int
    params: ForestParams
    seed: int
    max_features: int
    constant: int | None = None
    classes: tuple[int, ...] = tuple(range(N_CLASSES))
    feature_importances: np.ndarray = field(default=None)


def _check_X(X, n_features: int) -> np.ndarray:
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if X.shape[1] != n_features:
        raise DimensionMismatch(f"expected {n_features} features, got {X.shape[1]}")
    if not np.isfinite(X).all():
        raise ValidationError("feature values must be finite")
    return X


def train_forest(X, y=None, params: ForestParams = ForestParams(), seed: int = 0, backend=None) -> ForestModel:
    """Grow ``params.n_trees`` trees, each on its own bootstrap and seed.

    ``X`` may be a LabeledDataset, in which case ``y`` is taken from it.
    Tree t draws everything from seed stream t, so training order and
    ``n_jobs`` do not change the model.
    """
    if y is None:
        X, y = X.X, X.y
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int32)
    if X.ndim != 2 or len(X) != len(y) or len(X) == 0:
        raise ValidationError("X must be (n, f) with one label per row")
    if not np.isfinite(X).all():
        raise ValidationError("feature values must be finite")
    if y.min() < 0 or y.max() >= N_CLASSES:
        raise ValidationError("labels must be class indices 0..2")
    n, f = X.shape
    mtry = params.max_features or max(1, int(math.floor(math.sqrt(f))))
    if len(np.unique(y)) < 2:
        warnings.warn("single-class training labels; fitting a constant predictor", DegenerateLabels,
                      stacklevel=2)
        return ForestModel([], f, params, seed, mtry, constant=int(y[0]),
                           feature_importances=np.zeros(f))
    impl = backend or kernels
    seeds = derive_seeds(seed, params.n_trees, stream=11)

    def grow(t: int) -> Tree:
        s = int(seeds[t])
        rows = (np.random.default_rng(s).integers(0, n, n) if params.bootstrap
                else np.arange(n)).astype(np.int64)
        out = impl.grow_tree(X, y, rows, N_CLASSES, mtry, params.max_depth, params.min_samples_split, s)
        return Tree(*out)

    if params.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=params.n_jobs) as pool:
            trees = list(pool.map(grow, range(params.n_trees)))
    else:
        trees = [grow(t) for t in range(params.n_trees)]
    imp = np.zeros(f)
    for t in trees:
        s = t.importances.sum()
        if s > 0:
            imp += t.importances / s
    if imp.sum() > 0:
        imp /= imp.sum()
    return ForestModel(trees, f, params, seed, mtry, feature_importances=imp)


def tree_votes(model: ForestModel, X, backend=None) -> np.ndarray:
    """(n_trees, n) matrix of per-tree class predictions."""
    X = _check_X(X, model.n_features)
    return np.array([t.predict(X, backend) for t in model.trees]).reshape(len(model.trees), len(X))


def predict_proba(model: ForestModel, X, backend=None) -> np.ndarray:
    X = _check_X(X, model.n_features)
    if model.constant is not None:
        out = np.zeros((len(X), N_CLASSES))
        out[:, model.constant] = 1.0
        return out
    votes = tree_votes(model, X, backend)
    counts = np.zeros((len(X), N_CLASSES))
    for c in range(N_CLASSES):
        counts[:, c] = (votes == c).sum(axis=0)
    return counts / len(model.trees)


def predict_many(model: ForestModel, X, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Plurality labels (ties to the lower class index) and vote fractions."""
    proba = predict_proba(model, X, backend)
    return np.argmax(proba, axis=1), proba


def predict(model: ForestModel, x) -> tuple[int, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("predict expects a single feature vector")
    labels, proba = predict_many(model, x[None, :])
    return int(labels[0]), proba[0]
