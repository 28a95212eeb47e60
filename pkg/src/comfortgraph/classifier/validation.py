"""Shuffled hold-out split plans and the repeated train/test protocol."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..embedding.walks import derive_seeds
from ..errors import ValidationError
from .dataset import LabeledDataset
from .forest import N_CLASSES, ForestParams, predict_many, train_forest


@dataclass(frozen=True)
class SplitPlan:
    n: int
    test_fraction: float
    seed: int
    splits: tuple[tuple[np.ndarray, np.ndarray], ...]  # (train, test) index arrays, sorted

    def __len__(self) -> int:
        return len(self.splits)

    @property
    def test_size(self) -> int:
        return test_size(self.n, self.test_fraction)


def test_size(n: int, fraction: float) -> int:
    """``round(fraction * n)`` with halves rounded up, at least 1."""
    return max(1, int(math.floor(fraction * n + 0.5)))


def make_split_plan(n: int, n_splits: int = 30, test_fraction: float = 0.03, seed: int = 0) -> SplitPlan:
    """``n_splits`` independent shuffles, each holding out ``test_size`` rows."""
    if n < 2:
        raise ValidationError("need at least 2 rows to split")
    if not 0 < test_fraction < 1:
        raise ValidationError("test_fraction must lie in (0, 1)")
    m = test_size(n, test_fraction)
    if m >= n:
        raise ValidationError("test set would leave no training rows")
    rng = np.random.default_rng(seed)
    splits = []
    for _ in range(n_splits):
        perm = rng.permutation(n)
        splits.append((np.sort(perm[m:]), np.sort(perm[:m])))
    return SplitPlan(n, test_fraction, seed, tuple(splits))


def cross_validate(ds: LabeledDataset, plan: SplitPlan, params: ForestParams = ForestParams(),
                   seed: int = 0) -> dict:
    """Train one forest per split; accuracy per split, means and pooled confusion."""
    if plan.n != len(ds):
        raise ValidationError(f"split plan is for {plan.n} rows, dataset has {len(ds)}")
    seeds = derive_seeds(seed, len(plan), stream=13)
    per_split = []
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    importances = np.zeros(ds.X.shape[1])
    for i, (train, test) in enumerate(plan.splits):
        model = train_forest(ds.X[train], ds.y[train], params, int(seeds[i]))
        pred_test, _ = predict_many(model, ds.X[test])
        pred_train, _ = predict_many(model, ds.X[train])
        np.add.at(confusion, (ds.y[test], pred_test), 1)
        importances += model.feature_importances
        per_split.append({"split": i, "n_train": int(len(train)), "n_test": int(len(test)),
                          "train_accuracy": float(np.mean(pred_train == ds.y[train])),
                          "test_accuracy": float(np.mean(pred_test == ds.y[test]))})
    test_acc = np.array([s["test_accuracy"] for s in per_split])
    train_acc = np.array([s["train_accuracy"] for s in per_split])
    return {
        "per_split": per_split,
        "mean_train_accuracy": float(train_acc.mean()),
        "mean_test_accuracy": float(test_acc.mean()),
        "sd_test_accuracy": float(test_acc.std(ddof=1)) if len(test_acc) > 1 else 0.0,
        "confusion_matrix": confusion.tolist(),
        "feature_names": list(ds.feature_names),
        "feature_importances": (importances / len(plan)).tolist(),
    }
