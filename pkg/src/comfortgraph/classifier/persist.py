"""Forest persistence: a JSON header plus one structured .npy node table.

Both files are byte-deterministic for a given model (no archive timestamps).
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from .forest import N_CLASSES, ForestModel, ForestParams, Tree

NODE_DTYPE = np.dtype([("tree", "<i4"), ("feature", "<i4"), ("threshold", "<f8"), ("left", "<i4"),
                       ("right", "<i4"), ("counts", "<i8", (N_CLASSES,))])
HEADER = "forest.json"
NODES = "forest_nodes.npy"


def save_forest(model: ForestModel, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    sizes = [t.n_nodes for t in model.trees]
    table = np.zeros(sum(sizes), dtype=NODE_DTYPE)
    at = 0
    for i, t in enumerate(model.trees):
        sl = slice(at, at + t.n_nodes)
        table["tree"][sl] = i
        table["feature"][sl] = t.feature
        table["threshold"][sl] = t.threshold
        table["left"][sl] = t.left
        table["right"][sl] = t.right
        table["counts"][sl] = t.counts
        at += t.n_nodes
    header = {
        "format": 1,
        "n_features": model.n_features,
        "seed": model.seed,
        "max_features": model.max_features,
        "constant": model.constant,
        "params": asdict(model.params),
        "tree_sizes": sizes,
        "tree_depths": [t.depth for t in model.trees],
        "tree_importances": [t.importances.tolist() for t in model.trees],
        "feature_importances": model.feature_importances.tolist(),
    }
    (d / HEADER).write_text(json.dumps(header, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    np.save(d / NODES, table, allow_pickle=False)


def load_forest(directory) -> ForestModel:
    d = Path(directory)
    header = json.loads((d / HEADER).read_text(encoding="utf-8"))
    if header.get("format") != 1:
        raise ValidationError(f"{d / HEADER}: unsupported forest format")
    table = np.load(d / NODES, allow_pickle=False)
    if table.dtype != NODE_DTYPE or len(table) != sum(header["tree_sizes"]):
        raise ValidationError(f"{d / NODES}: node table does not match header")
    trees, at = [], 0
    for size, depth, imp in zip(header["tree_sizes"], header["tree_depths"], header["tree_importances"]):
        rows = table[at:at + size]
        trees.append(Tree(np.ascontiguousarray(rows["feature"]), np.ascontiguousarray(rows["threshold"]),
                          np.ascontiguousarray(rows["left"]), np.ascontiguousarray(rows["right"]),
                          np.ascontiguousarray(rows["counts"]), np.asarray(imp, dtype=float), depth))
        at += size
    return ForestModel(trees, header["n_features"], ForestParams(**header["params"]), header["seed"],
                       header["max_features"], constant=header["constant"],
                       feature_importances=np.asarray(header["feature_importances"], dtype=float))
