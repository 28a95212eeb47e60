"""Feature assembly: cell embedding plus physiology per vote."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..embedding.skipgram import EmbeddingMatrix
from ..errors import MissingEmbedding, ValidationError
from .records import FeedbackRecord

PHYSIOLOGY = ("heart_rate", "near_body_temp")


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    groups: np.ndarray
    personality: np.ndarray
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise ValidationError("X and y disagree in length")
        if not np.isfinite(self.X).all():
            raise ValidationError("dataset contains missing or non-finite values")

    def __len__(self) -> int:
        return len(self.y)

    def subset(self, idx) -> "LabeledDataset":
        return LabeledDataset(self.X[idx], self.y[idx], self.groups[idx], self.personality[idx],
                              list(self.feature_names))


def assemble_features(records: Sequence[FeedbackRecord], emb: EmbeddingMatrix,
                      personalities: dict[str, int] | None = None) -> LabeledDataset:
    """Rows ``embedding[cell] ++ (heart_rate, near_body_temp)`` in record order."""
    for r in records:
        if r.cell_id not in emb:
            raise MissingEmbedding(f"no embedding for cell {r.cell_id!r}")
    dim = emb.dim
    if records:
        X = np.hstack([emb.rows([r.cell_id for r in records]),
                       np.array([[r.heart_rate, r.near_body_temp] for r in records], dtype=float)])
    else:
        X = np.zeros((0, dim + 2))
    personalities = personalities or {}
    return LabeledDataset(
        X=X,
        y=np.array([int(r.label) for r in records], dtype=np.int32),
        groups=np.array([r.user_id for r in records], dtype=object),
        personality=np.array([personalities.get(r.user_id, -1) for r in records], dtype=np.int64),
        feature_names=[f"emb_{i + 1}" for i in range(dim)] + list(PHYSIOLOGY),
    )
