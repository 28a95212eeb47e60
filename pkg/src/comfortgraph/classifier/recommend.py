"""Rank cells by predicted probability of a no-preference vote."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..embedding.skipgram import EmbeddingMatrix
from ..errors import ValidationError
from ..graph.cells import Cell
from .forest import ForestModel, predict_proba
from .records import Preference


def recommend_cells(model: ForestModel, emb: EmbeddingMatrix, cells: Sequence[Cell | str], heart_rate: float,
                    near_body_temp: float, top_n: int = 10) -> list[tuple[str, float]]:
    """Top ``top_n`` (cell id, P(no preference)), best first, ties by id."""
    if top_n < 1:
        raise ValidationError("top_n must be >= 1")
    ids = [c.id if isinstance(c, Cell) else c for c in cells]
    X = np.hstack([emb.rows(ids), np.tile([heart_rate, near_body_temp], (len(ids), 1))])
    scores = predict_proba(model, X)[:, Preference.NoPreference]
    ranked = sorted(zip(ids, scores.tolist()), key=lambda t: (-t[1], t[0]))
    return ranked[:top_n]
