"""Square-lattice discretisation of space footprints."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..spatial.geometry import points_in_polygon
from ..spatial.model import SpatialModel

DEFAULT_CELL_SIZE = 1.0


class EmptySpace(UserWarning):
    """A footprint too small to hold a single cell centre."""


@dataclass(frozen=True)
class Cell:
    id: str
    center: tuple[float, float]
    space_id: str
    level_id: str
    row: int
    col: int


def cell_id(level_number: int, space_index: int, index: int) -> str:
    return f"C{level_number}{space_index:02d}{index:04d}"


def discretize(model: SpatialModel, cell_size: float = DEFAULT_CELL_SIZE) -> list[Cell]:
    """Lattice cells per space, anchored at each footprint's bounding-box corner.

    A cell exists when its centre lies in (or on) the footprint. Ids run
    row-major (rows by y, then x) within each space; spaces are numbered by
    their order on the level.
    """
    if not cell_size > 0:
        raise ValidationError(f"cell_size must be positive, got {cell_size}")
    cells: list[Cell] = []
    for level in model.levels:
        for s_idx, space in enumerate(model.spaces_on(level.id), start=1):
            pts = np.asarray(space.footprint)
            x0, y0 = pts.min(axis=0)
            x1, y1 = pts.max(axis=0)
            nx = max(int(math.floor((x1 - x0) / cell_size + 1e-9)), 0)
            ny = max(int(math.floor((y1 - y0) / cell_size + 1e-9)), 0)
            cols, rows = np.meshgrid(np.arange(nx), np.arange(ny))
            rows, cols = rows.ravel(), cols.ravel()
            centers = np.column_stack([x0 + (cols + 0.5) * cell_size, y0 + (rows + 0.5) * cell_size])
            keep = points_in_polygon(centers, space.footprint) if len(centers) else np.zeros(0, bool)
            if not keep.any():
                warnings.warn(f"space {space.id!r} holds no cell of size {cell_size}", EmptySpace, stacklevel=2)
                continue
            for k, i in enumerate(np.flatnonzero(keep), start=1):
                cells.append(Cell(cell_id(level.number, s_idx, k), (float(centers[i, 0]), float(centers[i, 1])),
                                  space.id, level.id, int(rows[i]), int(cols[i])))
    return cells
