"""Synthetic scenes and their ground-truth comfort fields."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..graph.build import build_graph
from ..graph.cells import Cell, discretize
from ..spatial.aoi import aoi_region
from ..spatial.model import (CoordinateTransform, Level, ObjectKind, Space, SpatialModel, SpatialObject,
                             VentilationMode)
from .config import SceneConfig, SpaceSpec
from .population import ARCHETYPES

log = logging.getLogger(__name__)

LEVEL_HEIGHT = 4.0
SETPOINTS = {VentilationMode.HC: 27.0, VentilationMode.AC: 24.0, VentilationMode.MV: None, VentilationMode.NV: None}

# label distributions over (cooler, no preference, warmer)
MODE_BASE = {
    VentilationMode.NV: (0.70, 0.25, 0.05),
    VentilationMode.HC: (0.60, 0.30, 0.10),
    VentilationMode.AC: (0.20, 0.60, 0.20),
    VentilationMode.MV: (0.55, 0.35, 0.10),
}
# fully inside an AoI: fans cool, diffusers over-cool, window bands heat
AOI_TARGET = {
    ObjectKind.CeilingFan: (0.05, 0.80, 0.15),
    ObjectKind.VavDiffuser: (0.05, 0.15, 0.80),
    ObjectKind.Window: (0.85, 0.10, 0.05),
}
AOI_CLASS = {ObjectKind.CeilingFan: "fan", ObjectKind.VavDiffuser: "diffuser", ObjectKind.Window: "window"}


@dataclass
class ComfortField:
    """Per-cell vote distributions.

    ``probabilities(s)`` is ``base + s * (target - base)``: the personality
    sensitivity ``s`` only scales the AoI deviation, so cells outside every
    AoI look the same to every occupant.
    """

    cells: list[Cell]
    base: np.ndarray
    target: np.ndarray
    aoi_class: list[str]
    composition: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.index = {c.id: i for i, c in enumerate(self.cells)}

    @property
    def cell_ids(self) -> list[str]:
        return [c.id for c in self.cells]

    def probabilities(self, sensitivity: float = 1.0) -> np.ndarray:
        p = self.base + sensitivity * (self.target - self.base)
        return p / p.sum(axis=1, keepdims=True)

    def for_personality(self, archetype: int) -> np.ndarray:
        return self.probabilities(ARCHETYPES[archetype].sensitivity)

    def cell_probabilities(self, cell_id: str, sensitivity: float = 1.0) -> np.ndarray:
        i = self.index[cell_id]
        p = self.base[i] + sensitivity * (self.target[i] - self.base[i])
        return p / p.sum()

    @property
    def in_aoi(self) -> np.ndarray:
        return np.array([c != "none" for c in self.aoi_class])


def _space_objects(cfg: SceneConfig, spec: SpaceSpec, sid: str, tag: str, x0: float,
                   rng: np.random.Generator) -> list[SpatialObject]:
    w, d = float(spec.width), float(spec.depth)
    objs: list[SpatialObject] = []

    def inside(margin: float) -> tuple[float, float]:
        m = min(margin, w / 2 - 1e-3, d / 2 - 1e-3)
        return float(x0 + rng.uniform(m, w - m)), float(rng.uniform(m, d - m))

    for k in range(spec.fans):
        x = x0 + w * (k + 0.5) / spec.fans
        y = d / 2 + float(rng.uniform(-d / 6, d / 6))
        objs.append(SpatialObject(f"FAN-{tag}-{k + 1:02d}", ObjectKind.CeilingFan, sid, (round(x, 3), round(y, 3), 3.0),
                                  {"radius": cfg.fan_radius}, {"speed": "high"}))
    for k in range(spec.diffusers):
        x, y = inside(cfg.diffuser_throw)
        direction = float(90 * rng.integers(0, 4))
        objs.append(SpatialObject(f"VAV-{tag}-{k + 1:02d}", ObjectKind.VavDiffuser, sid, (round(x, 3), round(y, 3), 3.0),
                                  {"throw": cfg.diffuser_throw, "spread": cfg.diffuser_spread,
                                   "direction": direction}, {"supply": "cold"}))
    for k in range(spec.windows):
        north = k % 2 == 0
        start = x0 + float(rng.uniform(0, w - cfg.window_length))
        yw = d if north else 0.0
        a, b = (round(start, 3), yw), (round(start + cfg.window_length, 3), yw)
        objs.append(SpatialObject(f"WIN-{tag}-{k + 1:02d}", ObjectKind.Window, sid,
                                  ((a[0] + b[0]) / 2, yw, 1.5),
                                  {"start": list(a), "end": list(b), "depth": cfg.window_depth},
                                  {"facade": "north" if north else "south"}))
    plain = ((ObjectKind.AirCond, spec.air_cond, "AC"), (ObjectKind.Desk, spec.desks, "DSK"),
             (ObjectKind.Chair, spec.chairs, "CHR"), (ObjectKind.DiningTable, spec.dining_tables, "DIN"),
             (ObjectKind.MultiTable, spec.multi_tables, "MTB"), (ObjectKind.Sofa, spec.sofas, "SOF"))
    for kind, n, short in plain:
        for k in range(n):
            x, y = inside(1.0)
            objs.append(SpatialObject(f"{short}-{tag}-{k + 1:02d}", kind, sid, (round(x, 3), round(y, 3), 0.0)))
    return objs


def _fixtures(cfg: SceneConfig, spaces: list[Space], rng: np.random.Generator) -> list[SpatialObject]:
    """Doors, walls and rails on space boundaries, dealt round-robin."""
    out = []
    kinds = ((ObjectKind.Door, cfg.doors, "DOOR"), (ObjectKind.SolidWall, cfg.solid_walls, "WALL"),
             (ObjectKind.CurtainWall, cfg.curtain_walls, "CWALL"), (ObjectKind.HandRail, cfg.handrails, "RAIL"))
    for kind, n, short in kinds:
        for k in range(n):
            sp = spaces[k % len(spaces)]
            (xa, ya), (xb, yb) = sp.footprint[0], sp.footprint[2]
            edge = int(rng.integers(0, 4))
            t = float(rng.uniform(0.1, 0.9))
            x = xa + t * (xb - xa) if edge < 2 else (xa if edge == 2 else xb)
            y = ya + t * (yb - ya) if edge >= 2 else (ya if edge == 0 else yb)
            out.append(SpatialObject(f"{short}-{k + 1:02d}", kind, sp.id, (round(x, 3), round(y, 3), 0.0)))
    return out


def build_model(cfg: SceneConfig) -> SpatialModel:
    rng = np.random.default_rng(cfg.seed)
    lv = Level(f"L{cfg.level_number}", f"Level {cfg.level_number}", cfg.level_number,
               cfg.level_number * LEVEL_HEIGHT)
    spaces, objects = [], []
    x0 = 0.0
    for i, spec in enumerate(cfg.spaces, start=1):
        mode = VentilationMode(spec.mode)
        sid = f"S{i:02d}"
        w, d = float(spec.width), float(spec.depth)
        fp = ((x0, 0.0), (x0 + w, 0.0), (x0 + w, d), (x0, d))
        spaces.append(Space(sid, spec.name, lv.id, fp, mode, SETPOINTS[mode]))
        objects.extend(_space_objects(cfg, spec, sid, f"S{i}", x0, rng))
        x0 += w
    objects.extend(_fixtures(cfg, spaces, rng))
    return SpatialModel((lv,), tuple(spaces), tuple(objects), CoordinateTransform())


def comfort_field(model: SpatialModel, cells: list[Cell]) -> ComfortField:
    """Mode baseline per cell, and the mean AoI target over objects covering it."""
    modes = {sp.id: sp.ventilation_mode for sp in model.spaces}
    base = np.array([MODE_BASE[modes[c.space_id]] for c in cells], dtype=float)
    centers = np.array([c.center for c in cells], dtype=float).reshape(-1, 2)
    tsum = np.zeros_like(base)
    hits = np.zeros(len(cells))
    kinds = [set() for _ in cells]
    level_of = {sp.id: sp.level_id for sp in model.spaces}
    cell_level = np.array([c.level_id for c in cells])
    for ob in model.objects:
        if ob.kind not in AOI_TARGET:
            continue
        region = aoi_region(ob, model)
        mask = region.contains_many(centers) & (cell_level == level_of[ob.space_id])
        tsum[mask] += AOI_TARGET[ob.kind]
        hits[mask] += 1
        for i in np.flatnonzero(mask):
            kinds[i].add(AOI_CLASS[ob.kind])
    target = np.where(hits[:, None] > 0, tsum / np.maximum(hits, 1)[:, None], base)
    aoi_class = ["+".join(sorted(k)) if k else "none" for k in kinds]
    return ComfortField(cells, base, target, aoi_class)


def generate_scene(cfg: SceneConfig) -> tuple[SpatialModel, ComfortField]:
    """Spatial model plus comfort field; logs the node-label census of the scene graph."""
    model = build_model(cfg)
    cells = discretize(model, cfg.cell_size)
    fld = comfort_field(model, cells)
    fld.composition = dict(sorted(build_graph(model, cells).census().items()))
    log.info("scene %s census: %s", cfg.name, fld.composition)
    return model, fld
