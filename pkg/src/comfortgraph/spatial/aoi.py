"""Area-of-influence regions for fans, diffusers and windows."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import MissingAoiParams
from .geometry import EPS, point_in_polygon
from .model import ObjectKind, SpatialModel, SpatialObject

WINDOW_DEPTH_M = 2.13  # 7 ft
DIFFUSER_THROW_M = 2.0
DIFFUSER_SPREAD_DEG = 90.0


class AoiShape(str, Enum):
    Disk = "Disk"
    Sector = "Sector"
    Band = "Band"


@dataclass(frozen=True)
class AoiRegion:
    """A planar region; membership is boundary-inclusive.

    Disk: ``center``, ``radius``. Sector: ``center`` (apex), ``direction`` (deg,
    counter-clockwise from +x), ``radius`` (throw), ``spread`` (full angle, deg).
    Band: ``polyline`` with ``depth`` measured on ``side`` (+1 left of travel,
    -1 right, 0 both).
    """

    shape: AoiShape
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.0
    direction: float = 0.0
    spread: float = 360.0
    polyline: tuple[tuple[float, float], ...] = ()
    depth: float = 0.0
    side: int = 0

    def contains(self, x: float, y: float) -> bool:
        if self.shape is AoiShape.Disk:
            dx, dy = x - self.center[0], y - self.center[1]
            return dx * dx + dy * dy <= self.radius * self.radius + EPS
        if self.shape is AoiShape.Sector:
            dx, dy = x - self.center[0], y - self.center[1]
            dist2 = dx * dx + dy * dy
            if dist2 > self.radius * self.radius + EPS:
                return False
            if dist2 <= EPS:
                return True
            ang = math.degrees(math.atan2(dy, dx)) - self.direction
            ang = (ang + 180.0) % 360.0 - 180.0
            return abs(ang) <= self.spread / 2 + 1e-7
        for (ax, ay), (bx, by) in zip(self.polyline, self.polyline[1:]):
            length = math.hypot(bx - ax, by - ay)
            ux, uy = (bx - ax) / length, (by - ay) / length
            t = (x - ax) * ux + (y - ay) * uy
            s = ux * (y - ay) - uy * (x - ax)
            if -EPS <= t <= length + EPS and _offset_ok(s, self.depth, self.side):
                return True
        return False

    def contains_many(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        x, y = xy[:, 0], xy[:, 1]
        if self.shape is AoiShape.Disk:
            dx, dy = x - self.center[0], y - self.center[1]
            return dx * dx + dy * dy <= self.radius * self.radius + EPS
        if self.shape is AoiShape.Sector:
            dx, dy = x - self.center[0], y - self.center[1]
            dist2 = dx * dx + dy * dy
            ang = np.degrees(np.arctan2(dy, dx)) - self.direction
            ang = (ang + 180.0) % 360.0 - 180.0
            in_angle = np.abs(ang) <= self.spread / 2 + 1e-7
            return (dist2 <= self.radius * self.radius + EPS) & ((dist2 <= EPS) | in_angle)
        out = np.zeros(len(xy), dtype=bool)
        for (ax, ay), (bx, by) in zip(self.polyline, self.polyline[1:]):
            length = math.hypot(bx - ax, by - ay)
            ux, uy = (bx - ax) / length, (by - ay) / length
            t = (x - ax) * ux + (y - ay) * uy
            s = ux * (y - ay) - uy * (x - ax)
            if self.side == 0:
                ok = np.abs(s) <= self.depth + EPS
            else:
                ss = s * self.side
                ok = (ss >= -EPS) & (ss <= self.depth + EPS)
            out |= (t >= -EPS) & (t <= length + EPS) & ok
        return out


def _offset_ok(s: float, depth: float, side: int) -> bool:
    if side == 0:
        return abs(s) <= depth + EPS
    s = s * side
    return -EPS <= s <= depth + EPS


def _inward_side(obj: SpatialObject, polyline, model: SpatialModel | None) -> int:
    if "side" in obj.aoi_params:
        return int(obj.aoi_params["side"])
    if model is None:
        return 0
    footprint = model.space(obj.space_id).footprint
    (ax, ay), (bx, by) = polyline[0], polyline[1]
    length = math.hypot(bx - ax, by - ay)
    mx, my = (ax + bx) / 2, (ay + by) / 2
    nx, ny = -(by - ay) / length, (bx - ax) / length
    probe = 0.05
    left_in = point_in_polygon(mx + probe * nx, my + probe * ny, footprint)
    right_in = point_in_polygon(mx - probe * nx, my - probe * ny, footprint)
    if left_in and not right_in:
        return 1
    if right_in and not left_in:
        return -1
    return 0


def aoi_region(obj: SpatialObject, model: SpatialModel | None = None) -> AoiRegion | None:
    """Region of influence for ``obj``; ``None`` for kinds without an AoI rule.

    With ``model`` given, a window band is offset into its own room only.
    """
    p = obj.aoi_params
    if obj.kind is ObjectKind.CeilingFan:
        if "radius" not in p:
            raise MissingAoiParams(f"fan {obj.id!r} has no radius")
        return AoiRegion(AoiShape.Disk, center=(obj.position[0], obj.position[1]), radius=float(p["radius"]))
    if obj.kind is ObjectKind.VavDiffuser:
        return AoiRegion(AoiShape.Sector, center=(obj.position[0], obj.position[1]),
                         radius=float(p.get("throw", DIFFUSER_THROW_M)),
                         direction=float(p.get("direction", 0.0)),
                         spread=float(p.get("spread", DIFFUSER_SPREAD_DEG)))
    if obj.kind is ObjectKind.Window:
        if "polyline" in p:
            polyline = tuple((float(a), float(b)) for a, b in p["polyline"])
        elif "start" in p and "end" in p:
            polyline = ((float(p["start"][0]), float(p["start"][1])), (float(p["end"][0]), float(p["end"][1])))
        else:
            raise MissingAoiParams(f"window {obj.id!r} has no segment")
        return AoiRegion(AoiShape.Band, polyline=polyline, depth=float(p.get("depth", WINDOW_DEPTH_M)),
                         side=_inward_side(obj, polyline, model))
    return None
