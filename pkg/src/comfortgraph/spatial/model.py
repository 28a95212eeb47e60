"""Spatial model types: levels, spaces, objects and the local/WGS84 transform."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from ..errors import DanglingRef, GeometryError, OutOfRange, SchemaError
from .geometry import is_simple, polygon_area

MAX_RANGE_M = 10_000.0


class VentilationMode(str, Enum):
    NV = "NV"
    MV = "MV"
    AC = "AC"
    HC = "HC"


class ObjectKind(str, Enum):
    CeilingFan = "CeilingFan"
    VavDiffuser = "VavDiffuser"
    Window = "Window"
    Door = "Door"
    SolidWall = "SolidWall"
    CurtainWall = "CurtainWall"
    HandRail = "HandRail"
    AirCond = "AirCond"
    Chair = "Chair"
    Desk = "Desk"
    DiningTable = "DiningTable"
    MultiTable = "MultiTable"
    Sofa = "Sofa"
    Sensor = "Sensor"


# graph node label per object kind, in the census notation
NODE_LABELS: dict[ObjectKind, str] = {
    ObjectKind.CeilingFan: "Fan",
    ObjectKind.VavDiffuser: "VavDiffuser",
    ObjectKind.Window: "Window",
    ObjectKind.Door: "Door",
    ObjectKind.SolidWall: "SolidWall:Wall",
    ObjectKind.CurtainWall: "CurtainWall:Wall",
    ObjectKind.HandRail: "HandRail:Wall",
    ObjectKind.AirCond: "AirCond",
    ObjectKind.Chair: "Chair:Furniture",
    ObjectKind.Desk: "Desk:Furniture",
    ObjectKind.DiningTable: "DiningTable:Furniture",
    ObjectKind.MultiTable: "Furniture:MultiTable",
    ObjectKind.Sofa: "Furniture:Sofa",
    ObjectKind.Sensor: "Sensor",
}

AOI_KINDS = (ObjectKind.CeilingFan, ObjectKind.VavDiffuser, ObjectKind.Window)


@dataclass(frozen=True)
class Level:
    id: str
    name: str
    number: int
    elevation: float = 0.0


@dataclass(frozen=True)
class Space:
    id: str
    name: str
    level_id: str
    footprint: tuple[tuple[float, float], ...]
    ventilation_mode: VentilationMode
    setpoint_c: float | None = None

    @property
    def area(self) -> float:
        return abs(polygon_area(self.footprint))


@dataclass(frozen=True)
class SpatialObject:
    id: str
    kind: ObjectKind
    space_id: str
    position: tuple[float, float, float]
    aoi_params: dict[str, Any] = field(default_factory=dict, hash=False)
    attributes: dict[str, str] = field(default_factory=dict, hash=False)
    name: str = ""


@dataclass(frozen=True)
class CoordinateTransform:
    """Equirectangular local-metre <-> WGS84 mapping about a fixed origin.

    ``rotation`` is the counter-clockwise angle in degrees from local +x to east.
    """

    origin_lat: float = 1.2966
    origin_lon: float = 103.7703
    rotation: float = 0.0
    m_per_deg_lat: float = field(init=False, compare=False, repr=False)
    m_per_deg_lon: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        phi = math.radians(self.origin_lat)
        lat_m = (111132.92 - 559.82 * math.cos(2 * phi) + 1.175 * math.cos(4 * phi)
                 - 0.0023 * math.cos(6 * phi))
        lon_m = 111412.84 * math.cos(phi) - 93.5 * math.cos(3 * phi) + 0.118 * math.cos(5 * phi)
        object.__setattr__(self, "m_per_deg_lat", lat_m)
        object.__setattr__(self, "m_per_deg_lon", lon_m)

    def local_to_global(self, x: float, y: float) -> tuple[float, float]:
        if math.hypot(x, y) > MAX_RANGE_M:
            raise OutOfRange(f"point ({x}, {y}) is more than {MAX_RANGE_M:.0f} m from the origin")
        th = math.radians(self.rotation)
        east = x * math.cos(th) - y * math.sin(th)
        north = x * math.sin(th) + y * math.cos(th)
        return float(self.origin_lat + north / self.m_per_deg_lat), float(self.origin_lon + east / self.m_per_deg_lon)

    def global_to_local(self, lat: float, lon: float) -> tuple[float, float]:
        north = (lat - self.origin_lat) * self.m_per_deg_lat
        east = (lon - self.origin_lon) * self.m_per_deg_lon
        if math.hypot(east, north) > MAX_RANGE_M:
            raise OutOfRange(f"({lat}, {lon}) is more than {MAX_RANGE_M:.0f} m from the origin")
        th = math.radians(self.rotation)
        return float(east * math.cos(th) + north * math.sin(th)), float(-east * math.sin(th) + north * math.cos(th))

    def local_to_global_many(self, xy: np.ndarray) -> np.ndarray:
        """Vectorised forward transform; returns (n, 2) of (lat, lon)."""
        xy = np.asarray(xy, dtype=float)
        if len(xy) and np.hypot(xy[:, 0], xy[:, 1]).max() > MAX_RANGE_M:
            raise OutOfRange("points beyond the transform's range")
        th = math.radians(self.rotation)
        east = xy[:, 0] * math.cos(th) - xy[:, 1] * math.sin(th)
        north = xy[:, 0] * math.sin(th) + xy[:, 1] * math.cos(th)
        return np.column_stack([self.origin_lat + north / self.m_per_deg_lat,
                                self.origin_lon + east / self.m_per_deg_lon])


def local_to_global(p, t: CoordinateTransform) -> tuple[float, float]:
    return t.local_to_global(float(p[0]), float(p[1]))


def global_to_local(lat: float, lon: float, t: CoordinateTransform) -> tuple[float, float]:
    return t.global_to_local(lat, lon)


@dataclass(frozen=True)
class SpatialModel:
    levels: tuple[Level, ...]
    spaces: tuple[Space, ...]
    objects: tuple[SpatialObject, ...]
    transform: CoordinateTransform = field(default_factory=CoordinateTransform)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        ids: set[str] = set()
        for item in (*self.levels, *self.spaces, *self.objects):
            if item.id in ids:
                raise SchemaError(f"duplicate id {item.id!r}")
            ids.add(item.id)
        level_ids = {lv.id for lv in self.levels}
        space_ids = {sp.id for sp in self.spaces}
        for sp in self.spaces:
            if sp.level_id not in level_ids:
                raise DanglingRef(f"space {sp.id!r} references missing level {sp.level_id!r}")
            if len(sp.footprint) < 3:
                raise GeometryError(f"space {sp.id!r} footprint has fewer than 3 vertices")
            if not is_simple(sp.footprint):
                raise GeometryError(f"space {sp.id!r} footprint is not a simple polygon")
            if sp.area <= 0:
                raise GeometryError(f"space {sp.id!r} footprint has zero area")
        for ob in self.objects:
            if ob.space_id not in space_ids:
                raise DanglingRef(f"object {ob.id!r} references missing space {ob.space_id!r}")

    def level(self, level_id: str) -> Level:
        return next(lv for lv in self.levels if lv.id == level_id)

    def space(self, space_id: str) -> Space:
        return next(sp for sp in self.spaces if sp.id == space_id)

    def spaces_on(self, level_id: str) -> list[Space]:
        return [sp for sp in self.spaces if sp.level_id == level_id]
