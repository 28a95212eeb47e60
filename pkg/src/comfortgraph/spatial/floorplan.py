"""Canonical floor-plan JSON reader/writer.

Document layout (lengths in metres, angles in degrees)::

    {
      "levels":  [{"id", "name", "number", "elevation"?}],
      "spaces":  [{"id", "name", "level_id", "footprint": [[x, y], ...],
                   "ventilation_mode": "NV"|"MV"|"AC"|"HC", "setpoint_c"?}],
      "objects": [{"id", "kind", "space_id", "position": [x, y, z],
                   "aoi_params"?, "attributes"?, "name"?}],
      "transform": {"origin_lat", "origin_lon", "rotation"?}
    }
"""

from __future__ import annotations

import json
import warnings
from typing import Any

from ..errors import GeometryError, SchemaError
from .model import (AOI_KINDS, CoordinateTransform, Level, ObjectKind, SpatialModel, SpatialObject, Space,
                    VentilationMode)


class ParseWarning(UserWarning):
    pass


_KNOWN = {
    "root": {"levels", "spaces", "objects", "transform"},
    "level": {"id", "name", "number", "elevation"},
    "space": {"id", "name", "level_id", "footprint", "ventilation_mode", "setpoint_c"},
    "object": {"id", "kind", "space_id", "position", "aoi_params", "attributes", "name"},
    "transform": {"origin_lat", "origin_lon", "rotation"},
}

_AOI_REQUIRED = {ObjectKind.CeilingFan: ("radius",), ObjectKind.Window: ("start", "end")}


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing required field {key!r}")
    return obj[key]


def _warn_unknown(obj: dict, kind: str, where: str) -> None:
    for key in sorted(set(obj) - _KNOWN[kind]):
        warnings.warn(f"{where}: ignoring unknown field {key!r}", ParseWarning, stacklevel=3)


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {value!r}")
    return float(value)


def model_from_dict(doc: dict) -> SpatialModel:
    if not isinstance(doc, dict):
        raise SchemaError("floor plan must be a JSON object")
    _warn_unknown(doc, "root", "document")
    levels = []
    for i, lv in enumerate(_require(doc, "levels", "document")):
        where = f"levels[{i}]"
        _warn_unknown(lv, "level", where)
        levels.append(Level(id=str(_require(lv, "id", where)), name=str(lv.get("name", "")),
                            number=int(_require(lv, "number", where)),
                            elevation=_number(lv.get("elevation", 0.0), where)))
    spaces = []
    for i, sp in enumerate(_require(doc, "spaces", "document")):
        where = f"spaces[{i}]"
        _warn_unknown(sp, "space", where)
        raw = _require(sp, "footprint", where)
        try:
            footprint = tuple((_number(p[0], where), _number(p[1], where)) for p in raw)
        except (TypeError, IndexError) as exc:
            raise SchemaError(f"{where}: footprint must be a list of [x, y] pairs") from exc
        if len(footprint) < 3:
            raise GeometryError(f"{where}: footprint needs at least 3 vertices")
        try:
            mode = VentilationMode(_require(sp, "ventilation_mode", where))
        except ValueError as exc:
            raise SchemaError(f"{where}: unknown ventilation mode {sp['ventilation_mode']!r}") from exc
        setpoint = sp.get("setpoint_c")
        spaces.append(Space(id=str(_require(sp, "id", where)), name=str(sp.get("name", "")),
                            level_id=str(_require(sp, "level_id", where)), footprint=footprint,
                            ventilation_mode=mode,
                            setpoint_c=None if setpoint is None else _number(setpoint, where)))
    objects = []
    for i, ob in enumerate(doc.get("objects", [])):
        where = f"objects[{i}]"
        _warn_unknown(ob, "object", where)
        try:
            kind = ObjectKind(_require(ob, "kind", where))
        except ValueError as exc:
            raise SchemaError(f"{where}: unknown object kind {ob['kind']!r}") from exc
        pos = _require(ob, "position", where)
        if not isinstance(pos, list) or len(pos) not in (2, 3):
            raise SchemaError(f"{where}: position must be [x, y] or [x, y, z]")
        position = tuple(_number(v, where) for v in pos) + ((0.0,) if len(pos) == 2 else ())
        aoi = ob.get("aoi_params")
        if kind in AOI_KINDS:
            if aoi is None:
                raise SchemaError(f"{where}: {kind.value} requires aoi_params")
            for key in _AOI_REQUIRED.get(kind, ()):
                if key not in aoi and not (kind is ObjectKind.Window and "polyline" in aoi):
                    raise SchemaError(f"{where}: aoi_params missing {key!r}")
        objects.append(SpatialObject(id=str(_require(ob, "id", where)), kind=kind,
                                     space_id=str(_require(ob, "space_id", where)), position=position,
                                     aoi_params=dict(aoi or {}),
                                     attributes={str(k): str(v) for k, v in (ob.get("attributes") or {}).items()},
                                     name=str(ob.get("name", ""))))
    tr = doc.get("transform") or {}
    _warn_unknown(tr, "transform", "transform")
    transform = CoordinateTransform(origin_lat=_number(tr.get("origin_lat", CoordinateTransform.origin_lat), "transform"),
                                    origin_lon=_number(tr.get("origin_lon", CoordinateTransform.origin_lon), "transform"),
                                    rotation=_number(tr.get("rotation", 0.0), "transform"))
    return SpatialModel(tuple(levels), tuple(spaces), tuple(objects), transform)


def parse_floorplan(data: bytes | str) -> SpatialModel:
    """Parse a floor-plan JSON document into a validated :class:`SpatialModel`."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return model_from_dict(doc)


def model_to_dict(model: SpatialModel) -> dict:
    def space(sp: Space) -> dict:
        d = {"id": sp.id, "name": sp.name, "level_id": sp.level_id,
             "footprint": [list(p) for p in sp.footprint], "ventilation_mode": sp.ventilation_mode.value}
        if sp.setpoint_c is not None:
            d["setpoint_c"] = sp.setpoint_c
        return d

    def obj(ob: SpatialObject) -> dict:
        d = {"id": ob.id, "kind": ob.kind.value, "space_id": ob.space_id, "position": list(ob.position)}
        if ob.aoi_params or ob.kind in AOI_KINDS:
            d["aoi_params"] = ob.aoi_params
        if ob.attributes:
            d["attributes"] = ob.attributes
        if ob.name:
            d["name"] = ob.name
        return d

    return {
        "levels": [{"id": lv.id, "name": lv.name, "number": lv.number, "elevation": lv.elevation}
                   for lv in model.levels],
        "spaces": [space(sp) for sp in model.spaces],
        "objects": [obj(ob) for ob in model.objects],
        "transform": {"origin_lat": model.transform.origin_lat, "origin_lon": model.transform.origin_lon,
                      "rotation": model.transform.rotation},
    }


def serialize_floorplan(model: SpatialModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, sort_keys=True) + "\n"
