"""Building spatial data: model types, parsers, AoI regions, coordinate transform."""

from .aoi import AoiRegion, AoiShape, aoi_region
from .floorplan import ParseWarning, parse_floorplan, serialize_floorplan
from .ifc import SkippedEntityWarning, parse_ifc_subset
from .model import (CoordinateTransform, Level, ObjectKind, SpatialModel, SpatialObject, Space, VentilationMode,
                    global_to_local, local_to_global)

__all__ = [
    "AoiRegion", "AoiShape", "aoi_region", "ParseWarning", "parse_floorplan", "serialize_floorplan",
    "SkippedEntityWarning", "parse_ifc_subset", "CoordinateTransform", "Level", "ObjectKind", "SpatialModel",
    "SpatialObject", "Space", "VentilationMode", "global_to_local", "local_to_global",
]
