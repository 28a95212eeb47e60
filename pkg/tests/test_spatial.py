import json
import math
import warnings

import numpy as np
import pytest

from comfortgraph.errors import (DanglingRef, GeometryError, MissingAoiParams, OutOfRange, SchemaError,
                                 StepSyntaxError, UnresolvedRef)
from comfortgraph.harness.config import default_config
from comfortgraph.harness.scene import build_model
from comfortgraph.spatial import (AoiShape, CoordinateTransform, ObjectKind, ParseWarning, SkippedEntityWarning,
                                  SpatialObject, aoi_region, global_to_local, local_to_global, parse_floorplan,
                                  parse_ifc_subset, serialize_floorplan)
from comfortgraph.spatial.aoi import WINDOW_DEPTH_M
from comfortgraph.spatial.geometry import is_simple, point_in_polygon

from conftest import square_doc

FAN = {"id": "F1", "kind": "CeilingFan", "space_id": "S1", "position": [5, 5, 2.8], "aoi_params": {"radius": 1.5}}


# ---- floor-plan JSON

def test_minimal_document_counts():
    m = parse_floorplan(json.dumps(square_doc(objects=[FAN])))
    assert (len(m.levels), len(m.spaces), len(m.objects)) == (1, 1, 1)
    assert m.spaces[0].area == 100.0


def test_dangling_level_reference():
    doc = square_doc()
    doc["spaces"][0]["level_id"] = "L9"
    with pytest.raises(DanglingRef):
        parse_floorplan(json.dumps(doc))


def test_dangling_space_reference():
    doc = square_doc(objects=[dict(FAN, space_id="S7")])
    with pytest.raises(DanglingRef):
        parse_floorplan(json.dumps(doc))


def test_missing_required_field():
    doc = square_doc()
    del doc["spaces"][0]["footprint"]
    with pytest.raises(SchemaError, match="footprint"):
        parse_floorplan(json.dumps(doc))


def test_degenerate_polygons():
    doc = square_doc()
    doc["spaces"][0]["footprint"] = [[0, 0], [1, 1], [2, 2]]
    with pytest.raises(GeometryError):
        parse_floorplan(json.dumps(doc))
    doc["spaces"][0]["footprint"] = [[0, 0], [2, 2], [2, 0], [0, 2]]  # bow tie
    with pytest.raises(GeometryError):
        parse_floorplan(json.dumps(doc))


def test_fan_without_radius_is_schema_error():
    bad = dict(FAN, aoi_params={})
    with pytest.raises(SchemaError):
        parse_floorplan(json.dumps(square_doc(objects=[bad])))


def test_unknown_fields_warn():
    doc = square_doc()
    doc["colour"] = "blue"
    doc["spaces"][0]["carpet"] = True
    with pytest.warns(ParseWarning) as rec:
        parse_floorplan(json.dumps(doc))
    assert len(rec) == 2


def test_invalid_json_has_position():
    with pytest.raises(SchemaError, match="line 1"):
        parse_floorplan(b"{not json")


def test_roundtrip_identity_on_harness_scene():
    m = build_model(default_config())
    text = serialize_floorplan(m)
    again = parse_floorplan(text)
    assert again == m
    assert serialize_floorplan(again) == text


def test_harness_scene_composition():
    m = parse_floorplan(serialize_floorplan(build_model(default_config())))
    kinds = [o.kind for o in m.objects]
    assert len(m.spaces) == 5
    assert kinds.count(ObjectKind.CeilingFan) == 9
    assert kinds.count(ObjectKind.AirCond) == 15


# ---- STEP subset

def test_step_fixture_counts(step_text):
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        m = parse_ifc_subset(step_text)
    assert (len(m.levels), len(m.spaces), len(m.objects)) == (1, 1, 1)
    assert m.levels[0].number == 3 and m.levels[0].elevation == 12.0
    sp = m.spaces[0]
    assert sp.footprint == ((2.0, 1.0), (8.0, 1.0), (8.0, 7.0), (2.0, 7.0))
    assert sp.ventilation_mode.value == "HC"
    door = m.objects[0]
    assert door.kind is ObjectKind.Door and door.space_id == sp.id
    assert door.position[:2] == (5.0, 1.0)
    skipped = [w for w in rec if issubclass(w.category, SkippedEntityWarning)]
    # IFCPROJECT, IFCBUILDING, IFCSHAPEREPRESENTATION, IFCPRODUCTDEFINITIONSHAPE, IFCRELAGGREGATES
    assert len(skipped) == 5


def test_step_only_solids_gives_empty_model():
    text = "\n".join(["ISO-10303-21;", "HEADER;", "ENDSEC;", "DATA;",
                      "#1 = IFCEXTRUDEDAREASOLID($,$,$,3.0);",
                      "#2 = IFCEXTRUDEDAREASOLID($,$,$,2.5);",
                      "ENDSEC;", "END-ISO-10303-21;"])
    with pytest.warns(SkippedEntityWarning) as rec:
        m = parse_ifc_subset(text)
    assert len(rec) == 2
    assert m.levels == () and m.spaces == () and m.objects == ()


def test_step_unterminated_line_is_positioned(step_text):
    lines = step_text.splitlines()
    lines.insert(7, "#7 = IFCSPACE($,#2,")
    del lines[8:]
    lines += ["ENDSEC;", "END-ISO-10303-21;"]
    with pytest.raises(StepSyntaxError) as exc:
        parse_ifc_subset("\n".join(lines))
    assert exc.value.lineno == 8
    assert "line 8" in str(exc.value)


@pytest.mark.parametrize("bad", ["#30 = IFCWALL('x',$,'unbalanced';", "#30 = IFCWALL('open);",
                                 "#30 IFCWALL();", "#30 = IFCWALL(@);"])
def test_step_malformed_lines(step_text, bad):
    lines = step_text.splitlines()
    at = lines.index("ENDSEC;", 7)
    lines.insert(at, bad)
    with pytest.raises(StepSyntaxError) as exc:
        parse_ifc_subset("\n".join(lines))
    assert exc.value.lineno == at + 1


def test_step_unresolved_reference(step_text):
    text = step_text.replace("(#24),#20)", "(#24,#99),#20)")
    with pytest.raises(UnresolvedRef, match="#99"):
        parse_ifc_subset(text)


def test_step_requires_header():
    with pytest.raises(StepSyntaxError):
        parse_ifc_subset("DATA;\n#1 = IFCSPACE();\nENDSEC;\n")


# ---- transform

def test_origin_fixed_point():
    t = CoordinateTransform(1.3, 103.8, 25.0)
    assert local_to_global((0, 0), t) == (1.3, 103.8)


def test_eastward_shift_against_spherical_formula():
    # at the equator-ish origin one degree of longitude is about 111.32 km * cos(lat)
    t = CoordinateTransform(1.3, 103.8)
    delta = 0.01
    lat, lon = local_to_global((111_320 * delta, 0.0), t)
    assert lat == pytest.approx(1.3, abs=1e-12)
    assert lon - 103.8 == pytest.approx(delta / math.cos(math.radians(1.3)), rel=2e-3)


def test_roundtrip_random_points(rng):
    t = CoordinateTransform(1.2966, 103.7703, 33.0)
    pts = rng.uniform(-1000, 1000, (1000, 2))
    err = max(math.dist(global_to_local(*local_to_global(p, t), t), p) for p in pts)
    assert err < 1e-6


def test_out_of_range():
    t = CoordinateTransform()
    with pytest.raises(OutOfRange):
        local_to_global((10_001, 0), t)
    with pytest.raises(OutOfRange):
        global_to_local(t.origin_lat + 1.0, t.origin_lon, t)


def test_rotation_is_counter_clockwise():
    t = CoordinateTransform(0.0, 0.0, 90.0)
    lat, lon = local_to_global((10.0, 0.0), t)
    assert lat > 0 and abs(lon) < 1e-12


# ---- AoI

def _obj(kind, pos=(3.0, 3.0, 1.1), **aoi):
    return SpatialObject("o", kind, "S1", pos, aoi_params=aoi)


def test_fan_disk():
    r = aoi_region(_obj(ObjectKind.CeilingFan, radius=0.9))
    assert r.shape is AoiShape.Disk and r.center == (3.0, 3.0) and r.radius == 0.9
    assert r.contains(3.9, 3.0)  # boundary inclusive
    assert not r.contains(3.0, 3.95)


def test_window_band_default_depth():
    r = aoi_region(_obj(ObjectKind.Window, start=[0, 0], end=[4, 0], side=1))
    assert r.depth == WINDOW_DEPTH_M == 2.13
    assert r.contains(2.0, 2.13) and not r.contains(2.0, 2.2) and not r.contains(2.0, -0.5)


def test_window_side_inferred_from_room(square_model):
    win = SpatialObject("w", ObjectKind.Window, "S1", (2.0, 0.0, 1.0), aoi_params={"start": [2, 0], "end": [8, 0]})
    r = aoi_region(win, square_model)
    assert r.contains(5.0, 1.0) and not r.contains(5.0, -1.0)


def test_diffuser_sector():
    r = aoi_region(_obj(ObjectKind.VavDiffuser, pos=(0.0, 0.0, 3.0), throw=2.0, spread=90.0, direction=90.0))
    assert r.contains(0.0, 2.0) and r.contains(1.0, 1.0)  # 45 degrees off axis is on the edge
    assert not r.contains(1.5, 0.5) and not r.contains(0.0, -1.0) and not r.contains(0.0, 2.1)


def test_no_rule_and_missing_params():
    assert aoi_region(_obj(ObjectKind.Chair)) is None
    with pytest.raises(MissingAoiParams):
        aoi_region(_obj(ObjectKind.CeilingFan))
    with pytest.raises(MissingAoiParams):
        aoi_region(_obj(ObjectKind.Window))


def test_contains_many_matches_contains(rng):
    regions = [aoi_region(_obj(ObjectKind.CeilingFan, radius=1.7)),
               aoi_region(_obj(ObjectKind.VavDiffuser, throw=3.0, spread=70.0, direction=200.0)),
               aoi_region(_obj(ObjectKind.Window, polyline=[[0, 0], [4, 0], [4, 5]], depth=1.2))]
    pts = rng.uniform(-2, 8, (2000, 2))
    for r in regions:
        assert r.contains_many(pts).tolist() == [r.contains(x, y) for x, y in pts]


# ---- geometry helpers

def test_point_in_polygon_boundary_and_l_shape():
    L = [(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)]
    assert is_simple(L)
    assert point_in_polygon(1, 3, L) and not point_in_polygon(3, 3, L)
    assert point_in_polygon(4, 1, L)  # on an edge
