"""Reader for a small, line-oriented subset of IFC STEP physical files.

Each data record must sit on one line (``#12 = IFCSPACE(...);``). Only the
entity types in :data:`WHITELIST` are turned into model objects; every other
record stays available for reference resolution and is reported with a
:class:`SkippedEntityWarning`.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

from ..errors import StepSyntaxError, UnresolvedRef
from .floorplan import ParseWarning
from .geometry import point_in_polygon
from .model import CoordinateTransform, Level, ObjectKind, SpatialModel, SpatialObject, Space, VentilationMode

WHITELIST = frozenset({
    "IFCSPACE", "IFCDOOR", "IFCWINDOW", "IFCFURNITURE", "IFCFURNISHINGELEMENT",
    "IFCSYSTEMFURNITUREELEMENT", "IFCSENSOR", "IFCBUILDINGSTOREY",
    "IFCRELCONTAINEDINSPATIALSTRUCTURE", "IFCPOLYLINE", "IFCCARTESIANPOINT",
    "IFCLOCALPLACEMENT", "IFCAXIS2PLACEMENT3D",
})
ELEMENTS = {
    "IFCDOOR": ObjectKind.Door,
    "IFCWINDOW": ObjectKind.Window,
    "IFCSENSOR": ObjectKind.Sensor,
}
FURNITURE = ("IFCFURNITURE", "IFCFURNISHINGELEMENT", "IFCSYSTEMFURNITUREELEMENT")
_FURNITURE_WORDS = (("dining", ObjectKind.DiningTable), ("sofa", ObjectKind.Sofa), ("chair", ObjectKind.Chair),
                    ("seat", ObjectKind.Chair), ("desk", ObjectKind.Desk), ("table", ObjectKind.MultiTable))

_RECORD = re.compile(r"^#(\d+)\s*=\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*;\s*$")


class SkippedEntityWarning(ParseWarning):
    pass


@dataclass(frozen=True)
class Ref:
    id: int


@dataclass(frozen=True)
class EnumValue:
    name: str


@dataclass(frozen=True)
class Typed:
    name: str
    args: tuple


@dataclass
class Record:
    id: int
    type: str
    args: list
    lineno: int


class _ArgParser:
    _num = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")

    def __init__(self, text: str, lineno: int):
        self.s = text
        self.i = 0
        self.lineno = lineno

    def fail(self, msg: str):
        raise StepSyntaxError(f"{msg} at column {self.i + 1}", self.lineno)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i] in " \t\r":
            self.i += 1

    def parse_list(self) -> list:
        """Parse comma-separated values up to (not including) a closing paren or end."""
        out = []
        self.ws()
        if self.i < len(self.s) and self.s[self.i] == ")":
            return out
        while True:
            out.append(self.value())
            self.ws()
            if self.i < len(self.s) and self.s[self.i] == ",":
                self.i += 1
                continue
            return out

    def value(self):
        self.ws()
        if self.i >= len(self.s):
            self.fail("unexpected end of arguments")
        c = self.s[self.i]
        if c == "$":
            self.i += 1
            return None
        if c == "*":
            self.i += 1
            return "*"
        if c == "#":
            m = re.compile(r"#(\d+)").match(self.s, self.i)
            if not m:
                self.fail("bad reference")
            self.i = m.end()
            return Ref(int(m.group(1)))
        if c == "'":
            self.i += 1
            buf = []
            while True:
                j = self.s.find("'", self.i)
                if j < 0:
                    self.fail("unterminated string")
                buf.append(self.s[self.i:j])
                if j + 1 < len(self.s) and self.s[j + 1] == "'":
                    buf.append("'")
                    self.i = j + 2
                    continue
                self.i = j + 1
                return "".join(buf)
        if c == ".":
            m = re.compile(r"\.([A-Za-z_][A-Za-z0-9_]*)\.").match(self.s, self.i)
            if m:
                self.i = m.end()
                return EnumValue(m.group(1))
        if c == "(":
            self.i += 1
            items = self.parse_list()
            self.ws()
            if self.i >= len(self.s) or self.s[self.i] != ")":
                self.fail("unbalanced parenthesis")
            self.i += 1
            return items
        m = self._num.match(self.s, self.i)
        if m:
            self.i = m.end()
            text = m.group(0)
            return float(text) if any(ch in text for ch in ".eE") else int(text)
        m = re.compile(r"[A-Za-z_][A-Za-z0-9_]*").match(self.s, self.i)
        if m:
            self.i = m.end()
            self.ws()
            if self.i < len(self.s) and self.s[self.i] == "(":
                self.i += 1
                args = self.parse_list()
                if self.i >= len(self.s) or self.s[self.i] != ")":
                    self.fail("unbalanced parenthesis")
                self.i += 1
                return Typed(m.group(0).upper(), tuple(args))
        self.fail(f"unexpected character {c!r}")


def read_records(text: str) -> dict[int, Record]:
    """Tokenise the DATA section into records keyed by instance id."""
    lines = text.splitlines()
    first = next((ln.strip() for ln in lines if ln.strip()), "")
    if not first.startswith("ISO-10303-21"):
        raise StepSyntaxError("missing ISO-10303-21 header", 1)
    records: dict[int, Record] = {}
    section = None
    for lineno, raw in enumerate(lines, start=1):
        line = re.sub(r"/\*.*?\*/", "", raw).strip()
        if not line:
            continue
        upper = line.upper()
        if upper.startswith("ISO-10303-21") or upper.startswith("END-ISO-10303-21"):
            continue
        if upper in ("HEADER;", "DATA;"):
            section = upper[:-1]
            continue
        if upper == "ENDSEC;":
            section = None
            continue
        if section != "DATA":
            continue
        m = _RECORD.match(line)
        if not m:
            raise StepSyntaxError(f"malformed data line {line!r}", lineno)
        parser = _ArgParser(m.group(3), lineno)
        args = parser.parse_list()
        parser.ws()
        if parser.i != len(parser.s):
            parser.fail("trailing characters in argument list")
        rid = int(m.group(1))
        if rid in records:
            raise StepSyntaxError(f"duplicate instance #{rid}", lineno)
        records[rid] = Record(rid, m.group(2).upper(), args, lineno)
    for rec in records.values():
        for ref in _refs(rec.args):
            if ref not in records:
                raise UnresolvedRef(ref, rec.lineno)
    return records


def _refs(value):
    if isinstance(value, Ref):
        yield value.id
    elif isinstance(value, (list, tuple)):
        for v in value:
            yield from _refs(v)
    elif isinstance(value, Typed):
        yield from _refs(value.args)


def _arg(rec: Record, i: int):
    return rec.args[i] if i < len(rec.args) else None


class _Resolver:
    def __init__(self, records: dict[int, Record]):
        self.r = records

    def point(self, ref) -> tuple[float, ...]:
        rec = self.r[ref.id]
        return tuple(float(v) for v in rec.args[0])

    def direction(self, ref) -> tuple[float, ...] | None:
        if not isinstance(ref, Ref):
            return None
        return tuple(float(v) for v in self.r[ref.id].args[0])

    def placement(self, ref) -> tuple[float, float, float, float]:
        """Compose local placements into (x, y, z, angle) in the world frame."""
        if not isinstance(ref, Ref):
            return 0.0, 0.0, 0.0, 0.0
        rec = self.r[ref.id]
        if rec.type != "IFCLOCALPLACEMENT":
            return 0.0, 0.0, 0.0, 0.0
        px, py, pz, pa = self.placement(_arg(rec, 0))
        axis = self.r[rec.args[1].id] if isinstance(_arg(rec, 1), Ref) else None
        lx = ly = lz = la = 0.0
        if axis is not None and axis.type == "IFCAXIS2PLACEMENT3D":
            loc = self.point(axis.args[0]) + (0.0, 0.0, 0.0)
            lx, ly, lz = loc[:3]
            ref_dir = self.direction(_arg(axis, 2))
            if ref_dir is not None:
                la = math.atan2(ref_dir[1], ref_dir[0])
        c, s = math.cos(pa), math.sin(pa)
        return px + c * lx - s * ly, py + s * lx + c * ly, pz + lz, pa + la

    def find(self, value, type_name: str, seen=None):
        """Depth-first search from ``value`` for the first record of ``type_name``."""
        seen = set() if seen is None else seen
        for ref in _refs(value):
            if ref in seen:
                continue
            seen.add(ref)
            rec = self.r[ref]
            if rec.type == type_name:
                return rec
            hit = self.find(rec.args, type_name, seen)
            if hit is not None:
                return hit
        return None


def _ident(rec: Record) -> str:
    gid = _arg(rec, 0)
    return gid if isinstance(gid, str) and gid else f"#{rec.id}"


def _text(rec: Record, *idx: int) -> str:
    return " ".join(str(_arg(rec, i)) for i in idx if isinstance(_arg(rec, i), str))


def parse_ifc_subset(text: str, transform: CoordinateTransform | None = None) -> SpatialModel:
    """Extract storeys, spaces and contained elements from STEP text."""
    records = read_records(text)
    res = _Resolver(records)
    for rec in sorted(records.values(), key=lambda r: r.lineno):
        if rec.type not in WHITELIST:
            warnings.warn(f"line {rec.lineno}: skipped #{rec.id} {rec.type}", SkippedEntityWarning, stacklevel=2)

    storeys = [r for r in records.values() if r.type == "IFCBUILDINGSTOREY"]
    storeys.sort(key=lambda r: r.lineno)
    levels: list[Level] = []
    level_of_storey: dict[int, str] = {}
    for i, rec in enumerate(storeys):
        name = _arg(rec, 2) if isinstance(_arg(rec, 2), str) else f"Level {i + 1}"
        digits = re.findall(r"\d+", name)
        elevation = _arg(rec, 9)
        lv = Level(id=_ident(rec), name=name, number=int(digits[-1]) if digits else i + 1,
                   elevation=float(elevation) if isinstance(elevation, (int, float)) else 0.0)
        levels.append(lv)
        level_of_storey[rec.id] = lv.id

    contained: dict[int, int] = {}
    for rel in (r for r in records.values() if r.type == "IFCRELCONTAINEDINSPATIALSTRUCTURE"):
        structure = _arg(rel, 5)
        for el in _arg(rel, 4) or []:
            if isinstance(el, Ref) and isinstance(structure, Ref):
                contained[el.id] = structure.id

    storey_placements = {_arg(r, 5).id: r.id for r in storeys if isinstance(_arg(r, 5), Ref)}

    def storey_for(rec: Record) -> str | None:
        if rec.id in contained and contained[rec.id] in level_of_storey:
            return level_of_storey[contained[rec.id]]
        ref = _arg(rec, 5)
        while isinstance(ref, Ref) and records[ref.id].type == "IFCLOCALPLACEMENT":
            if ref.id in storey_placements:
                return level_of_storey[storey_placements[ref.id]]
            ref = _arg(records[ref.id], 0)
        return levels[0].id if levels else None

    spaces: list[Space] = []
    space_of_record: dict[int, str] = {}
    for rec in sorted((r for r in records.values() if r.type == "IFCSPACE"), key=lambda r: r.lineno):
        poly = res.find(_arg(rec, 6), "IFCPOLYLINE")
        if poly is None:
            warnings.warn(f"line {rec.lineno}: space #{rec.id} has no polyline footprint", ParseWarning,
                          stacklevel=2)
            continue
        ox, oy, _, ang = res.placement(_arg(rec, 5))
        c, s = math.cos(ang), math.sin(ang)
        pts = [res.point(p) for p in poly.args[0]]
        if len(pts) > 1 and pts[0][:2] == pts[-1][:2]:
            pts = pts[:-1]
        footprint = tuple((ox + c * p[0] - s * p[1], oy + s * p[0] + c * p[1]) for p in pts)
        if not levels:
            levels.append(Level(id="L1", name="Level 1", number=1))
        level_id = storey_for(rec)
        label = _text(rec, 4, 7, 3).upper()
        mode = next((m for m in VentilationMode if re.search(rf"\b{m.value}\b", label)), VentilationMode.AC)
        sp = Space(id=_ident(rec), name=_text(rec, 2), level_id=level_id, footprint=footprint,
                   ventilation_mode=mode)
        spaces.append(sp)
        space_of_record[rec.id] = sp.id

    objects: list[SpatialObject] = []
    element_types = set(ELEMENTS) | set(FURNITURE)
    for rec in sorted((r for r in records.values() if r.type in element_types), key=lambda r: r.lineno):
        x, y, z, ang = res.placement(_arg(rec, 5))
        if rec.type in FURNITURE:
            words = _text(rec, 2, 4).lower()
            kind = next((k for w, k in _FURNITURE_WORDS if w in words), None)
            if kind is None:
                warnings.warn(f"line {rec.lineno}: furniture #{rec.id} has no recognised type", ParseWarning,
                              stacklevel=2)
                continue
        else:
            kind = ELEMENTS[rec.type]
        space_id = space_of_record.get(contained.get(rec.id, -1))
        if space_id is None:
            space_id = next((sp.id for sp in spaces if point_in_polygon(x, y, sp.footprint)), None)
        if space_id is None:
            warnings.warn(f"line {rec.lineno}: #{rec.id} {rec.type} is not inside any space", ParseWarning,
                          stacklevel=2)
            continue
        aoi = {}
        if kind is ObjectKind.Window:
            width = _arg(rec, 9)
            width = float(width) if isinstance(width, (int, float)) else 1.0
            aoi = {"start": [x, y], "end": [x + width * math.cos(ang), y + width * math.sin(ang)]}
        objects.append(SpatialObject(id=_ident(rec), kind=kind, space_id=space_id, position=(x, y, z),
                                     aoi_params=aoi, name=_text(rec, 2)))
    return SpatialModel(tuple(levels), tuple(spaces), tuple(objects), transform or CoordinateTransform())
