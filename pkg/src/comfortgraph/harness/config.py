"""Scene configuration for the synthetic harness (JSON, or TOML when available)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..errors import ConfigError
from ..spatial.model import VentilationMode

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    tomllib = None


@dataclass(frozen=True)
class SpaceSpec:
    name: str
    width: float
    depth: float
    mode: str
    fans: int = 0
    diffusers: int = 0
    windows: int = 0
    air_cond: int = 0
    desks: int = 0
    chairs: int = 0
    dining_tables: int = 0
    multi_tables: int = 0
    sofas: int = 0


@dataclass(frozen=True)
class SceneConfig:
    """Spaces laid side by side along +x on one level.

    Fixture counts (doors, walls, rails) are spread round-robin over spaces;
    they carry no AoI and only shape the graph census.
    """

    name: str = "default"
    seed: int = 0
    level_number: int = 3
    cell_size: float = 1.0
    spaces: tuple[SpaceSpec, ...] = ()
    fan_radius: float = 3.0
    diffuser_throw: float = 4.0
    diffuser_spread: float = 90.0
    window_length: float = 10.0
    window_depth: float = 2.13
    doors: int = 7
    solid_walls: int = 18
    curtain_walls: int = 11
    handrails: int = 13

    def __post_init__(self):
        if not self.spaces:
            raise ConfigError("scene needs at least one space")
        modes = {m.value for m in VentilationMode}
        for s in self.spaces:
            if s.mode not in modes:
                raise ConfigError(f"space {s.name!r}: unknown ventilation mode {s.mode!r}")
            if not (s.width > 0 and s.depth > 0):
                raise ConfigError(f"space {s.name!r}: width and depth must be positive")
            counts = [getattr(s, f.name) for f in fields(SpaceSpec) if f.type == "int"]
            if min(counts) < 0:
                raise ConfigError(f"space {s.name!r}: object counts must be >= 0")
            if s.windows and self.window_length > s.width:
                raise ConfigError(f"space {s.name!r}: window longer than the wall")
        if self.cell_size <= 0 or self.fan_radius <= 0 or self.diffuser_throw <= 0 or self.window_depth <= 0:
            raise ConfigError("sizes must be positive")
        if min(self.doors, self.solid_walls, self.curtain_walls, self.handrails) < 0:
            raise ConfigError("fixture counts must be >= 0")

    @property
    def has_aoi_objects(self) -> bool:
        return any(s.fans or s.diffusers or s.windows for s in self.spaces)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spaces"] = [asdict(s) for s in self.spaces]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SceneConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown scene keys {sorted(unknown)}")
        space_keys = {f.name for f in fields(SpaceSpec)}
        spaces = []
        for i, s in enumerate(d.pop("spaces", [])):
            bad = set(s) - space_keys
            if bad:
                raise ConfigError(f"space #{i}: unknown keys {sorted(bad)}")
            try:
                spaces.append(SpaceSpec(**s))
            except TypeError as exc:
                raise ConfigError(f"space #{i}: {exc}") from exc
        return cls(spaces=tuple(spaces), **d)


def default_config(seed: int = 0) -> SceneConfig:
    """Five spaces (three hybrid-cooled, two naturally ventilated), about 4650 m2."""
    return SceneConfig(
        name="default",
        seed=seed,
        spaces=(
            SpaceSpec("Studio", 40, 30, "HC", fans=3, diffusers=3, windows=1, air_cond=6, desks=8, chairs=30),
            SpaceSpec("Workspace", 35, 30, "HC", fans=3, diffusers=3, air_cond=5, desks=8, chairs=28),
            SpaceSpec("Meeting", 25, 30, "HC", fans=1, diffusers=2, air_cond=4, desks=4, chairs=12,
                      multi_tables=3),
            SpaceSpec("Pantry", 30, 30, "NV", fans=1, windows=2, dining_tables=12, chairs=8, sofas=1),
            SpaceSpec("Lounge", 25, 30, "NV", fans=1, windows=2, dining_tables=12, chairs=8, sofas=1),
        ),
    )


def homogeneous_config(seed: int = 0) -> SceneConfig:
    """Same footprint as the default scene, one ventilation mode, no AoI objects."""
    base = default_config(seed)
    spaces = tuple(replace(s, mode="AC", fans=0, diffusers=0, windows=0) for s in base.spaces)
    return replace(base, name="homogeneous", spaces=spaces)


PRESETS = {"default": default_config, "homogeneous": homogeneous_config}


def load_config(path) -> dict:
    """Raw config mapping from a .json or .toml file."""
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix.lower() == ".toml":
        if tomllib is None:
            raise ConfigError("TOML configs need Python 3.11+; use JSON instead")
        try:
            return tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return doc


def scene_config_from(doc: dict | None, seed: int | None = None) -> SceneConfig:
    """``doc`` may name a preset (``{"preset": "homogeneous"}``) or spell a scene out."""
    doc = dict(doc or {})
    preset = doc.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        cfg = PRESETS[preset](doc.pop("seed", 0))
        if doc:
            merged = cfg.to_dict()
            merged.update(doc)
            cfg = SceneConfig.from_dict(merged)
    elif doc:
        cfg = SceneConfig.from_dict(doc)
    else:
        cfg = default_config()
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg
