import json
from pathlib import Path

import numpy as np
import pytest

from comfortgraph.harness.config import SceneConfig, SpaceSpec
from comfortgraph.spatial import parse_floorplan

DATA = Path(__file__).parent / "data"

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def square_doc(size=10.0, objects=(), mode="HC"):
    return {
        "levels": [{"id": "L1", "name": "Level 1", "number": 1}],
        "spaces": [{"id": "S1", "name": "Room", "level_id": "L1",
                    "footprint": [[0, 0], [size, 0], [size, size], [0, size]], "ventilation_mode": mode}],
        "objects": list(objects),
        "transform": {"origin_lat": 1.3, "origin_lon": 103.77, "rotation": 0.0},
    }


@pytest.fixture
def square_model():
    return parse_floorplan(json.dumps(square_doc()))


@pytest.fixture
def step_text():
    return (DATA / "one_room.ifc").read_text(encoding="utf-8")


def small_scene_config(seed=7) -> SceneConfig:
    """Two rooms, one of each AoI kind; a few hundred cells."""
    return SceneConfig(
        name="small", seed=seed, window_length=6.0, doors=1, solid_walls=2, curtain_walls=1, handrails=1,
        spaces=(SpaceSpec("A", 12, 10, "HC", fans=1, diffusers=1, desks=2),
                SpaceSpec("B", 10, 10, "NV", fans=1, windows=1, chairs=3)))


SMALL_CONFIG = {
    "seed": 7,
    "scene": small_scene_config().to_dict(),
    "simulation": {"n_users": 10, "days": 5},
    "pipeline": {"walks_per_node": 5, "walk_length": 20, "n_splits": 5, "n_personalities": 4,
                 "forest": {"n_trees": 20}},
}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
