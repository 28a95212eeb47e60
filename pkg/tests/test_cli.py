import csv
import json
import os

import pytest

from comfortgraph.cli import main
from comfortgraph.spatial import SkippedEntityWarning

from conftest import DATA, SMALL_CONFIG


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Simulated study on the small scene, then every stage chained through files."""
    d = tmp_path_factory.mktemp("cli")
    cfg = dict(SMALL_CONFIG, simulation={"n_users": 50, "days": 5})
    (d / "config.json").write_text(json.dumps(cfg))
    c = d / "config.json"
    assert run("simulate", "--config", c, "--out", d / "sim") == 0
    assert run("ingest", d / "sim" / "model.json", "--out", d) == 0
    assert run("discretize", "--config", c, "--model", d / "model.json", "--out", d) == 0
    assert run("locate", "--config", c, "--model", d / "model.json", "--cells", d / "cells.csv",
               "--fixes", d / "sim" / "fixes.csv", "--feedback", d / "sim" / "feedback.csv", "--out", d) == 0
    assert run("build-graph", "--config", c, "--model", d / "model.json", "--cells", d / "cells.csv",
               "--records", d / "records.csv", "--out", d) == 0
    assert run("embed", "--config", c, "--adjacency", d / "adjacency.tsv", "--out", d) == 0
    return d


def _csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_stage_outputs(workdir):
    cells = _csv(workdir / "cells.csv")
    assert (workdir / "cells.csv").read_bytes() == (workdir / "sim" / "cells.csv").read_bytes()
    assert len(_csv(workdir / "records.csv")) == 1000
    assert {r["cell_id"] for r in _csv(workdir / "located.csv")} <= {c["cell_id"] for c in cells}
    census = dict(line.split(",") for line in (workdir / "census.csv").read_text().splitlines()[1:])
    assert int(census["Feedback"]) == 1000 and int(census["Occupant"]) == 50
    assert "ThermalComfortPersonality" not in census  # no --personalities given
    rows = [ln.split("\t") for ln in (workdir / "embedding.tsv").read_text().splitlines()]
    assert {len(r) for r in rows} == {21}


def test_similarity_map_anchor_is_one(workdir, tmp_path):
    anchor = _csv(workdir / "cells.csv")[0]["cell_id"]
    assert run("similarity-map", "--model", workdir / "model.json", "--cells", workdir / "cells.csv",
               "--embedding", workdir / "embedding.tsv", "--anchor", anchor, "--out", tmp_path) == 0
    rows = _csv(tmp_path / f"similarity_{anchor}.csv")
    assert float(next(r for r in rows if r["cell_id"] == anchor)["similarity"]) == pytest.approx(1.0)
    assert all(-1 - 1e-9 <= float(r["similarity"]) <= 1 + 1e-9 for r in rows)
    gj = json.loads((tmp_path / f"similarity_{anchor}.geojson").read_text())
    assert gj["type"] == "FeatureCollection" and len(gj["features"]) == len(rows)


def test_train_and_recommend(workdir, tmp_path):
    c = workdir / "config.json"
    assert run("train", "--config", c, "--embedding", workdir / "embedding.tsv", "--records",
               workdir / "records.csv", "--out", tmp_path / "forest") == 0
    assert run("recommend", "--forest", tmp_path / "forest", "--embedding", workdir / "embedding.tsv",
               "--cells", workdir / "cells.csv", "--hr", 72, "--temp", 33, "--top", 5, "--out", tmp_path) == 0
    rows = _csv(tmp_path / "recommendations.csv")
    assert [int(r["rank"]) for r in rows] == [1, 2, 3, 4, 5]
    scores = [float(r["p_no_preference"]) for r in rows]
    assert scores == sorted(scores, reverse=True)


def test_cross_validate_plan_shape(workdir, tmp_path):
    assert run("cross-validate", "--config", workdir / "config.json", "--embedding", workdir / "embedding.tsv",
               "--records", workdir / "records.csv", "--splits", 30, "--test-fraction", 0.03,
               "--out", tmp_path) == 0
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert len(m["per_split"]) == 30
    assert {s["n_test"] for s in m["per_split"]} == {30}
    assert {s["n_train"] for s in m["per_split"]} == {970}


def test_ingest_step_file(tmp_path):
    with pytest.warns(SkippedEntityWarning) as rec:
        assert run("ingest", DATA / "one_room.ifc", "--out", tmp_path) == 0
    assert len(rec) == 5
    doc = json.loads((tmp_path / "model.json").read_text())
    assert len(doc["spaces"]) == 1 and doc["objects"][0]["kind"] == "Door"


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"levels": []')
    assert run("ingest", bad, "--out", tmp_path) == 1
    assert run("ingest", tmp_path / "missing.json", "--out", tmp_path) == 2
    (tmp_path / "cfg.json").write_text('{"colour": 1}')
    assert run("simulate", "--config", tmp_path / "cfg.json", "--out", tmp_path) == 1
    assert run("discretize", "--out", tmp_path) == 1  # no model given anywhere
    err = capsys.readouterr().err
    assert "error" in err and "I/O error" in err


def test_paths_table_resolves_relative_to_config(workdir, tmp_path):
    cfg = {"paths": {"model": os.path.relpath(workdir / "model.json", tmp_path)}}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert run("discretize", "--config", tmp_path / "c.json", "--out", tmp_path) == 0
    assert (tmp_path / "cells.csv").read_bytes() == (workdir / "cells.csv").read_bytes()


def test_evaluate_twice_is_byte_identical(tmp_path):
    (tmp_path / "config.json").write_text(json.dumps(SMALL_CONFIG))
    outs = []
    for name in ("a", "b"):
        assert run("evaluate", "--config", tmp_path / "config.json", "--out", tmp_path / name) == 0
        outs.append(tmp_path / name)
    for f in ("report.json", "report.txt", "embedding.tsv"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
    report = json.loads((outs[0] / "report.json").read_text())
    assert {tuple(r["groups"]) for r in report["results"]} >= {("time", "env"), ("embedding", "hr", "nbt")}
    assert sorted(p.name for p in (outs[0] / "similarity").iterdir()) == sorted(f"{a}.geojson" for a in report["anchors"])
