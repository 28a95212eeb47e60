import numpy as np
import pytest

from comfortgraph.classifier import ForestParams, make_split_plan, recommend_cells, train_forest
from comfortgraph.classifier.dataset import assemble_features
from comfortgraph.classifier.personality import cluster_personalities
from comfortgraph.errors import ConfigError, ValidationError
from comfortgraph.graph import build_graph
from comfortgraph.harness.baselines import run_baselines
from comfortgraph.harness.config import SceneConfig, SpaceSpec, default_config, homogeneous_config, scene_config_from
from comfortgraph.harness.evaluate import format_report
from comfortgraph.harness.io import read_sim, write_sim
from comfortgraph.harness.pipeline import PipelineParams, run_pipeline
from comfortgraph.harness.population import ARCHETYPES
from comfortgraph.harness.scene import build_model, generate_scene
from comfortgraph.harness.simulate import simulate_occupants
from comfortgraph.spatial import serialize_floorplan

from conftest import small_scene_config


def ari(a, b):
    from sklearn.metrics import adjusted_rand_score
    return adjusted_rand_score(a, b)


@pytest.fixture(scope="module")
def small():
    m, f = generate_scene(small_scene_config())
    sim = simulate_occupants(m, f, n_users=30, days=14, seed=1)
    arts = run_pipeline(m, sim, PipelineParams(walks_per_node=10), seed=1, cells=f.cells)
    return m, f, sim, arts


# ---- configuration and scene

def test_config_validation():
    with pytest.raises(ConfigError):
        SceneConfig(spaces=())
    with pytest.raises(ConfigError):
        SceneConfig(spaces=(SpaceSpec("x", 10, 10, "XX"),))
    with pytest.raises(ConfigError):
        SceneConfig(spaces=(SpaceSpec("x", 10, 0, "HC"),))
    with pytest.raises(ConfigError):
        SceneConfig(spaces=(SpaceSpec("x", 10, 10, "HC", fans=-1),))
    with pytest.raises(ConfigError):
        SceneConfig(spaces=(SpaceSpec("x", 4, 10, "NV", windows=1),), window_length=6.0)
    with pytest.raises(ConfigError, match="unknown"):
        scene_config_from({"spaces": [], "colour": 1})
    with pytest.raises(ConfigError, match="preset"):
        scene_config_from({"preset": "attic"})


def test_config_dict_roundtrip_and_presets():
    cfg = small_scene_config()
    assert SceneConfig.from_dict(cfg.to_dict()) == cfg
    assert scene_config_from({"preset": "homogeneous"}, seed=4) == homogeneous_config(4)
    assert scene_config_from(None) == default_config()


def test_default_census():
    g = build_graph(build_model(default_config()), [])
    census = g.census()
    assert census["Space"] == 5 and census["Fan"] == 9 and census["AirCond"] == 15


def test_same_seed_same_scene_file():
    a = serialize_floorplan(build_model(default_config(3)))
    assert a == serialize_floorplan(build_model(default_config(3)))
    assert a != serialize_floorplan(build_model(default_config(4)))


def test_homogeneous_field_is_flat_within_mode():
    m, f = generate_scene(homogeneous_config())
    assert not f.in_aoi.any()
    for arch in (0, 5, 9):
        p = f.for_personality(arch)
        assert np.allclose(p, p[0])


def test_field_rows_are_distributions(small):
    _, f, _, _ = small
    for arch in range(len(ARCHETYPES)):
        p = f.for_personality(arch)
        assert np.all(p >= 0) and np.allclose(p.sum(axis=1), 1.0)
    assert set(f.aoi_class) >= {"fan", "window", "diffuser", "none"}


# ---- simulation

def test_user_count_and_archetypes(small):
    _, _, sim, _ = small
    assert len(sim.archetypes) == 30 and len(sim.onboarding) == 30
    assert {v.user_id for v in sim.votes} == set(sim.archetypes)
    assert len(sim.votes) == 30 * 14 * 4
    assert [v.timestamp for v in sim.votes] == sorted(v.timestamp for v in sim.votes)


def test_simulation_argument_checks():
    m, f = generate_scene(small_scene_config())
    with pytest.raises(ValidationError):
        simulate_occupants(m, f, n_users=0)
    with pytest.raises(ValidationError):
        simulate_occupants(m, f, noise_sigma=-1)


def test_noise_free_votes_link_to_true_cell():
    m, f = generate_scene(small_scene_config())
    sim = simulate_occupants(m, f, n_users=5, days=3, seed=2, noise_sigma=0.0)
    arts = run_pipeline(m, sim, PipelineParams(walks_per_node=2, walk_length=5, n_personalities=2), cells=f.cells)
    assert arts.vote_cells == [t.cell_id for t in sim.truth]


@pytest.mark.parametrize("sigma", [0.25, 0.5])
def test_linkage_rate_under_noise(sigma):
    m, f = generate_scene(small_scene_config())
    sim = simulate_occupants(m, f, n_users=10, days=5, seed=3, noise_sigma=sigma)
    arts = run_pipeline(m, sim, PipelineParams(walks_per_node=2, walk_length=5, n_personalities=2), cells=f.cells)
    rate = np.mean([a == t.cell_id for a, t in zip(arts.vote_cells, sim.truth)])
    assert rate >= 0.9


def test_vote_frequencies_converge_to_field():
    m, f = generate_scene(small_scene_config())
    sim = simulate_occupants(m, f, n_users=1, days=1000, votes_per_day=10, seed=0)
    by_cell = {}
    for v, t in zip(sim.votes, sim.truth):
        by_cell.setdefault(t.cell_id, []).append(int(v.label))
    home, labels = max(by_cell.items(), key=lambda kv: len(kv[1]))
    assert len(labels) > 5000
    freq = np.bincount(labels, minlength=3) / len(labels)
    (arch,) = sim.archetypes.values()
    want = f.cell_probabilities(home, ARCHETYPES[arch].sensitivity)
    assert np.abs(freq - want).max() < 0.05


def test_onboarding_recovers_archetypes(small):
    _, _, sim, _ = small
    users = sorted(sim.onboarding)
    got = cluster_personalities(sim.onboarding, len(ARCHETYPES), 0)
    assert ari([sim.archetypes[u] for u in users], [got[u] for u in users]) >= 0.6


def test_sim_io_roundtrip(small, tmp_path):
    _, _, sim, _ = small
    write_sim(sim, tmp_path)
    back = read_sim(tmp_path)
    assert back.votes == sim.votes and back.truth == sim.truth and back.fixes == sim.fixes
    assert back.onboarding == sim.onboarding and back.archetypes == sim.archetypes
    assert back.sensors == sim.sensors and back.params == sim.params


# ---- baselines and recommendation

def test_time_only_is_a_null_baseline(small):
    m, _, sim, arts = small
    y = np.array([int(v.label) for v in sim.votes])
    p = np.bincount(y, minlength=3) / len(y)
    plan = make_split_plan(len(y), 30, 0.03, 2)
    cell_space = {c.id: c.space_id for c in arts.cells}
    rows = run_baselines(sim, m, arts.vote_cells, cell_space, plan, ForestParams(n_trees=50), 3,
                         [("time",), ("time", "env")], arts.emb)
    time_only, with_env = rows
    # timestamps carry no signal: accuracy sits between chance agreement and the majority rate
    assert time_only["mean_test_accuracy"] <= p.max() + 0.03
    assert abs(time_only["mean_test_accuracy"] - float(p @ p)) <= 0.05
    # adding environment columns must not hurt by more than noise
    d = np.subtract(with_env["per_split_test_accuracy"], time_only["per_split_test_accuracy"])
    assert d.mean() >= -0.03


def test_recommendations_prefer_comfortable_cells(small):
    _, f, _, arts = small
    ds = assemble_features(arts.records, arts.emb)
    forest = train_forest(ds.X, ds.y, ForestParams(n_trees=50), seed=0)
    for arch in (0, 4, 9):
        a = ARCHETYPES[arch]
        top = recommend_cells(forest, arts.emb, f.cells, a.heart_rate[0], a.near_body_temp[0], 10)
        p_np = f.for_personality(arch)[:, 1]
        assert np.mean([p_np[f.index[c]] for c, _ in top]) >= p_np.mean()


def test_report_table_layout():
    row = {"groups": ["time", "env"], "mean_test_accuracy": 0.41, "sd_test_accuracy": 0.02,
           "build2vec_gain_points": 19.0, "reference_accuracy": 0.44}
    b2v = dict(row, groups=["embedding", "hr", "nbt"], mean_test_accuracy=0.6, build2vec_gain_points=0.0,
               reference_accuracy=0.61)
    report = {"scene": "s", "seed": 0, "n_users": 2, "n_votes": 10, "n_cells": 4, "majority_rate": 0.5,
              "link_accuracy": 1.0, "split_plan": {"n_splits": 30, "test_size": 1}, "results": [row, b2v],
              "build2vec_vs_env": {"mean": 0.19, "ci95": [0.1, 0.3]},
              "coherence": {"aoi_similarity": {"within": 0.5, "between": 0.2, "gap": 0.3},
                            "hop_spearman": {"mean_rho": -0.7}},
              "anchors": ["C1"]}
    text = format_report(report)
    lines = text.splitlines()
    table = [ln for ln in lines if ln.startswith(("time+env ", "build2vec ")) and ln.rstrip().endswith(("0.44", "0.61"))]
    assert len(table) == 2
    assert "+19.0" in text and "0.600" in text and "-0.700" in text
