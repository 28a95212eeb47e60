"""End-to-end comparison report: Build2Vec features against the baseline sets."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from ..classifier.validation import make_split_plan
from ..embedding.similarity import similarity_geojson, similarity_map, write_geojson
from ..spatial.model import SpatialModel
from .baselines import BASELINES, BUILD2VEC, GROUP_TITLES, GROUPS, run_baselines, set_name
from .coherence import aoi_similarity_gap, choose_anchors, hop_similarity_spearman
from .pipeline import Artifacts, PipelineParams, run_pipeline, stage_seeds
from .scene import ComfortField
from .simulate import SimOutput

ENV_BASELINE = ("time", "env")


def _paired(a: Sequence[float], b: Sequence[float]) -> dict:
    d = np.asarray(a) - np.asarray(b)
    sd = float(d.std(ddof=1)) if len(d) > 1 else 0.0
    half = 1.96 * sd / math.sqrt(len(d)) if len(d) > 1 else 0.0
    return {"mean": float(d.mean()), "sd": sd, "ci95": [float(d.mean() - half), float(d.mean() + half)]}


def evaluate(sim: SimOutput, model: SpatialModel, fld: ComfortField, params: PipelineParams = PipelineParams(),
             seed: int = 0, out_dir=None, feature_sets: Sequence[Sequence[str]] | None = None,
             artifacts: Artifacts | None = None, scene_name: str = "") -> dict:
    """Run the pipeline and the feature-set comparison; optionally write report files.

    ``feature_sets`` defaults to Build2Vec plus every baseline set. The
    Build2Vec and {time, env} sets are always included.
    """
    seeds = stage_seeds(seed)
    arts = artifacts or run_pipeline(model, sim, params, seed, cells=fld.cells)
    sets = [tuple(s) for s in (feature_sets or BASELINES)]
    for must in (ENV_BASELINE, BUILD2VEC):
        if must not in sets:
            sets.append(must)
    sets.sort(key=lambda s: (s == BUILD2VEC, BASELINES.index(s) if s in BASELINES else len(BASELINES)))
    plan = make_split_plan(len(sim.votes), params.n_splits, params.test_fraction, seeds["splits"])
    cell_space = {c.id: c.space_id for c in arts.cells}
    rows = run_baselines(sim, model, arts.vote_cells, cell_space, plan, params.forest, seeds["forest"], sets,
                         arts.emb)
    b2v = next(r for r in rows if r["groups"] == list(BUILD2VEC))
    for r in rows:
        r["build2vec_gain_points"] = 100.0 * (b2v["mean_test_accuracy"] - r["mean_test_accuracy"]) + 0.0
        r["build2vec_gain_percent"] = (100.0 * (b2v["mean_test_accuracy"] / r["mean_test_accuracy"] - 1.0)
                                       if r["mean_test_accuracy"] > 0 else None)
    env = next(r for r in rows if r["groups"] == list(ENV_BASELINE))

    truth_cells = [t.cell_id for t in sim.truth]
    anchors = choose_anchors(fld, model)
    report = {
        "scene": scene_name,
        "seed": seed,
        "n_users": len(sim.archetypes),
        "n_votes": len(sim.votes),
        "n_fixes": len(sim.fixes),
        "n_cells": len(arts.cells),
        "census": dict(sorted(arts.graph.census().items())),
        "label_counts": np.bincount([int(v.label) for v in sim.votes], minlength=3).tolist(),
        "majority_rate": float(np.bincount([int(v.label) for v in sim.votes], minlength=3).max() / len(sim.votes)),
        "link_accuracy": float(np.mean([a == b for a, b in zip(truth_cells, arts.vote_cells)])),
        "bayes_cell_accuracy": float(np.mean([max(t.probabilities) for t in sim.truth])),
        "split_plan": {"n_splits": len(plan), "test_fraction": plan.test_fraction, "test_size": plan.test_size},
        "pipeline": params.to_dict(),
        "embedding_final_loss": arts.emb.final_loss,
        "results": rows,
        "build2vec_vs_env": _paired(b2v["per_split_test_accuracy"], env["per_split_test_accuracy"]),
        "coherence": {
            "aoi_similarity": aoi_similarity_gap(arts.emb, fld, seed),
            "hop_spearman": hop_similarity_spearman(arts.graph, arts.emb, anchors, fld.cell_ids),
        },
        "anchors": anchors,
    }
    if out_dir is not None:
        write_outputs(report, arts, model, Path(out_dir))
    return report


def write_outputs(report: dict, arts: Artifacts, model: SpatialModel, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "similarity").mkdir(exist_ok=True)
    arts.emb.write_tsv(out / "embedding.tsv")
    for a in report["anchors"]:
        rows = similarity_map(arts.emb, a, arts.cells)
        write_geojson(similarity_geojson(rows, arts.cells, model.transform, anchor=a), out / "similarity" / f"{a}.geojson")
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
        fh.write("\n")
    (out / "report.txt").write_text(format_report(report), encoding="utf-8")


def format_report(report: dict) -> str:
    """Check-mark table in the layout of the original comparison, plus summary lines."""
    titles = [GROUP_TITLES[g] for g in GROUPS]
    head = "  ".join(f"{t:>9}" for t in titles) + f"  {'accuracy':>9}  {'sd':>6}  {'b2v gain':>9}  {'reported':>8}"
    lines = [f"scene: {report['scene'] or '-'}   seed: {report['seed']}   users: {report['n_users']}   "
             f"votes: {report['n_votes']}   cells: {report['n_cells']}",
             f"splits: {report['split_plan']['n_splits']} x {report['split_plan']['test_size']} test rows   "
             f"majority rate: {report['majority_rate']:.3f}   vote linkage: {report['link_accuracy']:.3f}",
             "", f"{'feature set':<30}" + head, "-" * (30 + len(head))]
    for r in report["results"]:
        marks = "  ".join(f"{'x' if g in r['groups'] else '':>9}" for g in GROUPS)
        ref = f"{r['reference_accuracy']:.2f}" if r["reference_accuracy"] is not None else "-"
        lines.append(f"{set_name(r['groups']):<30}{marks}  {r['mean_test_accuracy']:>9.3f}  "
                     f"{r['sd_test_accuracy']:>6.3f}  {r['build2vec_gain_points']:>+9.1f}  {ref:>8}")
    pv = report["build2vec_vs_env"]
    coh = report["coherence"]
    lines += ["",
              f"build2vec - time+env (paired over splits): {pv['mean']:+.3f}  "
              f"95% CI [{pv['ci95'][0]:+.3f}, {pv['ci95'][1]:+.3f}]",
              f"AoI similarity: within {coh['aoi_similarity']['within']:.3f}  "
              f"between {coh['aoi_similarity']['between']:.3f}  gap {coh['aoi_similarity']['gap']:+.3f}",
              f"hop distance vs similarity, mean Spearman rho: {coh['hop_spearman']['mean_rho']:+.3f}",
              f"similarity maps: {', '.join(report['anchors'])}", ""]
    return "\n".join(lines)
