"""Command-line front end: one subcommand per pipeline stage, files in between.

Exit codes: 0 success, 1 invalid input, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from dataclasses import fields, replace
from pathlib import Path

from .classifier import (ForestParams, assemble_features, cross_validate, load_forest, make_split_plan,
                         read_records, recommend_cells, save_forest, train_forest, write_records)
from .classifier.records import FeedbackRecord, read_feedback
from .embedding import EmbeddingMatrix, random_walks, similarity_geojson, similarity_map, train_skipgram
from .embedding.similarity import write_geojson, write_similarity_csv
from .errors import ConfigError, ValidationError
from .graph import build_graph, discretize
from .graph.io import read_adjacency, read_cells, write_adjacency, write_cells, write_census
from .graph.linking import CellLocator, LocatedEvent, link_feedback
from .harness.config import load_config, scene_config_from
from .harness.evaluate import evaluate, format_report
from .harness.io import read_sim, write_sim
from .harness.pipeline import PipelineParams, stage_seeds
from .harness.scene import generate_scene
from .harness.simulate import simulate_occupants
from .localization import PreprocessConfig, preprocess_stream, read_fixes
from .spatial import parse_floorplan, parse_ifc_subset, serialize_floorplan
from .spatial.model import SpatialModel

log = logging.getLogger("comfortgraph")

SIM_KEYS = ("n_users", "days", "votes_per_day", "noise_sigma", "aoi_bias", "home_share", "onboarding_answers",
            "fix_interval")
CONFIG_KEYS = {"seed", "scene", "simulation", "pipeline", "aoi_overrides", "paths"}


class Context:
    """Parsed ``--config`` file plus the effective root seed and output directory."""

    def __init__(self, args):
        self.doc = load_config(args.config) if args.config else {}
        unknown = set(self.doc) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        self.seed = args.seed if args.seed is not None else int(self.doc.get("seed", 0))
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        self.out = Path(args.out)
        self.config_dir = Path(args.config).parent if args.config else Path(".")

    def path(self, args, key: str) -> Path:
        """Input path from a flag, else from the config's ``paths`` table."""
        value = getattr(args, key, None) or self.doc.get("paths", {}).get(key)
        if value is None:
            raise ValidationError(f"missing input: pass --{key.replace('_', '-')} or set paths.{key}")
        p = Path(value) if getattr(args, key, None) else self.config_dir / value
        if not p.exists():
            raise FileNotFoundError(f"input not found: {p}")
        return p

    def pipeline(self) -> PipelineParams:
        raw = dict(self.doc.get("pipeline", {}))
        forest = ForestParams(**_checked(raw.pop("forest", {}), ForestParams, "pipeline.forest"))
        return PipelineParams(forest=forest, **_checked(raw, PipelineParams, "pipeline"))

    def simulation(self) -> dict:
        raw = dict(self.doc.get("simulation", {}))
        bad = set(raw) - set(SIM_KEYS)
        if bad:
            raise ConfigError(f"unknown simulation keys {sorted(bad)}")
        return raw

    def outfile(self, name: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out / name


def _checked(raw: dict, cls, where: str) -> dict:
    names = {f.name for f in fields(cls)}
    bad = set(raw) - names
    if bad:
        raise ConfigError(f"unknown {where} keys {sorted(bad)}")
    return raw


def _apply_aoi_overrides(model: SpatialModel, overrides: dict) -> SpatialModel:
    if not overrides:
        return model
    known = {o.id for o in model.objects}
    missing = set(overrides) - known
    if missing:
        raise ConfigError(f"AoI overrides name unknown objects {sorted(missing)}")
    objs = tuple(replace(o, aoi_params={**o.aoi_params, **overrides[o.id]}) if o.id in overrides else o
                 for o in model.objects)
    return SpatialModel(model.levels, model.spaces, objs, model.transform)


def _load_model(ctx: Context, args) -> SpatialModel:
    path = ctx.path(args, "model")
    return _apply_aoi_overrides(parse_floorplan(path.read_bytes()), ctx.doc.get("aoi_overrides", {}))


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- stages

def cmd_ingest(ctx: Context, args) -> None:
    src = Path(args.input)
    data = src.read_bytes()
    if src.suffix.lower() in (".ifc", ".stp", ".step"):
        model = parse_ifc_subset(data.decode("utf-8", errors="strict"))
    else:
        model = parse_floorplan(data)
    model = _apply_aoi_overrides(model, ctx.doc.get("aoi_overrides", {}))
    ctx.outfile("model.json").write_text(serialize_floorplan(model), encoding="utf-8")
    print(f"{len(model.levels)} levels, {len(model.spaces)} spaces, {len(model.objects)} objects")


def cmd_discretize(ctx: Context, args) -> None:
    model = _load_model(ctx, args)
    size = args.cell_size if args.cell_size is not None else ctx.pipeline().cell_size
    cells = discretize(model, size)
    write_cells(cells, ctx.outfile("cells.csv"))
    print(f"{len(cells)} cells")


def cmd_build_graph(ctx: Context, args) -> None:
    model = _load_model(ctx, args)
    cells = read_cells(ctx.path(args, "cells"))
    g = build_graph(model, cells, cell_adjacency=not args.no_cell_adjacency)
    if args.records or ctx.doc.get("paths", {}).get("records"):
        records = read_records(ctx.path(args, "records"))
        personalities = _read_personalities(ctx.path(args, "personalities")) if args.personalities else {}
        where = {c.id: c for c in cells}
        unknown = sorted({r.cell_id for r in records} - set(where))
        if unknown:
            raise ValidationError(f"records reference unknown cells, e.g. {unknown[0]}")
        events = [LocatedEvent(r.user_id, r.timestamp, *where[r.cell_id].center, where[r.cell_id].level_id)
                  for r in records]
        g = link_feedback(g, events, CellLocator(cells, seed=stage_seeds(ctx.seed)["locator"]), personalities)
    write_adjacency(g, ctx.outfile("adjacency.tsv"))
    write_census(g, ctx.outfile("census.csv"))
    print(f"{len(g)} nodes, {len(g.canonical_edges())} edges")


def _read_personalities(path: Path) -> dict[str, int]:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            try:
                out[row["user_id"]] = int(row["personality"])
            except (KeyError, ValueError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad personality row ({exc})") from exc
    return out


def cmd_locate(ctx: Context, args) -> None:
    """Preprocess the fix stream; snap fixes (and feedback, if given) to cells."""
    model = _load_model(ctx, args)
    cells = read_cells(ctx.path(args, "cells"))
    locator = CellLocator(cells, seed=stage_seeds(ctx.seed)["locator"])
    floor_levels = {lv.number: lv.id for lv in model.levels}
    kept = preprocess_stream(read_fixes(ctx.path(args, "fixes")), PreprocessConfig())
    by_level: dict[str, list[int]] = {}
    for i, f in enumerate(kept):
        by_level.setdefault(floor_levels.get(f.floor, f"?{f.floor}"), []).append(i)
    snapped = [""] * len(kept)
    for lv, idx in by_level.items():
        xy = [model.transform.global_to_local(kept[i].lat, kept[i].lon) for i in idx]
        for i, c in zip(idx, locator.nearest_many(xy, lv)):
            snapped[i] = c
    with open(ctx.outfile("located.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "timestamp", "floor", "cell_id"])
        for f, c in zip(kept, snapped):
            w.writerow([f.user_id, repr(f.timestamp), f.floor, c])
    msg = f"{len(kept)} fixes kept"
    if args.feedback or ctx.doc.get("paths", {}).get("feedback"):
        rows = read_feedback(ctx.path(args, "feedback"))
        records = []
        for r in rows:
            if r.floor not in floor_levels:
                raise ValidationError(f"feedback from {r.user_id} at {r.timestamp} is on unknown floor {r.floor}")
            x, y = model.transform.global_to_local(r.lat, r.lon)
            cell = locator.nearest(x, y, floor_levels[r.floor])
            records.append(FeedbackRecord(r.user_id, r.timestamp, cell, r.label, r.heart_rate, r.near_body_temp))
        write_records(records, ctx.outfile("records.csv"))
        msg += f", {len(records)} votes linked"
    print(msg)


def cmd_embed(ctx: Context, args) -> None:
    p = ctx.pipeline()
    seeds = stage_seeds(ctx.seed)
    g = read_adjacency(ctx.path(args, "adjacency"))
    corpus = random_walks(g, p.walks_per_node, p.walk_length, seeds["walks"])
    emb = train_skipgram(corpus, p.dim, p.window, p.negatives, p.epochs, seed=seeds["skipgram"],
                         workers=args.workers)
    emb.write_tsv(ctx.outfile("embedding.tsv"))
    print(f"{len(emb.node_ids)} vectors of dim {emb.dim}, final loss {emb.final_loss:.4f}")


def cmd_similarity_map(ctx: Context, args) -> None:
    model = _load_model(ctx, args)
    cells = read_cells(ctx.path(args, "cells"))
    emb = EmbeddingMatrix.read_tsv(ctx.path(args, "embedding"))
    rows = similarity_map(emb, args.anchor, cells)
    write_geojson(similarity_geojson(rows, cells, model.transform, anchor=args.anchor, normalize=args.normalize),
                  ctx.outfile(f"similarity_{args.anchor}.geojson"))
    write_similarity_csv(rows, cells, ctx.outfile(f"similarity_{args.anchor}.csv"), normalize=args.normalize)
    print(f"{len(rows)} cells scored against {args.anchor}")


def _dataset(ctx: Context, args):
    emb = EmbeddingMatrix.read_tsv(ctx.path(args, "embedding"))
    records = read_records(ctx.path(args, "records"))
    return assemble_features(records, emb), emb


def cmd_train(ctx: Context, args) -> None:
    ds, _ = _dataset(ctx, args)
    model = train_forest(ds, params=ctx.pipeline().forest, seed=stage_seeds(ctx.seed)["forest"])
    save_forest(model, ctx.out)
    print(f"{len(model.trees)} trees on {len(ds)} rows")


def cmd_cross_validate(ctx: Context, args) -> None:
    p = ctx.pipeline()
    ds, _ = _dataset(ctx, args)
    seeds = stage_seeds(ctx.seed)
    n_splits = args.splits if args.splits is not None else p.n_splits
    frac = args.test_fraction if args.test_fraction is not None else p.test_fraction
    plan = make_split_plan(len(ds), n_splits, frac, seeds["splits"])
    metrics = cross_validate(ds, plan, p.forest, seeds["forest"])
    _write_json(ctx.outfile("metrics.json"), metrics)
    print(f"{len(plan)} splits x {plan.test_size} test rows: mean test accuracy "
          f"{metrics['mean_test_accuracy']:.3f} (sd {metrics['sd_test_accuracy']:.3f})")


def cmd_recommend(ctx: Context, args) -> None:
    model = load_forest(ctx.path(args, "forest"))
    emb = EmbeddingMatrix.read_tsv(ctx.path(args, "embedding"))
    cells = read_cells(ctx.path(args, "cells"))
    ranked = recommend_cells(model, emb, cells, args.hr, args.temp, args.top)
    with open(ctx.outfile("recommendations.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "cell_id", "p_no_preference"])
        for i, (c, s) in enumerate(ranked, start=1):
            w.writerow([i, c, repr(s)])
            print(f"{i:>3}  {c}  {s:.3f}")


def _scene(ctx: Context):
    return scene_config_from(ctx.doc.get("scene"), seed=ctx.seed)


def cmd_simulate(ctx: Context, args) -> None:
    cfg = _scene(ctx)
    model, fld = generate_scene(cfg)
    sim = simulate_occupants(model, fld, seed=ctx.seed, cell_size=cfg.cell_size, **ctx.simulation())
    ctx.outfile("model.json").write_text(serialize_floorplan(model), encoding="utf-8")
    write_cells(fld.cells, ctx.outfile("cells.csv"))
    write_sim(sim, ctx.out)
    _write_json(ctx.outfile("scene.json"), {"scene": cfg.to_dict(), "census": fld.composition})
    print(f"{len(fld.cells)} cells, {len(sim.archetypes)} users, {len(sim.votes)} votes, {len(sim.fixes)} fixes")


def cmd_evaluate(ctx: Context, args) -> None:
    cfg = _scene(ctx)
    model, fld = generate_scene(cfg)
    if args.sim:
        sim = read_sim(args.sim)
    else:
        sim = simulate_occupants(model, fld, seed=ctx.seed, cell_size=cfg.cell_size, **ctx.simulation())
    report = evaluate(sim, model, fld, ctx.pipeline(), ctx.seed, out_dir=ctx.out, scene_name=cfg.name)
    sys.stdout.write(format_report(report))


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config (JSON; TOML on Python 3.11+)")
    common.add_argument("--seed", type=int, help="root seed (default: config seed, else 0)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="comfortgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, "parse a floor-plan JSON or IFC/STEP file into model.json")
    p.add_argument("input")
    p = add("discretize", cmd_discretize, "split spaces into lattice cells (cells.csv)")
    p.add_argument("--model")
    p.add_argument("--cell-size", type=float)
    p = add("build-graph", cmd_build_graph, "assemble the attributed graph (adjacency.tsv, census.csv)")
    p.add_argument("--model")
    p.add_argument("--cells")
    p.add_argument("--records", help="linked feedback to attach as Feedback nodes")
    p.add_argument("--personalities", help="CSV user_id,personality")
    p.add_argument("--no-cell-adjacency", action="store_true", help="drop cell-cell lattice edges")
    p = add("locate", cmd_locate, "preprocess fixes and snap fixes/votes to cells")
    p.add_argument("--model")
    p.add_argument("--cells")
    p.add_argument("--fixes")
    p.add_argument("--feedback")
    p = add("embed", cmd_embed, "random walks + skip-gram over adjacency.tsv (embedding.tsv)")
    p.add_argument("--adjacency")
    p.add_argument("--workers", type=int, default=1)
    p = add("similarity-map", cmd_similarity_map, "cosine similarity of every cell to an anchor cell")
    p.add_argument("--model")
    p.add_argument("--cells")
    p.add_argument("--embedding")
    p.add_argument("--anchor", required=True)
    p.add_argument("--normalize", action="store_true", help="rescale similarities to [0, 1]")
    p = add("train", cmd_train, "fit the random forest on embedding + physiology features")
    p.add_argument("--embedding")
    p.add_argument("--records")
    p = add("cross-validate", cmd_cross_validate, "repeated shuffled hold-out evaluation (metrics.json)")
    p.add_argument("--embedding")
    p.add_argument("--records")
    p.add_argument("--splits", type=int)
    p.add_argument("--test-fraction", type=float)
    p = add("recommend", cmd_recommend, "rank cells by predicted probability of no preference")
    p.add_argument("--forest", help="directory written by `train`")
    p.add_argument("--embedding")
    p.add_argument("--cells")
    p.add_argument("--hr", type=float, required=True)
    p.add_argument("--temp", type=float, required=True)
    p.add_argument("--top", type=int, default=10)
    add("simulate", cmd_simulate, "generate a synthetic scene and occupant study")
    p = add("evaluate", cmd_evaluate, "full synthetic comparison against the baseline feature sets")
    p.add_argument("--sim", help="reuse a directory written by `simulate`")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            ctx = Context(args)
            args.func(ctx, args)
    except ValidationError as exc:
        print(f"comfortgraph {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, UnicodeDecodeError) as exc:
        print(f"comfortgraph {args.command}: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
