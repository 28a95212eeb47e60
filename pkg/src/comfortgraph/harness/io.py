"""Simulation outputs on disk: CSV tables plus a parameter header."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..classifier.records import read_feedback, write_feedback
from ..errors import ValidationError
from ..localization import read_fixes, write_fixes
from .simulate import SensorReading, SimOutput, VoteTruth

SENSOR_HEADER = ["space_id", "timestamp", "air_temp", "rel_humidity", "noise_db", "lux"]
TRUTH_HEADER = ["user_id", "timestamp", "cell_id", "archetype", "p_cooler", "p_neutral", "p_warmer"]
ONBOARDING_HEADER = ["user_id", "archetype", "n_cooler", "n_neutral", "n_warmer"]


def write_sim(sim: SimOutput, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_fixes(sim.fixes, d / "fixes.csv")
    write_feedback(sim.votes, d / "feedback.csv")
    with open(d / "sensors.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SENSOR_HEADER)
        for r in sim.sensors:
            w.writerow([r.space_id, repr(r.timestamp), repr(r.air_temp), repr(r.rel_humidity), repr(r.noise_db),
                        repr(r.lux)])
    with open(d / "truth.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRUTH_HEADER)
        for t in sim.truth:
            w.writerow([t.user_id, repr(t.timestamp), t.cell_id, t.archetype, *map(repr, t.probabilities)])
    with open(d / "onboarding.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ONBOARDING_HEADER)
        for u in sorted(sim.onboarding):
            w.writerow([u, sim.archetypes[u], *sim.onboarding[u]])
    (d / "simulation.json").write_text(json.dumps(sim.params, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _rows(path, header):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(header) - set(reader.fieldnames or [])
        if missing:
            raise ValidationError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            yield lineno, row


def read_sim(directory) -> SimOutput:
    d = Path(directory)
    try:
        sensors = [SensorReading(r["space_id"], float(r["timestamp"]), float(r["air_temp"]),
                                 float(r["rel_humidity"]), float(r["noise_db"]), float(r["lux"]))
                   for _, r in _rows(d / "sensors.csv", SENSOR_HEADER)]
        truth = [VoteTruth(r["user_id"], float(r["timestamp"]), r["cell_id"], int(r["archetype"]),
                           (float(r["p_cooler"]), float(r["p_neutral"]), float(r["p_warmer"])))
                 for _, r in _rows(d / "truth.csv", TRUTH_HEADER)]
        archetypes, onboarding = {}, {}
        for _, r in _rows(d / "onboarding.csv", ONBOARDING_HEADER):
            archetypes[r["user_id"]] = int(r["archetype"])
            onboarding[r["user_id"]] = [int(r["n_cooler"]), int(r["n_neutral"]), int(r["n_warmer"])]
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"{d}: {exc}") from exc
    params = json.loads((d / "simulation.json").read_text(encoding="utf-8"))
    return SimOutput(read_fixes(d / "fixes.csv"), read_feedback(d / "feedback.csv"), truth, sensors, archetypes,
                     onboarding, params)
