"""Occupant trajectories, location fixes, votes and per-space sensor series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..classifier.records import FeedbackRow, Preference
from ..embedding.walks import derive_seeds
from ..errors import ValidationError
from ..localization import ACCURACY_RANGE, LocationFix
from ..spatial.model import SpatialModel, VentilationMode
from .population import ARCHETYPES
from .scene import ComfortField

T0 = 1578268800.0  # Monday 2020-01-06 00:00 UTC
DAY = 86400.0
OFFICE_HOURS = (9.0, 18.0)
SENSOR_INTERVAL = 600.0

# (air temperature degC, relative humidity %) daily means per mode
MODE_ENV = {VentilationMode.NV: (30.5, 72.0), VentilationMode.HC: (27.5, 62.0),
            VentilationMode.AC: (24.0, 55.0), VentilationMode.MV: (29.0, 68.0)}


@dataclass(frozen=True)
class VoteTruth:
    user_id: str
    timestamp: float
    cell_id: str
    archetype: int
    probabilities: tuple[float, float, float]


@dataclass(frozen=True)
class SensorReading:
    space_id: str
    timestamp: float
    air_temp: float
    rel_humidity: float
    noise_db: float
    lux: float


@dataclass
class SimOutput:
    fixes: list[LocationFix]
    votes: list[FeedbackRow]
    truth: list[VoteTruth]
    sensors: list[SensorReading]
    archetypes: dict[str, int]
    onboarding: dict[str, list[int]]
    params: dict = field(default_factory=dict)

    def sensor_lookup(self) -> dict[str, dict[float, SensorReading]]:
        out: dict[str, dict[float, SensorReading]] = {}
        for r in self.sensors:
            out.setdefault(r.space_id, {})[r.timestamp] = r
        return out


def workday_start(d: int) -> float:
    """Midnight of the d-th working day (weekends skipped)."""
    return T0 + (d + 2 * (d // 5)) * DAY


def user_id(i: int) -> str:
    return f"U{i + 1:02d}"


def sensor_series(model: SpatialModel, days: int, seed: int) -> list[SensorReading]:
    """One virtual sensor per space, sampled every ten minutes over whole days."""
    out = []
    seeds = derive_seeds(seed, len(model.spaces), stream=31)
    for sp, s in zip(model.spaces, seeds):
        rng = np.random.default_rng(int(s))
        temp0, rh0 = MODE_ENV[sp.ventilation_mode]
        daylight = 500.0 if sp.ventilation_mode is VentilationMode.NV else 250.0
        for d in range(days):
            t = workday_start(d) + np.arange(0.0, DAY, SENSOR_INTERVAL)
            h = (t - workday_start(d)) / 3600.0
            swing = np.sin(2 * np.pi * (h - 9.0) / 24.0)
            occupied = (h >= OFFICE_HOURS[0]) & (h < OFFICE_HOURS[1])
            temp = temp0 + 1.5 * swing + rng.normal(0, 0.3, len(t))
            rh = rh0 - 5.0 * swing + rng.normal(0, 2.0, len(t))
            noise = 42.0 + 8.0 * occupied + rng.normal(0, 3.0, len(t))
            sun = np.clip(np.sin(np.pi * (h - 7.0) / 12.0), 0, None)
            lux = np.clip(daylight * sun + 300.0 * occupied + rng.normal(0, 30.0, len(t)), 0, None)
            out.extend(SensorReading(sp.id, float(t[i]), float(temp[i]), float(rh[i]), float(noise[i]),
                                     float(lux[i])) for i in range(len(t)))
    return out


def _pick_cell(rng: np.random.Generator, aoi_idx: np.ndarray, other_idx: np.ndarray, aoi_bias: float) -> int:
    pool = aoi_idx if (len(aoi_idx) and (rng.random() < aoi_bias or not len(other_idx))) else other_idx
    return int(pool[rng.integers(0, len(pool))])


def simulate_occupants(model: SpatialModel, fld: ComfortField, n_users: int = 30, days: int = 14,
                       seed: int = 0, votes_per_day: int = 4, noise_sigma: float = 0.5,
                       aoi_bias: float = 0.6, home_share: float = 0.7, onboarding_answers: int = 40,
                       fix_interval: float = 120.0, cell_size: float = 1.0) -> SimOutput:
    """Dwell-based trajectories with one vote per dwell.

    Each user has a home cell (inside an AoI with probability ``aoi_bias``) and
    returns to it for ``home_share`` of visits. A dwell yields fixes every
    ``fix_interval`` seconds at the true position plus Gaussian noise; the vote
    carries the running mean of the dwell's fixes, as a watch app would report.
    """
    if n_users < 1:
        raise ValidationError("n_users must be >= 1")
    if days < 1 or votes_per_day < 1:
        raise ValidationError("days and votes_per_day must be >= 1")
    if noise_sigma < 0:
        raise ValidationError("noise_sigma must be >= 0")
    transform = model.transform
    level_number = {lv.id: lv.number for lv in model.levels}
    elevation = {lv.id: lv.elevation for lv in model.levels}
    cells = fld.cells
    in_aoi = fld.in_aoi
    aoi_idx, other_idx = np.flatnonzero(in_aoi), np.flatnonzero(~in_aoi)
    probs_by_arch = {}
    accuracy = min(max(2.0 * noise_sigma, ACCURACY_RANGE[0]), ACCURACY_RANGE[1])
    slot = (OFFICE_HOURS[1] - OFFICE_HOURS[0]) * 3600.0 / votes_per_day
    fixes, votes, truth = [], [], []
    archetypes, onboarding = {}, {}
    for u, s in enumerate(derive_seeds(seed, n_users, stream=21)):
        rng = np.random.default_rng(int(s))
        uid = user_id(u)
        arch = ARCHETYPES[u % len(ARCHETYPES)]
        archetypes[uid] = arch.index
        onboarding[uid] = rng.multinomial(onboarding_answers, arch.onboarding).tolist()
        if arch.index not in probs_by_arch:
            probs_by_arch[arch.index] = fld.for_personality(arch.index)
        probs = probs_by_arch[arch.index]
        home = _pick_cell(rng, aoi_idx, other_idx, aoi_bias)
        hr_mu, hr_sd = arch.heart_rate
        tb_mu, tb_sd = arch.near_body_temp
        for d in range(days):
            for v in range(votes_per_day):
                ci = home if rng.random() < home_share else _pick_cell(rng, aoi_idx, other_idx, aoi_bias)
                cell = cells[ci]
                dwell = float(rng.uniform(15, 45)) * 60.0
                start = workday_start(d) + OFFICE_HOURS[0] * 3600.0 + v * slot
                arrive = math.floor(start + float(rng.uniform(0, slot - dwell)))
                n_fix = max(int(dwell // fix_interval), 1)
                # seated somewhere within the cell, fixed for the whole dwell
                px = cell.center[0] + float(rng.uniform(-0.25, 0.25)) * cell_size
                py = cell.center[1] + float(rng.uniform(-0.25, 0.25)) * cell_size
                xy = np.column_stack([px + rng.normal(0, noise_sigma, n_fix) if noise_sigma else np.full(n_fix, px),
                                      py + rng.normal(0, noise_sigma, n_fix) if noise_sigma else np.full(n_fix, py)])
                ll = transform.local_to_global_many(xy)
                ts = arrive + fix_interval * np.arange(n_fix)
                floor = level_number[cell.level_id]
                for k in range(n_fix):
                    fixes.append(LocationFix(uid, float(ll[k, 0]), float(ll[k, 1]), elevation[cell.level_id],
                                             floor, float(ts[k]), accuracy))
                k = int(rng.integers(min(4, n_fix - 1), n_fix))
                lat, lon = transform.local_to_global(*xy[: k + 1].mean(axis=0))
                p = probs[ci]
                label = Preference(int(rng.choice(3, p=p)))
                hr = float(np.clip(rng.normal(hr_mu, hr_sd), 40.0, 180.0))
                tb = float(np.clip(rng.normal(tb_mu, tb_sd), 20.0, 40.0))
                votes.append(FeedbackRow(uid, float(ts[k]), lat, lon, floor, label, round(hr, 1), round(tb, 2)))
                truth.append(VoteTruth(uid, float(ts[k]), cell.id, arch.index, tuple(float(x) for x in p)))
    order = sorted(range(len(votes)), key=lambda i: (votes[i].timestamp, votes[i].user_id))
    votes = [votes[i] for i in order]
    truth = [truth[i] for i in order]
    fixes.sort(key=lambda f: (f.timestamp, f.user_id))
    params = {"n_users": n_users, "days": days, "seed": seed, "votes_per_day": votes_per_day,
              "noise_sigma": noise_sigma, "aoi_bias": aoi_bias, "home_share": home_share,
              "onboarding_answers": onboarding_answers, "fix_interval": fix_interval}
    return SimOutput(fixes, votes, truth, sensor_series(model, days, seed), archetypes, onboarding, params)
