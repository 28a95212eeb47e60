"""BLE ranging, trilateration, location-stream cleaning and cell snapping."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import CollinearBeacons, NoCellOnLevel, Underdetermined, ValidationError
from .graph.linking import CellLocator
from .spatial.model import CoordinateTransform

DEFAULT_P0 = -59.0
DEFAULT_PATH_LOSS = 2.0
ACCURACY_RANGE = (0.25, 5.0)


@dataclass(frozen=True)
class BeaconObservation:
    beacon_id: str
    x: float
    y: float
    rssi: float
    timestamp: float = 0.0

    def __post_init__(self):
        if not -120.0 <= self.rssi <= 0.0:
            raise ValidationError(f"rssi {self.rssi} dBm outside [-120, 0]")


@dataclass(frozen=True)
class LocationFix:
    user_id: str
    lat: float
    lon: float
    elevation: float
    floor: int
    timestamp: float
    accuracy: float


@dataclass(frozen=True)
class PreprocessConfig:
    max_accuracy: float = 5.0
    min_displacement: float = 0.5
    min_interval: float = 60.0


def rssi_to_distance(rssi: float, p0: float = DEFAULT_P0, path_loss_exp: float = DEFAULT_PATH_LOSS) -> float:
    """Log-distance path-loss inversion: ``10 ** ((p0 - rssi) / (10 n))``."""
    if path_loss_exp <= 0:
        raise ValidationError("path-loss exponent must be positive")
    return 10.0 ** ((p0 - rssi) / (10.0 * path_loss_exp))


def trilaterate_ranges(anchors: Sequence[Sequence[float]], ranges: Sequence[float],
                       iterations: int = 50) -> tuple[np.ndarray, float]:
    """Least-squares position from anchor ranges.

    The linearised system (each range equation minus the first) gives a start
    point; Gauss-Newton then minimises the sum of squared range errors. Returns
    (position, RMS range residual).
    """
    b = np.asarray(anchors, dtype=float)
    d = np.asarray(ranges, dtype=float)
    if len(b) < 3:
        raise Underdetermined(f"need at least 3 observations, got {len(b)}")
    A = 2.0 * (b[1:] - b[0])
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-9 * max(sv[0], 1.0):
        raise CollinearBeacons("beacon positions are collinear")
    rhs = d[0] ** 2 - d[1:] ** 2 + (b[1:] ** 2).sum(axis=1) - (b[0] ** 2).sum()
    x = np.linalg.lstsq(A, rhs, rcond=None)[0]
    for _ in range(iterations):
        diff = x - b
        dist = np.linalg.norm(diff, axis=1)
        dist = np.where(dist < 1e-12, 1e-12, dist)
        r = dist - d
        J = diff / dist[:, None]
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        x = x + step
        if np.linalg.norm(step) < 1e-12:
            break
    resid = np.linalg.norm(x - b, axis=1) - d
    return x, float(np.sqrt(np.mean(resid ** 2)))


def trilaterate(obs: Sequence[BeaconObservation], p0: float = DEFAULT_P0,
                path_loss_exp: float = DEFAULT_PATH_LOSS) -> tuple[tuple[float, float], float]:
    """Position and RMS range residual from >=3 beacon observations."""
    if len(obs) < 3:
        raise Underdetermined(f"need at least 3 observations, got {len(obs)}")
    ranges = [rssi_to_distance(o.rssi, p0, path_loss_exp) for o in obs]
    pos, resid = trilaterate_ranges([(o.x, o.y) for o in obs], ranges)
    return (float(pos[0]), float(pos[1])), resid


def accuracy_from_residual(residual: float) -> float:
    lo, hi = ACCURACY_RANGE
    return min(max(residual, lo), hi)


def _displacement_m(a: LocationFix, b: LocationFix) -> float:
    lat = math.radians((a.lat + b.lat) / 2)
    dn = (b.lat - a.lat) * 111_320.0
    de = (b.lon - a.lon) * 111_320.0 * math.cos(lat)
    return math.hypot(de, dn)


def preprocess_stream(fixes: Iterable[LocationFix], cfg: PreprocessConfig = PreprocessConfig()) -> list[LocationFix]:
    """Drop inaccurate fixes and thin near-duplicates, per user, without reordering.

    A fix is dropped when its accuracy exceeds ``cfg.max_accuracy``, when its
    timestamp does not advance, or when it lies within ``min_displacement`` of
    the last kept fix on the same floor *and* less than ``min_interval`` after it.
    """
    last: dict[str, LocationFix] = {}
    out = []
    for f in fixes:
        if f.accuracy > cfg.max_accuracy:
            continue
        prev = last.get(f.user_id)
        if prev is not None:
            if f.timestamp <= prev.timestamp:
                continue
            if (f.floor == prev.floor and _displacement_m(prev, f) < cfg.min_displacement
                    and f.timestamp - prev.timestamp < cfg.min_interval):
                continue
        last[f.user_id] = f
        out.append(f)
    return out


def snap_to_cell(fix: LocationFix, transform: CoordinateTransform, locator: CellLocator,
                 floor_levels: dict[int, str]) -> str:
    """Nearest cell to a fix; ``floor_levels`` maps floor numbers to level ids."""
    level = floor_levels.get(fix.floor)
    if level is None or level not in locator.indexes:
        raise NoCellOnLevel(f"no cells on floor {fix.floor}")
    x, y = transform.global_to_local(fix.lat, fix.lon)
    return locator.nearest(x, y, level)


def read_fixes(path) -> list[LocationFix]:
    """Fix CSV: ``user_id,timestamp,lat,lon,elevation,floor,accuracy``."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append(LocationFix(row["user_id"], float(row["lat"]), float(row["lon"]),
                                       float(row["elevation"]), int(row["floor"]), float(row["timestamp"]),
                                       float(row["accuracy"])))
            except (KeyError, ValueError, TypeError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad fix row ({exc})") from exc
    return out


def write_fixes(fixes: Iterable[LocationFix], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "timestamp", "lat", "lon", "elevation", "floor", "accuracy"])
        for f in fixes:
            w.writerow([f.user_id, repr(f.timestamp), repr(f.lat), repr(f.lon), repr(f.elevation), f.floor,
                        repr(f.accuracy)])


def read_beacons(path) -> list[BeaconObservation]:
    """Beacon CSV: ``beacon_id,x,y,rssi,timestamp``."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            try:
                out.append(BeaconObservation(row["beacon_id"], float(row["x"]), float(row["y"]),
                                             float(row["rssi"]), float(row["timestamp"])))
            except (KeyError, ValueError, TypeError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad beacon row ({exc})") from exc
    return out


def with_accuracy(fix: LocationFix, residual: float) -> LocationFix:
    return replace(fix, accuracy=accuracy_from_residual(residual))
