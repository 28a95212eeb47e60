"""Thermal-preference feedback records and their CSV form."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import IntEnum

from ..errors import ValidationError


class Preference(IntEnum):
    """Vote classes; the integer order is the tie-break order."""

    PreferCooler = 0
    NoPreference = 1
    PreferWarmer = 2

    @property
    def token(self) -> str:
        return _TOKENS[self]

    @classmethod
    def parse(cls, text: str) -> "Preference":
        try:
            return _FROM_TOKEN[text.strip().lower()]
        except KeyError:
            raise ValidationError(f"unknown preference label {text!r}") from None


_TOKENS = {Preference.PreferCooler: "prefer_cooler", Preference.NoPreference: "no_preference",
           Preference.PreferWarmer: "prefer_warmer"}
_FROM_TOKEN = {v: k for k, v in _TOKENS.items()}
CLASSES = tuple(Preference)


@dataclass(frozen=True)
class FeedbackRecord:
    user_id: str
    timestamp: float
    cell_id: str
    label: Preference
    heart_rate: float
    near_body_temp: float

    def __post_init__(self):
        if not 20 < self.heart_rate < 250:
            raise ValidationError(f"heart rate {self.heart_rate} outside (20, 250)")
        if not 15 < self.near_body_temp < 45:
            raise ValidationError(f"near-body temperature {self.near_body_temp} outside (15, 45)")
        if not isinstance(self.label, Preference):
            object.__setattr__(self, "label", Preference(self.label))


@dataclass(frozen=True)
class FeedbackRow:
    """One line of the feedback ingest CSV (location still in WGS84)."""

    user_id: str
    timestamp: float
    lat: float
    lon: float
    floor: int
    label: Preference
    heart_rate: float
    near_body_temp: float


FEEDBACK_HEADER = ["user_id", "timestamp", "lat", "lon", "floor", "label", "heart_rate", "near_body_temp"]


def read_feedback(path) -> list[FeedbackRow]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(FEEDBACK_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValidationError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                hr, temp = float(row["heart_rate"]), float(row["near_body_temp"])
                if not (math.isfinite(hr) and math.isfinite(temp)):
                    raise ValueError("non-finite physiology")
                out.append(FeedbackRow(row["user_id"], float(row["timestamp"]), float(row["lat"]),
                                       float(row["lon"]), int(row["floor"]), Preference.parse(row["label"]),
                                       hr, temp))
            except (ValueError, ValidationError) as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_feedback(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FEEDBACK_HEADER)
        for r in rows:
            w.writerow([r.user_id, repr(r.timestamp), repr(r.lat), repr(r.lon), r.floor, r.label.token,
                        repr(r.heart_rate), repr(r.near_body_temp)])


RECORD_HEADER = ["user_id", "timestamp", "cell_id", "label", "heart_rate", "near_body_temp"]


def write_records(records, path) -> None:
    """Linked feedback: one row per vote with its cell instead of coordinates."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow([r.user_id, repr(r.timestamp), r.cell_id, r.label.token, repr(r.heart_rate),
                        repr(r.near_body_temp)])


def read_records(path) -> list[FeedbackRecord]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RECORD_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValidationError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append(FeedbackRecord(row["user_id"], float(row["timestamp"]), row["cell_id"],
                                          Preference.parse(row["label"]), float(row["heart_rate"]),
                                          float(row["near_body_temp"])))
            except (ValueError, ValidationError) as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    return out
