"""Core domain types: sensor events, daily activity matrices, corpora."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# The eight environmental nodes used for risk analysis.  Entrance-door and
# energy-monitor channels are deliberately absent: they track visitors more
# than the resident.  Column order of every activity matrix follows this
# tuple unless a corpus overrides it.
DEFAULT_NODES: tuple[str, ...] = (
    "hallway_pir",
    "lounge_pir",
    "kitchen_motion",
    "pillbox_motion",
    "bedroom_door",
    "bathroom_door",
    "bed_pressure",
    "chair_pressure",
)

DEFAULT_PHYS_CHANNELS: tuple[str, ...] = ("temperature", "pulse")

# Plausibility bounds enforced on observed physiological readings.
PHYS_BOUNDS: dict[str, tuple[float, float]] = {
    "temperature": (30.0, 45.0),
    "pulse": (20.0, 250.0),
}

HOURS_PER_DAY = 24


class Label(Enum):
    NON_UTI = 0
    UTI = 1


class Provenance(Enum):
    CLINICAL = "clinical"
    SYNTHETIC = "synthetic"
    VALIDATED_ALERT = "validated-alert"


@dataclass(frozen=True)
class SensorEvent:
    """One activation of an environmental node."""

    home_id: str
    node: str
    timestamp: dt.datetime
    value: int = 1

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError(f"event value must be >= 0, got {self.value}")


@dataclass(frozen=True)
class PhysReading:
    """One physiological measurement; ``observed=False`` marks a missing slot."""

    home_id: str
    channel: str
    timestamp: dt.datetime
    value: float
    observed: bool = True

    def __post_init__(self) -> None:
        if self.observed and self.channel in PHYS_BOUNDS:
            lo, hi = PHYS_BOUNDS[self.channel]
            if not lo <= self.value <= hi:
                raise ValueError(
                    f"{self.channel} reading {self.value} outside [{lo}, {hi}]"
                )


@dataclass
class DailyActivityMatrix:
    """One home-day: a 24 x N grid of hourly activation counts.

    Row h holds counts for the half-open hour [h:00, h+1:00); column order
    follows ``nodes``.  ``phys``/``phys_observed`` carry the day's aggregated
    physiological vector when available.
    """

    home_id: str
    date: dt.date
    grid: np.ndarray
    nodes: tuple[str, ...] = DEFAULT_NODES
    phys: np.ndarray | None = None
    phys_observed: np.ndarray | None = None
    phys_channels: tuple[str, ...] = DEFAULT_PHYS_CHANNELS

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid)
        if self.grid.shape != (HOURS_PER_DAY, len(self.nodes)):
            raise ValueError(
                f"grid must be {HOURS_PER_DAY}x{len(self.nodes)}, got {self.grid.shape}"
            )
        if np.any(self.grid < 0):
            raise ValueError("grid cells must be >= 0")
        if self.phys is not None:
            self.phys = np.asarray(self.phys, dtype=float)
            if self.phys_observed is None:
                self.phys_observed = np.ones(len(self.phys), dtype=bool)
            else:
                self.phys_observed = np.asarray(self.phys_observed, dtype=bool)
            if len(self.phys) != len(self.phys_channels):
                raise ValueError("phys vector length must match phys_channels")
            if len(self.phys_observed) != len(self.phys):
                raise ValueError("phys mask length must match phys vector")

    def key(self) -> tuple[str, dt.date]:
        return (self.home_id, self.date)


@dataclass
class LabeledDay:
    matrix: DailyActivityMatrix
    label: Label
    provenance: Provenance


@dataclass
class Corpus:
    """Unlabelled matrices plus a (small) labelled partition.

    A (home_id, date) pair never appears in both partitions; that keeps the
    unsupervised fit independent of every labelled evaluation day.
    """

    unlabelled: list[DailyActivityMatrix] = field(default_factory=list)
    labelled: list[LabeledDay] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen = {m.key() for m in self.unlabelled}
        dup = [d.matrix.key() for d in self.labelled if d.matrix.key() in seen]
        if dup:
            raise ValueError(f"home-days present in both partitions: {dup[:5]}")

    @property
    def nodes(self) -> tuple[str, ...]:
        for m in self.unlabelled:
            return m.nodes
        for d in self.labelled:
            return d.matrix.nodes
        return DEFAULT_NODES

    @property
    def phys_channels(self) -> tuple[str, ...]:
        for m in self.unlabelled:
            return m.phys_channels
        for d in self.labelled:
            return d.matrix.phys_channels
        return DEFAULT_PHYS_CHANNELS
