"""Hourly aggregation of raw sensor events into daily activity matrices."""

from __future__ import annotations

import datetime as dt

import numpy as np

from utirisk.data.types import (
    DEFAULT_NODES,
    DEFAULT_PHYS_CHANNELS,
    HOURS_PER_DAY,
    DailyActivityMatrix,
    PhysReading,
    SensorEvent,
)


def build_sfp(
    events: list[SensorEvent],
    date: dt.date,
    node_set: tuple[str, ...] = DEFAULT_NODES,
) -> DailyActivityMatrix:
    """Aggregate one home's events into a 24 x N hourly count grid.

    Hours are half-open intervals [h:00:00, h+1:00:00); events on other
    calendar days are ignored.  All events must share a single home_id and
    use nodes from ``node_set``.
    """
    if not node_set:
        raise ValueError("node_set must be nonempty")
    home_ids = {e.home_id for e in events}
    if len(home_ids) > 1:
        raise ValueError(f"events span multiple homes: {sorted(home_ids)}")
    home_id = events[0].home_id if events else ""

    col = {n: i for i, n in enumerate(node_set)}
    grid = np.zeros((HOURS_PER_DAY, len(node_set)), dtype=np.int64)
    for e in events:
        if e.node not in col:
            raise ValueError(f"unknown node {e.node!r}")
        if e.timestamp.date() != date:
            continue
        grid[e.timestamp.hour, col[e.node]] += e.value
    return DailyActivityMatrix(home_id=home_id, date=date, grid=grid, nodes=tuple(node_set))


def label_uti_window(diagnosis_date: dt.date) -> list[dt.date]:
    """Days to label UTI for one diagnosis: the diagnosis day plus the next three."""
    return [diagnosis_date + dt.timedelta(days=k) for k in range(4)]


def daily_phys(
    readings: list[PhysReading],
    date: dt.date,
    channels: tuple[str, ...] = DEFAULT_PHYS_CHANNELS,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean of the date's observed readings, plus an observed mask.

    Channels with no observed reading that day get value NaN and mask False.
    """
    values = np.full(len(channels), np.nan)
    observed = np.zeros(len(channels), dtype=bool)
    for i, ch in enumerate(channels):
        day = [r.value for r in readings
               if r.channel == ch and r.observed and r.timestamp.date() == date]
        if day:
            values[i] = float(np.mean(day))
            observed[i] = True
    return values, observed
