"""Seeded synthetic corpus generator for desk-scale experiments.

Baseline activity is a circadian-profiled Poisson process per node, with
per-home and per-day activity multipliers so raw counts overlap heavily
between homes.  UTI-affected days multiply the bathroom-door rate, add
night-time wandering on movement nodes, and shift temperature and pulse.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from utirisk.data.sfp import label_uti_window
from utirisk.data.types import (
    DEFAULT_NODES,
    DEFAULT_PHYS_CHANNELS,
    HOURS_PER_DAY,
    Corpus,
    DailyActivityMatrix,
    LabeledDay,
    Label,
    Provenance,
)

NIGHT_HOURS = range(0, 6)


@dataclass(frozen=True)
class GeneratorConfig:
    homes: int = 110
    unlabelled_days: int = 3864
    labelled_non_uti: int = 36
    uti_episodes: int = 6  # each episode labels 4 consecutive days
    bathroom_boost: float = 1.6
    night_rate: float = 0.6  # extra events/hour/node on UTI nights
    fever_delta: float = 1.2
    pulse_delta: float = 8.0
    night_baseline: float = 0.35  # baseline rate during hours 0-5, all nodes
    home_scale_sigma: float = 0.5
    day_jitter_sigma: float = 0.45
    phys_observed_rate: float = 0.75
    unlabelled_uti_fraction: float = 0.05
    boost_node: str = "bathroom_door"
    night_nodes: tuple[str, ...] = ("hallway_pir", "lounge_pir", "bedroom_door")
    nodes: tuple[str, ...] = DEFAULT_NODES
    phys_channels: tuple[str, ...] = DEFAULT_PHYS_CHANNELS
    start_date: dt.date = dt.date(2019, 1, 1)

    def __post_init__(self) -> None:
        for name in ("homes", "unlabelled_days", "labelled_non_uti", "uti_episodes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.uti_episodes > self.homes:
            raise ValueError("need at least one home per UTI episode")
        if self.boost_node not in self.nodes:
            raise ValueError(f"boost node {self.boost_node!r} not in node set")


def _bump(center: float, width: float) -> np.ndarray:
    h = np.arange(HOURS_PER_DAY, dtype=float)
    return np.exp(-((h - center) ** 2) / (2.0 * width**2))


def _base_profiles(nodes: tuple[str, ...], night_baseline: float) -> np.ndarray:
    """Per-node expected events/hour over a 24 h day; hours 0-5 are the night floor."""
    shapes = {
        "hallway_pir": 0.3 + 2.0 * _bump(8, 2.0) + 1.0 * _bump(13, 3.0) + 1.5 * _bump(19, 2.5),
        "lounge_pir": 0.2 + 0.8 * _bump(11, 3.0) + 1.8 * _bump(20, 2.5),
        "kitchen_motion": 0.1 + 1.5 * _bump(8, 1.2) + 1.8 * _bump(12.5, 1.5) + 1.6 * _bump(18, 1.5),
        "pillbox_motion": 0.02 + 0.8 * _bump(8, 0.8) + 0.7 * _bump(20, 0.8),
        "bedroom_door": 0.1 + 1.2 * _bump(7, 1.0) + 0.4 * _bump(14, 4.0) + 1.0 * _bump(22, 1.2),
        "bathroom_door": 0.15 + 0.9 * _bump(7.5, 1.5) + 0.5 * _bump(13, 4.0) + 0.8 * _bump(21, 2.0),
        "bed_pressure": 0.05 + 1.5 * _bump(6.5, 0.8) + 0.3 * _bump(14, 1.5) + 2.0 * _bump(22.5, 1.0),
        "chair_pressure": 0.1 + 1.0 * _bump(10, 2.0) + 1.5 * _bump(15, 2.5) + 1.2 * _bump(20, 2.0),
    }
    generic = 0.2 + 0.8 * _bump(9, 3.0) + 0.8 * _bump(19, 3.0)
    profile = np.stack([shapes.get(n, generic) for n in nodes], axis=1)
    profile[list(NIGHT_HOURS), :] = night_baseline
    return profile


def no_uti_within(date: dt.date, diagnoses: list[dt.date], days: int = 7) -> bool:
    """True when `date` is at least `days` away from every diagnosis date."""
    return all(abs((date - d).days) > days for d in diagnoses)


class _HomeModel:
    def __init__(self, home_id: str, scale: float):
        self.home_id = home_id
        self.scale = scale


def _draw_day(
    rng: np.random.Generator,
    cfg: GeneratorConfig,
    profile: np.ndarray,
    home: _HomeModel,
    date: dt.date,
    uti_effect: bool,
) -> DailyActivityMatrix:
    rate = profile * home.scale * rng.lognormal(0.0, cfg.day_jitter_sigma)
    if uti_effect:
        rate[:, cfg.nodes.index(cfg.boost_node)] *= cfg.bathroom_boost
        for n in cfg.night_nodes:
            if n in cfg.nodes:
                rate[list(NIGHT_HOURS), cfg.nodes.index(n)] += cfg.night_rate
    grid = rng.poisson(rate).astype(np.int64)

    temp = rng.normal(36.7, 0.25) + (cfg.fever_delta if uti_effect else 0.0)
    pulse = rng.normal(72.0, 6.0) + (cfg.pulse_delta if uti_effect else 0.0)
    raw = {"temperature": float(np.clip(temp, 30.0, 45.0)),
           "pulse": float(np.clip(pulse, 20.0, 250.0))}
    values = np.empty(len(cfg.phys_channels))
    observed = rng.random(len(cfg.phys_channels)) < cfg.phys_observed_rate
    for i, ch in enumerate(cfg.phys_channels):
        values[i] = raw.get(ch, rng.normal(0.0, 1.0)) if observed[i] else np.nan
    return DailyActivityMatrix(
        home_id=home.home_id,
        date=date,
        grid=grid,
        nodes=cfg.nodes,
        phys=values,
        phys_observed=observed,
        phys_channels=cfg.phys_channels,
    )


def generate_synthetic(config: GeneratorConfig | None = None, seed: int = 0) -> Corpus:
    """Generate a corpus; bit-identical for identical (config, seed)."""
    cfg = config or GeneratorConfig()
    rng = np.random.default_rng(seed)
    profile = _base_profiles(cfg.nodes, cfg.night_baseline)

    homes = [
        _HomeModel(f"H{i:03d}", rng.lognormal(0.0, cfg.home_scale_sigma))
        for i in range(cfg.homes)
    ]

    # Unlabelled period: a contiguous block of days per home starting at
    # start_date.  The labelled period begins after the longest block so the
    # two partitions can never collide on a home-day.
    base = cfg.unlabelled_days // cfg.homes
    extras = cfg.unlabelled_days % cfg.homes
    block = [base + (1 if i < extras else 0) for i in range(cfg.homes)]
    labelled_start = cfg.start_date + dt.timedelta(days=max(block) + 14)

    unlabelled: list[DailyActivityMatrix] = []
    for i, home in enumerate(homes):
        for j in range(block[i]):
            uti_like = rng.random() < cfg.unlabelled_uti_fraction
            unlabelled.append(
                _draw_day(rng, cfg, profile, home, cfg.start_date + dt.timedelta(days=j), uti_like)
            )

    # UTI episodes on distinct homes; each labels the diagnosis day plus the
    # following three.
    episode_homes = rng.choice(cfg.homes, size=cfg.uti_episodes, replace=False)
    diagnoses: dict[int, list[dt.date]] = {i: [] for i in range(cfg.homes)}
    labelled: list[LabeledDay] = []
    for h in episode_homes:
        diagnosis = labelled_start + dt.timedelta(days=int(rng.integers(0, 21)))
        diagnoses[int(h)].append(diagnosis)
        for day in label_uti_window(diagnosis):
            labelled.append(
                LabeledDay(
                    matrix=_draw_day(rng, cfg, profile, homes[int(h)], day, True),
                    label=Label.UTI,
                    provenance=Provenance.SYNTHETIC,
                )
            )

    # Non-UTI days only from home-days at least a week away from any
    # diagnosis in the same home.
    candidates = [
        (i, labelled_start + dt.timedelta(days=j))
        for i in range(cfg.homes)
        for j in range(45)
        if no_uti_within(labelled_start + dt.timedelta(days=j), diagnoses[i])
    ]
    if len(candidates) < cfg.labelled_non_uti:
        raise ValueError("not enough eligible non-UTI home-days; widen the labelled period")
    picks = rng.choice(len(candidates), size=cfg.labelled_non_uti, replace=False)
    for p in picks:
        i, day = candidates[int(p)]
        labelled.append(
            LabeledDay(
                matrix=_draw_day(rng, cfg, profile, homes[i], day, False),
                label=Label.NON_UTI,
                provenance=Provenance.SYNTHETIC,
            )
        )

    return Corpus(unlabelled=unlabelled, labelled=labelled)
