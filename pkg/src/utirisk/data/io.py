"""File ingestion and corpus snapshots.

Event files come as CSV (header ``home_id,node,timestamp,value``) or JSONL
(one object per line, same keys).  Malformed rows are collected into a
rejection report instead of raised or silently dropped.  A corpus snapshot
is a directory of one 24 x N matrix file per home-day plus ``labels.csv``,
``phys.csv`` and ``meta.json``.
"""

from __future__ import annotations

import csv
import datetime as dt
import io as _io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from utirisk.data.types import (
    DEFAULT_NODES,
    DEFAULT_PHYS_CHANNELS,
    HOURS_PER_DAY,
    PHYS_BOUNDS,
    Corpus,
    DailyActivityMatrix,
    LabeledDay,
    Label,
    PhysReading,
    Provenance,
    SensorEvent,
)

EVENT_FIELDS = ("home_id", "node", "timestamp", "value")
PHYS_FIELDS = ("home_id", "channel", "timestamp", "value")


@dataclass
class LoadReport:
    accepted: int = 0
    rejections: list[tuple[int, str]] = field(default_factory=list)  # (line, reason)

    def reject(self, line: int, reason: str) -> None:
        self.rejections.append((line, reason))


def _parse_timestamp(raw: str) -> dt.datetime:
    return dt.datetime.fromisoformat(raw.replace("Z", "+00:00"))


def _event_from_record(
    rec: dict, line: int, nodes: tuple[str, ...], report: LoadReport
) -> SensorEvent | None:
    missing = [k for k in ("home_id", "node", "timestamp") if not rec.get(k)]
    if missing:
        report.reject(line, f"missing fields: {', '.join(missing)}")
        return None
    if rec["node"] not in nodes:
        report.reject(line, f"unknown node {rec['node']!r}")
        return None
    try:
        ts = _parse_timestamp(str(rec["timestamp"]))
    except ValueError:
        report.reject(line, f"bad timestamp {rec['timestamp']!r}")
        return None
    raw_value = rec.get("value")
    if raw_value in (None, ""):
        value = 1
    else:
        try:
            value = int(raw_value)
        except (TypeError, ValueError):
            report.reject(line, f"bad value {raw_value!r}")
            return None
        if value < 0:
            report.reject(line, f"negative value {value}")
            return None
    return SensorEvent(home_id=str(rec["home_id"]), node=rec["node"], timestamp=ts, value=value)


def loads_events(
    text: str,
    format: str = "event-jsonl",
    nodes: tuple[str, ...] = DEFAULT_NODES,
) -> tuple[list[SensorEvent], LoadReport]:
    """Parse event records from a string; see load_events."""
    report = LoadReport()
    events: list[SensorEvent] = []
    if format == "event-csv":
        reader = csv.reader(_io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty event-csv: missing header") from None
        if tuple(h.strip() for h in header) != EVENT_FIELDS:
            raise ValueError(f"expected header {','.join(EVENT_FIELDS)}, got {','.join(header)}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(EVENT_FIELDS):
                report.reject(line, f"expected {len(EVENT_FIELDS)} columns, got {len(row)}")
                continue
            rec = dict(zip(EVENT_FIELDS, (c.strip() for c in row)))
            ev = _event_from_record(rec, line, nodes, report)
            if ev is not None:
                events.append(ev)
    elif format == "event-jsonl":
        for line, raw in enumerate(text.splitlines(), start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError:
                report.reject(line, "invalid JSON")
                continue
            if not isinstance(rec, dict):
                report.reject(line, "record is not an object")
                continue
            ev = _event_from_record(rec, line, nodes, report)
            if ev is not None:
                events.append(ev)
    else:
        raise ValueError(f"unknown format {format!r}")
    report.accepted = len(events)
    return events, report


def load_events(
    path: str | Path,
    format: str = "event-csv",
    nodes: tuple[str, ...] = DEFAULT_NODES,
) -> tuple[list[SensorEvent], LoadReport]:
    """Load sensor events from a file, collecting malformed rows in a report."""
    return loads_events(Path(path).read_text(), format=format, nodes=nodes)


def load_phys(
    path: str | Path,
    channels: tuple[str, ...] = DEFAULT_PHYS_CHANNELS,
) -> tuple[list[PhysReading], LoadReport]:
    """Load physiological readings from a phys-csv file."""
    report = LoadReport()
    readings: list[PhysReading] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty phys-csv: missing header") from None
        if tuple(h.strip() for h in header) != PHYS_FIELDS:
            raise ValueError(f"expected header {','.join(PHYS_FIELDS)}, got {','.join(header)}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(PHYS_FIELDS):
                report.reject(line, f"expected {len(PHYS_FIELDS)} columns, got {len(row)}")
                continue
            home_id, channel, ts_raw, val_raw = (c.strip() for c in row)
            if channel not in channels:
                report.reject(line, f"unknown channel {channel!r}")
                continue
            try:
                ts = _parse_timestamp(ts_raw)
            except ValueError:
                report.reject(line, f"bad timestamp {ts_raw!r}")
                continue
            try:
                value = float(val_raw)
            except ValueError:
                report.reject(line, f"bad value {val_raw!r}")
                continue
            lo, hi = PHYS_BOUNDS.get(channel, (-np.inf, np.inf))
            if not lo <= value <= hi:
                report.reject(line, f"{channel} value {value} outside [{lo}, {hi}]")
                continue
            readings.append(PhysReading(home_id=home_id, channel=channel, timestamp=ts, value=value))
    report.accepted = len(readings)
    return readings, report


def write_events_csv(events: list[SensorEvent], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENT_FIELDS)
        for e in events:
            writer.writerow([e.home_id, e.node, e.timestamp.isoformat(), e.value])


def write_events_jsonl(events: list[SensorEvent], path: str | Path) -> None:
    with open(path, "w") as fh:
        for e in events:
            fh.write(json.dumps({
                "home_id": e.home_id,
                "node": e.node,
                "timestamp": e.timestamp.isoformat(),
                "value": e.value,
            }) + "\n")


_LABEL_NAMES = {Label.NON_UTI: "NonUTI", Label.UTI: "UTI"}
_LABEL_FROM_NAME = {v: k for k, v in _LABEL_NAMES.items()}


def save_corpus(corpus: Corpus, directory: str | Path) -> None:
    """Write a corpus snapshot: per-day matrix files plus labels, phys, meta."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)

    def _write_day(m: DailyActivityMatrix) -> None:
        home_dir = root / m.home_id
        home_dir.mkdir(exist_ok=True)
        np.savetxt(home_dir / f"{m.date.isoformat()}.csv", m.grid, fmt="%d", delimiter=",")

    days = [m for m in corpus.unlabelled] + [d.matrix for d in corpus.labelled]
    for m in days:
        _write_day(m)

    with open(root / "labels.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["home_id", "date", "label", "provenance"])
        for d in sorted(corpus.labelled, key=lambda d: d.matrix.key()):
            writer.writerow([d.matrix.home_id, d.matrix.date.isoformat(),
                             _LABEL_NAMES[d.label], d.provenance.value])

    with open(root / "phys.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["home_id", "date", "channel", "value", "observed"])
        for m in sorted(days, key=lambda m: m.key()):
            if m.phys is None:
                continue
            for i, ch in enumerate(m.phys_channels):
                obs = bool(m.phys_observed[i])
                writer.writerow([m.home_id, m.date.isoformat(), ch,
                                 repr(float(m.phys[i])) if obs else "", int(obs)])

    meta = {"nodes": list(corpus.nodes), "phys_channels": list(corpus.phys_channels)}
    (root / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def load_corpus(directory: str | Path) -> Corpus:
    """Read back a snapshot written by save_corpus."""
    root = Path(directory)
    meta = json.loads((root / "meta.json").read_text())
    nodes = tuple(meta["nodes"])
    channels = tuple(meta["phys_channels"])

    phys: dict[tuple[str, dt.date], tuple[np.ndarray, np.ndarray]] = {}
    phys_path = root / "phys.csv"
    if phys_path.exists():
        with open(phys_path, newline="") as fh:
            for row in csv.DictReader(fh):
                key = (row["home_id"], dt.date.fromisoformat(row["date"]))
                if key not in phys:
                    phys[key] = (np.full(len(channels), np.nan),
                                 np.zeros(len(channels), dtype=bool))
                idx = channels.index(row["channel"])
                if row["observed"] == "1":
                    phys[key][0][idx] = float(row["value"])
                    phys[key][1][idx] = True

    labels: dict[tuple[str, dt.date], tuple[Label, Provenance]] = {}
    with open(root / "labels.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["home_id"], dt.date.fromisoformat(row["date"]))
            labels[key] = (_LABEL_FROM_NAME[row["label"]], Provenance(row["provenance"]))

    unlabelled: list[DailyActivityMatrix] = []
    labelled: list[LabeledDay] = []
    for home_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for day_file in sorted(home_dir.glob("*.csv")):
            grid = np.loadtxt(day_file, dtype=np.int64, delimiter=",", ndmin=2)
            if grid.shape != (HOURS_PER_DAY, len(nodes)):
                raise ValueError(f"{day_file}: expected {HOURS_PER_DAY}x{len(nodes)} grid, "
                                 f"got {grid.shape}")
            key = (home_dir.name, dt.date.fromisoformat(day_file.stem))
            pv, po = phys.get(key, (None, None))
            m = DailyActivityMatrix(home_id=key[0], date=key[1], grid=grid, nodes=nodes,
                                    phys=pv, phys_observed=po, phys_channels=channels)
            if key in labels:
                label, prov = labels[key]
                labelled.append(LabeledDay(matrix=m, label=label, provenance=prov))
            else:
                unlabelled.append(m)
    return Corpus(unlabelled=unlabelled, labelled=labelled)
