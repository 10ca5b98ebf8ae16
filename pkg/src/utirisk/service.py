"""Long-running scoring service: per-day risk, threshold alerts, clinician
validation feeding continual kernel addition, and snapshot persistence.

State machine: an alert is created (pending) when a day scores at or above
the threshold; re-scoring the same home-day updates that alert in place
rather than duplicating it; validation moves it to validated_positive or
validated_negative exactly once.  A successful validation appends the day's
latent as a new PNN kernel, bumps the snapshot version, persists it when a
snapshot path is configured, and appends an audit entry.

Mutations are serialized behind a single lock; readers grab a consistent
(classifier, version) pair under the same lock and never observe a half
applied validation.
"""

from __future__ import annotations

import datetime as dt
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from utirisk.classifiers.pnn import NON_UTI, UTI, PnnModel, pnn_add_kernel
from utirisk.data.io import loads_events
from utirisk.data.sfp import build_sfp
from utirisk.data.types import DEFAULT_NODES, Corpus, DailyActivityMatrix
from utirisk.pipeline import PipelineModel
from utirisk.snapshot import save_snapshot, snapshot_to_document

DEFAULT_THRESHOLD = 0.5

PENDING = "pending"
VALIDATED_POSITIVE = "validated_positive"
VALIDATED_NEGATIVE = "validated_negative"


class NotFound(Exception):
    pass


class Conflict(Exception):
    pass


class BadRequest(Exception):
    pass


@dataclass
class Alert:
    alert_id: str
    home_id: str
    date: dt.date
    probability: float
    status: str = PENDING
    created_at: dt.datetime = field(default_factory=lambda: dt.datetime.now(dt.timezone.utc))
    validated_at: dt.datetime | None = None


class ServiceState:
    """All mutable service state; every public method is thread-safe."""

    def __init__(self, model: PipelineModel, threshold: float = DEFAULT_THRESHOLD,
                 version_tag: str = "v1", snapshot_path: str | Path | None = None):
        if not 0.0 <= threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        self.model = model
        self.threshold = threshold
        self.snapshot_path = Path(snapshot_path) if snapshot_path else None
        m = re.fullmatch(r"v(\d+)", version_tag)
        self._seq = int(m.group(1)) if m else 1
        self.version_tag = version_tag
        self.matrices: dict[tuple[str, str], DailyActivityMatrix] = {}
        self.alerts: dict[str, Alert] = {}
        self._by_day: dict[tuple[str, str], str] = {}
        self.audit: list[dict] = []
        self._lock = threading.Lock()
        self._next_alert = 1
        self._score_cache: dict[tuple[str, str], float] = {}
        self._checksum: str | None = None

    def add_corpus(self, corpus: Corpus) -> int:
        """Load every home-day (labelled and unlabelled) as scorable data."""
        with self._lock:
            for m in corpus.unlabelled:
                self.matrices[(m.home_id, m.date.isoformat())] = m
            for d in corpus.labelled:
                m = d.matrix
                self.matrices[(m.home_id, m.date.isoformat())] = m
            return len(self.matrices)

    def _matrix(self, home_id: str, date: str) -> DailyActivityMatrix:
        try:
            return self.matrices[(home_id, date)]
        except KeyError:
            raise NotFound(f"no data for home {home_id!r} on {date}") from None

    def _probability(self, home_id: str, date: str) -> float:
        """Score without alert side effects; cached per model version."""
        key = (home_id, date)
        with self._lock:
            if key in self._score_cache:
                return self._score_cache[key]
            matrix = self._matrix(home_id, date)
            model = self.model  # consistent reference under the lock
        p = float(model.score(matrix))
        with self._lock:
            self._score_cache[key] = p
        return p

    def score_day(self, home_id: str, date: str) -> tuple[float, Alert | None]:
        """Probability for one home-day; creates or updates the day's alert
        when the probability clears the threshold (idempotent per home-day)."""
        p = self._probability(home_id, date)
        key = (home_id, date)
        with self._lock:
            alert_id = self._by_day.get(key)
            if alert_id is not None:
                alert = self.alerts[alert_id]
                if alert.status == PENDING:
                    alert.probability = p
                return p, alert
            if p < self.threshold:
                return p, None
            alert = Alert(alert_id=f"A{self._next_alert:05d}", home_id=home_id,
                          date=dt.date.fromisoformat(date), probability=p)
            self._next_alert += 1
            self.alerts[alert.alert_id] = alert
            self._by_day[key] = alert.alert_id
            return p, alert

    def validate_alert(self, alert_id: str, outcome: str) -> tuple[Alert, str]:
        """pending -> validated_*; adds the day's latent as a PNN kernel,
        bumps and persists the snapshot version, and records an audit row."""
        if outcome not in ("positive", "negative"):
            raise BadRequest(f"outcome must be positive or negative, got {outcome!r}")
        with self._lock:
            alert = self.alerts.get(alert_id)
            if alert is None:
                raise NotFound(f"unknown alert {alert_id!r}")
            if alert.status != PENDING:
                raise Conflict(f"alert {alert_id} already {alert.status}")
            if not isinstance(self.model.classifier, PnnModel):
                raise BadRequest("continual learning needs a pnn classifier head")
            matrix = self._matrix(alert.home_id, alert.date.isoformat())

            latent = self.model.latent(matrix)
            label = UTI if outcome == "positive" else NON_UTI
            self.model.classifier = pnn_add_kernel(self.model.classifier, latent, label)

            alert.status = VALIDATED_POSITIVE if outcome == "positive" else VALIDATED_NEGATIVE
            alert.validated_at = dt.datetime.now(dt.timezone.utc)
            self._seq += 1
            self.version_tag = f"v{self._seq}"
            self._score_cache.clear()
            self._checksum = None
            if self.snapshot_path is not None:
                self._checksum = save_snapshot(self.model, self.snapshot_path,
                                               self.version_tag)
            self.audit.append({"alert_id": alert.alert_id, "outcome": outcome,
                               "version_tag": self.version_tag,
                               "at": alert.validated_at.isoformat()})
            return alert, self.version_tag

    def ingest_events(self, text: str) -> dict:
        """Parse an event-jsonl body; each covered home-day's grid replaces
        any existing grid for that day (the body carries full days)."""
        if not text.strip():
            raise BadRequest("empty ingest body")
        with self._lock:
            nodes = (next(iter(self.matrices.values())).nodes
                     if self.matrices else DEFAULT_NODES)
        events, report = loads_events(text, "event-jsonl", nodes=nodes)
        groups: dict[tuple[str, dt.date], list] = {}
        for e in events:
            groups.setdefault((e.home_id, e.timestamp.date()), []).append(e)
        with self._lock:
            for (home, date), evs in groups.items():
                m = build_sfp(evs, date, node_set=nodes)
                key = (home, date.isoformat())
                self.matrices[key] = m
                self._score_cache.pop(key, None)
        return {"accepted_events": len(events),
                "rejected_lines": len(report.rejections),
                "days_updated": len(groups),
                "rejections": [{"line": ln, "reason": r}
                               for ln, r in report.rejections[:20]]}

    def day_matrix(self, home_id: str, date: str) -> DailyActivityMatrix:
        with self._lock:
            return self._matrix(home_id, date)

    def list_homes(self) -> list[dict]:
        with self._lock:
            per_home: dict[str, list[str]] = {}
            for home, date in self.matrices:
                per_home.setdefault(home, []).append(date)
            pending: dict[str, int] = {}
            for a in self.alerts.values():
                if a.status == PENDING:
                    pending[a.home_id] = pending.get(a.home_id, 0) + 1
        out = []
        for home in sorted(per_home):
            latest = max(per_home[home])
            out.append({"home_id": home, "days": len(per_home[home]),
                        "latest_date": latest,
                        "latest_probability": self._probability(home, latest),
                        "pending_alerts": pending.get(home, 0)})
        return out

    def home_dates(self, home_id: str) -> list[str]:
        with self._lock:
            dates = sorted(d for h, d in self.matrices if h == home_id)
        if not dates:
            raise NotFound(f"unknown home {home_id!r}")
        return dates

    def list_alerts(self, status: str | None = None) -> list[Alert]:
        if status is not None and status not in (PENDING, VALIDATED_POSITIVE,
                                                 VALIDATED_NEGATIVE):
            raise BadRequest(f"unknown status filter {status!r}")
        with self._lock:
            alerts = [a for a in self.alerts.values()
                      if status is None or a.status == status]
        return sorted(alerts, key=lambda a: a.alert_id)

    def model_info(self) -> dict:
        with self._lock:
            if self._checksum is None:
                self._checksum = snapshot_to_document(self.model,
                                                      self.version_tag)["checksum"]
            info = {
                "version_tag": self.version_tag,
                "checksum": self._checksum,
                "threshold": self.threshold,
                "extractor": self.model.config.extractor,
                "classifier": self.model.config.classifier,
                "use_phys": self.model.config.use_phys,
                "homes": len({h for h, _ in self.matrices}),
                "days": len(self.matrices),
                "pending_alerts": sum(a.status == PENDING for a in self.alerts.values()),
                "audit_entries": len(self.audit),
            }
            if isinstance(self.model.classifier, PnnModel):
                info["kernels"] = int(len(self.model.classifier.kernels))
            return info


class AlertOut(BaseModel):
    alert_id: str
    home_id: str
    date: dt.date
    probability: float = Field(ge=0.0, le=1.0)
    status: str
    created_at: dt.datetime
    validated_at: dt.datetime | None = None


class RiskOut(BaseModel):
    home_id: str
    date: dt.date
    probability: float = Field(ge=0.0, le=1.0)
    alert: AlertOut | None = None
    heatmap: list[list[int]]
    nodes: list[str]


class HomeOut(BaseModel):
    home_id: str
    days: int
    latest_date: dt.date
    latest_probability: float
    pending_alerts: int
    dates: list[str]


class ValidateIn(BaseModel):
    outcome: str  # positive | negative


class ValidateOut(BaseModel):
    alert: AlertOut
    version_tag: str


class IngestOut(BaseModel):
    accepted_events: int
    rejected_lines: int
    days_updated: int
    rejections: list[dict]


def _alert_out(a: Alert) -> AlertOut:
    return AlertOut(alert_id=a.alert_id, home_id=a.home_id, date=a.date,
                    probability=a.probability, status=a.status,
                    created_at=a.created_at, validated_at=a.validated_at)


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="utirisk", version="0.1.0")
    app.state.service = state
    # the dashboard is served as static files from a separate origin; the
    # service has no authentication, so open CORS loses nothing
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(NotFound)
    async def _nf(_: Request, exc: NotFound):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(Conflict)
    async def _cf(_: Request, exc: Conflict):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(BadRequest)
    async def _br(_: Request, exc: BadRequest):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/homes", response_model=list[HomeOut])
    def homes():
        rows = state.list_homes()
        return [HomeOut(**row, dates=state.home_dates(row["home_id"])) for row in rows]

    @app.get("/risk/{home_id}/{date}", response_model=RiskOut)
    def risk(home_id: str, date: dt.date):
        iso = date.isoformat()
        p, alert = state.score_day(home_id, iso)
        m = state.day_matrix(home_id, iso)
        return RiskOut(home_id=home_id, date=date, probability=p,
                       alert=_alert_out(alert) if alert else None,
                       heatmap=[[int(v) for v in row] for row in m.grid],
                       nodes=list(m.nodes))

    @app.get("/alerts", response_model=list[AlertOut])
    def alerts(status: str | None = None):
        return [_alert_out(a) for a in state.list_alerts(status)]

    @app.post("/alerts/{alert_id}/validate", response_model=ValidateOut)
    def validate(alert_id: str, body: ValidateIn):
        alert, tag = state.validate_alert(alert_id, body.outcome)
        return ValidateOut(alert=_alert_out(alert), version_tag=tag)

    @app.post("/ingest", response_model=IngestOut)
    async def ingest(request: Request):
        body = (await request.body()).decode("utf-8", errors="replace")
        return IngestOut(**state.ingest_events(body))

    @app.get("/model")
    def model():
        return state.model_info()

    return app
