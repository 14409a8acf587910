"""Durable single-node store: session documents, append-only event journal,
feedback records, and the metric aggregator for evaluation reports.

Layout under the data directory:
  sessions/<session_id>.json   versioned session document (atomic replace)
  responses.jsonl              archived agent responses (append-only)
  events.jsonl                 interaction event journal (append-only)
  feedback.jsonl               explicit learner ratings (append-only)

Sessions are written atomically (temp file + fsync + rename), so a crash
mid-save leaves the previous version readable. Writes to one session are
serialized by a single-use lease; the journal accepts concurrent appenders
and commits a total order under its lock.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from .domain import SessionState, new_id

LEASE_TTL_S = 30.0
MAX_EVENT_PAYLOAD_BYTES = 64 * 1024

METRICS = (
    "response_speed",
    "ease_of_use",
    "accuracy",
    "relevance",
    "practicality",
    "visual_appeal",
)

METRIC_LABELS = {
    "response_speed": "Response Speed",
    "ease_of_use": "Ease of Use",
    "accuracy": "Accuracy",
    "relevance": "Relevance",
    "practicality": "Practicality",
    "visual_appeal": "Visual Appeal",
}


class StoreError(Exception):
    pass


class NotFound(StoreError):
    pass


class ConflictError(StoreError):
    """Lease is held, stale, or already consumed."""


class SizeError(StoreError):
    """Event payload exceeds the documented cap."""


class EventKind(str, Enum):
    TURN_COMPLETED = "TurnCompleted"
    PLAN_CREATED = "PlanCreated"
    PLAN_REVISED = "PlanRevised"
    SCAFFOLD_CHANGED = "ScaffoldChanged"
    RETRIEVAL_PERFORMED = "RetrievalPerformed"
    GATEWAY_ERROR = "GatewayError"
    FEEDBACK_SUBMITTED = "FeedbackSubmitted"


@dataclass(frozen=True)
class InteractionEvent:
    event_id: str
    session_id: str
    kind: EventKind
    payload: Mapping[str, Any]
    timestamp: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "event_id": self.event_id,
            "session_id": self.session_id,
            "kind": self.kind.value,
            "payload": dict(self.payload),
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> InteractionEvent:
        return cls(
            event_id=d["event_id"],
            session_id=d["session_id"],
            kind=EventKind(d["kind"]),
            payload=d["payload"],
            timestamp=d["timestamp"],
        )


@dataclass(frozen=True)
class FeedbackRecord:
    """One explicit rating set; turn_index None means a whole-session rating."""

    session_id: str
    ratings: Mapping[str, int]
    turn_index: Optional[int] = None
    free_text: Optional[str] = None
    timestamp: int = 0

    def __post_init__(self) -> None:
        if not self.ratings:
            raise ValueError("ratings must not be empty")
        for name, value in self.ratings.items():
            if name not in METRICS:
                raise ValueError(f"unknown metric name: {name!r}")
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                raise ValueError(f"rating for {name} must be an integer in [1, 5], got {value!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "ratings": dict(self.ratings),
            "turn_index": self.turn_index,
            "free_text": self.free_text,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> FeedbackRecord:
        return cls(
            session_id=d["session_id"],
            ratings=d["ratings"],
            turn_index=d.get("turn_index"),
            free_text=d.get("free_text"),
            timestamp=d.get("timestamp", 0),
        )


@dataclass(frozen=True)
class MetricSummary:
    metric: str
    mean: float
    std_dev: float  # population
    n: int


@dataclass
class _Lease:
    token: str
    expires_at: float
    consumed: bool = False


class SessionStore:
    def __init__(self, data_dir: str | Path) -> None:
        self.root = Path(data_dir)
        self.sessions_dir = self.root / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.events_path = self.root / "events.jsonl"
        self.feedback_path = self.root / "feedback.jsonl"
        self.responses_path = self.root / "responses.jsonl"
        self._leases: dict[str, _Lease] = {}
        self._lease_lock = threading.Lock()
        self._journal_lock = threading.Lock()
        self._feedback_lock = threading.Lock()
        self._responses_lock = threading.Lock()
        self._responses: dict[str, dict[str, Any]] = {}
        self._load_responses()

    # ------------------------------------------------------------- sessions
    def _session_path(self, session_id: str) -> Path:
        if not session_id or "/" in session_id or session_id.startswith("."):
            raise StoreError(f"invalid session id: {session_id!r}")
        return self.sessions_dir / f"{session_id}.json"

    def create_session(self, state: SessionState) -> int:
        path = self._session_path(state.session_id)
        if path.exists():
            raise ConflictError(f"session already exists: {state.session_id}")
        self._write_document(path, {"version": 1, "state": state.to_dict()})
        return 1

    def load_session(self, session_id: str) -> SessionState:
        path = self._session_path(session_id)
        if not path.exists():
            raise NotFound(f"unknown session: {session_id}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        return SessionState.from_dict(doc["state"])

    def session_version(self, session_id: str) -> int:
        path = self._session_path(session_id)
        if not path.exists():
            raise NotFound(f"unknown session: {session_id}")
        return json.loads(path.read_text(encoding="utf-8"))["version"]

    def session_exists(self, session_id: str) -> bool:
        return self._session_path(session_id).exists()

    def acquire_lease(self, session_id: str) -> str:
        """Grant the single-use write lease for a session, or raise ConflictError
        while a live lease is outstanding (a turn is in flight)."""
        if not self.session_exists(session_id):
            raise NotFound(f"unknown session: {session_id}")
        now = time.monotonic()
        with self._lease_lock:
            lease = self._leases.get(session_id)
            if lease and not lease.consumed and lease.expires_at > now:
                raise ConflictError(f"turn already in flight for session {session_id}")
            token = new_id()
            self._leases[session_id] = _Lease(token=token, expires_at=now + LEASE_TTL_S)
            return token

    def release_lease(self, session_id: str, token: str) -> None:
        with self._lease_lock:
            lease = self._leases.get(session_id)
            if lease and lease.token == token:
                lease.consumed = True

    def save_session(self, state: SessionState, lease_token: str) -> int:
        """Persist a new session version. Consumes the lease: with one token,
        exactly one save succeeds."""
        path = self._session_path(state.session_id)
        if not path.exists():
            raise NotFound(f"unknown session: {state.session_id}")
        with self._lease_lock:
            lease = self._leases.get(state.session_id)
            if (
                lease is None
                or lease.token != lease_token
                or lease.consumed
                or lease.expires_at <= time.monotonic()
            ):
                raise ConflictError(
                    f"stale or missing write lease for session {state.session_id}"
                )
            lease.consumed = True
            version = json.loads(path.read_text(encoding="utf-8"))["version"] + 1
            self._write_document(path, {"version": version, "state": state.to_dict()})
            return version

    def _write_document(self, path: Path, doc: dict[str, Any]) -> None:
        """Atomic write: temp file in the same directory, fsync, rename."""
        tmp = path.with_name(path.name + ".tmp")
        data = json.dumps(doc)
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    # ------------------------------------------------------------ responses
    def _load_responses(self) -> None:
        if not self.responses_path.exists():
            return
        with open(self.responses_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    doc = json.loads(line)
                    self._responses[doc["response_id"]] = doc

    def save_response(self, doc: dict[str, Any]) -> None:
        if "response_id" not in doc:
            raise StoreError("response document must carry response_id")
        line = json.dumps(doc)
        with self._responses_lock:
            with open(self.responses_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
            self._responses[doc["response_id"]] = doc

    def load_response(self, response_id: str) -> Optional[dict[str, Any]]:
        with self._responses_lock:
            return self._responses.get(response_id)

    def response_text(self, response_id: str) -> Optional[str]:
        doc = self.load_response(response_id)
        return doc.get("text") if doc else None

    # --------------------------------------------------------------- events
    def append_event(self, event: InteractionEvent) -> None:
        payload_bytes = len(json.dumps(dict(event.payload)).encode("utf-8"))
        if payload_bytes > MAX_EVENT_PAYLOAD_BYTES:
            raise SizeError(
                f"event payload of {payload_bytes} bytes exceeds cap of "
                f"{MAX_EVENT_PAYLOAD_BYTES} bytes"
            )
        line = json.dumps(event.to_dict())
        with self._journal_lock:
            with open(self.events_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def scan_events(self, session_id: Optional[str] = None) -> list[InteractionEvent]:
        if not self.events_path.exists():
            return []
        events: list[InteractionEvent] = []
        with self._journal_lock:
            with open(self.events_path, encoding="utf-8") as fh:
                lines = fh.readlines()
        for line in lines:
            if not line.strip():
                continue
            event = InteractionEvent.from_dict(json.loads(line))
            if session_id is None or event.session_id == session_id:
                events.append(event)
        return events

    # ------------------------------------------------------------- feedback
    def append_feedback(self, record: FeedbackRecord) -> None:
        line = json.dumps(record.to_dict())
        with self._feedback_lock:
            with open(self.feedback_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def scan_feedback(self) -> list[FeedbackRecord]:
        return load_feedback_file(self.feedback_path)


class BestEffortJournal:
    """Wrapper that never lets logging failures break a tutoring turn;
    failed appends are counted instead."""

    def __init__(self, store: SessionStore) -> None:
        self._store = store
        self._dropped = 0
        self._lock = threading.Lock()

    @property
    def dropped(self) -> int:
        return self._dropped

    def append(self, event: InteractionEvent) -> None:
        try:
            self._store.append_event(event)
        except Exception:
            with self._lock:
                self._dropped += 1


def load_feedback_file(path: str | Path) -> list[FeedbackRecord]:
    p = Path(path)
    if not p.exists():
        return []
    records: list[FeedbackRecord] = []
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(FeedbackRecord.from_dict(json.loads(line)))
    return records


def aggregate_metrics(records: Iterable[FeedbackRecord]) -> list[MetricSummary]:
    """Per-metric mean and population standard deviation (Welford's method).

    Metrics with zero ratings are omitted; output follows the canonical
    metric order. Full precision is kept here; rounding happens only in
    report rendering.
    """
    counts: dict[str, int] = {m: 0 for m in METRICS}
    means: dict[str, float] = {m: 0.0 for m in METRICS}
    m2s: dict[str, float] = {m: 0.0 for m in METRICS}
    for record in records:
        for name, value in record.ratings.items():
            counts[name] += 1
            delta = value - means[name]
            means[name] += delta / counts[name]
            m2s[name] += delta * (value - means[name])
    return [
        MetricSummary(
            metric=m,
            mean=means[m],
            std_dev=math.sqrt(m2s[m] / counts[m]),
            n=counts[m],
        )
        for m in METRICS
        if counts[m] > 0
    ]


def render_metrics_table(summaries: Iterable[MetricSummary]) -> str:
    """Aligned text table with 1-decimal rounding, one row per metric."""
    rows = [("Metric", "Mean", "Std. Dev", "N")]
    for s in summaries:
        rows.append(
            (METRIC_LABELS.get(s.metric, s.metric), f"{s.mean:.1f}", f"{s.std_dev:.1f}", str(s.n))
        )
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    lines = []
    for i, row in enumerate(rows):
        lines.append(
            row[0].ljust(widths[0])
            + "  "
            + row[1].rjust(widths[1])
            + "  "
            + row[2].rjust(widths[2])
            + "  "
            + row[3].rjust(widths[3])
        )
        if i == 0:
            lines.append("-" * (sum(widths) + 6))
    return "\n".join(lines)
