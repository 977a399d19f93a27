"""Append-only session event log with line-delimited JSON persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import ParameterError


@dataclass(frozen=True)
class EventRecord:
    session_seconds: float
    wall_time: str
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {
            "session_seconds": self.session_seconds,
            "wall_time": self.wall_time,
            "kind": self.kind,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "EventRecord":
        return cls(
            session_seconds=float(obj["session_seconds"]),
            wall_time=str(obj["wall_time"]),
            kind=str(obj["kind"]),
            payload=dict(obj["payload"]),
        )


@dataclass
class EventLog:
    records: list[EventRecord] = field(default_factory=list)

    def append(self, session_seconds: float, kind: str, payload: dict) -> EventRecord:
        if self.records and session_seconds < self.records[-1].session_seconds - 1e-9:
            raise ParameterError(
                f"event log time went backwards: {session_seconds} after "
                f"{self.records[-1].session_seconds}"
            )
        rec = EventRecord(
            session_seconds=float(session_seconds),
            wall_time=datetime.now(timezone.utc).isoformat(),
            kind=kind,
            payload=payload,
        )
        self.records.append(rec)
        return rec

    def of_kind(self, kind: str) -> list[EventRecord]:
        return [r for r in self.records if r.kind == kind]

    @property
    def end_seconds(self) -> float:
        return self.records[-1].session_seconds if self.records else 0.0

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec.to_dict()) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "EventLog":
        log = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    log.records.append(EventRecord.from_dict(json.loads(line)))
        return log
