"""Per-run event log: append-only, strictly increasing sequence numbers,
persisted as line-delimited JSON, with blocking reads for live streaming."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Event:
    run_id: str
    seq: int
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {"run_id": self.run_id, "seq": self.seq, "kind": self.kind,
                "payload": self.payload}


class EventLog:
    def __init__(self, run_id: str, path: Path | None = None):
        self.run_id = run_id
        self._path = path
        self._events: list[Event] = []
        self._cond = threading.Condition()
        if path is not None and path.exists():
            for line in path.read_text().splitlines():
                if line.strip():
                    raw = json.loads(line)
                    self._events.append(Event(raw["run_id"], raw["seq"],
                                              raw["kind"], raw["payload"]))

    def append(self, kind: str, payload: dict | None = None) -> Event:
        with self._cond:
            event = Event(self.run_id, len(self._events) + 1, kind,
                          payload or {})
            self._events.append(event)
            if self._path is not None:
                self._path.parent.mkdir(parents=True, exist_ok=True)
                with self._path.open("a") as fh:
                    fh.write(json.dumps(event.to_json()) + "\n")
            self._cond.notify_all()
        return event

    def snapshot(self) -> list[Event]:
        with self._cond:
            return list(self._events)

    def since(self, seq: int) -> list[Event]:
        with self._cond:
            return [e for e in self._events if e.seq > seq]

    def wait_since(self, seq: int, timeout: float = 10.0) -> list[Event]:
        """Events after ``seq``, blocking up to ``timeout`` for new ones."""
        with self._cond:
            fresh = [e for e in self._events if e.seq > seq]
            if fresh:
                return fresh
            self._cond.wait(timeout)
            return [e for e in self._events if e.seq > seq]
