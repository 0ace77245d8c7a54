"""Run state: the orchestrator's single source of truth, persisted after
every phase boundary and gate decision so a run directory is self-contained
and resumable."""

from __future__ import annotations

import enum
import json
import os
import tempfile
import uuid
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from ..core import Config, Mode, PhaseId, ResearchTask, config_from_dict
from ..errors import ConfigError, CorruptStateError, RunNotFoundError

STATE_FILE = "state.json"
CONFIG_FILE = "config.json"


class RunStatus(enum.Enum):
    RUNNING = "running"
    AWAITING_DECISION = "awaiting_decision"
    COMPLETE = "complete"
    FAILED = "failed"


@dataclass(frozen=True)
class PhaseStats:
    phase: PhaseId
    wall_time: float
    cost: Decimal
    attempts: int
    succeeded: bool

    def __post_init__(self):
        if self.cost < 0 or self.wall_time < 0:
            raise ValueError("cost and wall time must be non-negative")

    def to_json(self) -> dict:
        return {"phase": self.phase.label, "wall_time": self.wall_time,
                "cost": str(self.cost), "attempts": self.attempts,
                "succeeded": self.succeeded}

    @classmethod
    def from_json(cls, raw: dict) -> "PhaseStats":
        return cls(phase=PhaseId.from_label(raw["phase"]),
                   wall_time=raw["wall_time"], cost=Decimal(raw["cost"]),
                   attempts=raw["attempts"], succeeded=raw["succeeded"])


@dataclass(frozen=True)
class HumanDecision:
    proceed: bool
    notes: tuple[str, ...] = ()
    decision_id: str = field(default_factory=lambda: uuid.uuid4().hex)

    def __post_init__(self):
        if not self.proceed:
            if not self.notes or not any(n.strip() for n in self.notes):
                raise ValueError("a retry decision needs at least one note")

    @classmethod
    def proceed_now(cls) -> "HumanDecision":
        return cls(proceed=True)

    @classmethod
    def retry(cls, notes: list[str]) -> "HumanDecision":
        return cls(proceed=False, notes=tuple(notes))


@dataclass
class RunState:
    run_id: str
    task: ResearchTask
    phase: PhaseId = PhaseId.LITERATURE_REVIEW
    status: RunStatus = RunStatus.RUNNING
    outputs: dict[PhaseId, dict] = field(default_factory=dict)
    attempt: dict[PhaseId, int] = field(
        default_factory=lambda: {p: 0 for p in PhaseId})
    telemetry: list[PhaseStats] = field(default_factory=list)
    previous_round: dict | None = None
    rewinds_used: int = 0
    gateway_calls: int = 0
    pending_gate: PhaseId | None = None
    failed_phase: PhaseId | None = None

    @property
    def seed(self) -> int:
        return self.task.seed

    def total_cost(self) -> Decimal:
        return sum((s.cost for s in self.telemetry), Decimal(0))

    def total_wall_time(self) -> float:
        return sum(s.wall_time for s in self.telemetry)

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "task": {
                "topic": self.task.topic,
                "notes": {p.label: list(v) for p, v in self.task.notes.items()},
                "mode": self.task.mode.value,
                "seed": self.task.seed,
            },
            "phase": self.phase.label,
            "status": self.status.value,
            "outputs": {p.label: v for p, v in self.outputs.items()},
            "attempt": {p.label: n for p, n in self.attempt.items()},
            "telemetry": [s.to_json() for s in self.telemetry],
            "previous_round": self.previous_round,
            "rewinds_used": self.rewinds_used,
            "gateway_calls": self.gateway_calls,
            "pending_gate": self.pending_gate.label if self.pending_gate else None,
            "failed_phase": self.failed_phase.label if self.failed_phase else None,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "RunState":
        task = ResearchTask(
            topic=raw["task"]["topic"],
            notes={PhaseId.from_label(label): list(notes)
                   for label, notes in raw["task"]["notes"].items()},
            mode=Mode(raw["task"]["mode"]),
            seed=raw["task"]["seed"],
        )
        return cls(
            run_id=raw["run_id"],
            task=task,
            phase=PhaseId.from_label(raw["phase"]),
            status=RunStatus(raw["status"]),
            outputs={PhaseId.from_label(label): value
                     for label, value in raw["outputs"].items()},
            attempt={PhaseId.from_label(label): n
                     for label, n in raw["attempt"].items()},
            telemetry=[PhaseStats.from_json(s) for s in raw["telemetry"]],
            previous_round=raw.get("previous_round"),
            rewinds_used=raw.get("rewinds_used", 0),
            gateway_calls=raw.get("gateway_calls", 0),
            pending_gate=(PhaseId.from_label(raw["pending_gate"])
                          if raw.get("pending_gate") else None),
            failed_phase=(PhaseId.from_label(raw["failed_phase"])
                          if raw.get("failed_phase") else None),
        )


def success_rates(states: list[RunState]) -> dict[PhaseId, float]:
    """Per-phase success rate over a batch of runs.

    A phase counts as succeeded for a run when its latest recorded attempt
    succeeded; runs that never reached the phase are excluded from its
    denominator.
    """
    rates: dict[PhaseId, float] = {}
    for phase in PhaseId:
        outcomes = []
        for state in states:
            attempts = [s for s in state.telemetry if s.phase is phase]
            if attempts:
                outcomes.append(attempts[-1].succeeded)
        if outcomes:
            rates[phase] = sum(outcomes) / len(outcomes)
    return rates


def save_state(state: RunState, run_dir: str | Path) -> Path:
    """Atomically write state.json inside the run directory."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    target = run_dir / STATE_FILE
    fd, tmp_name = tempfile.mkstemp(dir=run_dir, prefix=".state-")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(state.to_json(), fh, indent=2)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def save_config(config: Config, run_dir: str | Path) -> Path:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    target = run_dir / CONFIG_FILE
    target.write_text(json.dumps(config.to_flat_dict(), indent=2))
    return target


def load_state(run_dir: str | Path) -> RunState:
    """Reconstruct a RunState; refuses (preserving files) on corruption."""
    run_dir = Path(run_dir)
    target = run_dir / STATE_FILE
    if not target.exists():
        raise RunNotFoundError(f"no run state under {run_dir}")
    try:
        raw = json.loads(target.read_text())
        return RunState.from_json(raw)
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise CorruptStateError(
            f"cannot parse {target}: {exc}; files left untouched") from exc


def load_run_config(run_dir: str | Path) -> Config:
    target = Path(run_dir) / CONFIG_FILE
    if not target.exists():
        raise RunNotFoundError(f"no config snapshot under {run_dir}")
    try:
        return config_from_dict(json.loads(target.read_text()))
    except (json.JSONDecodeError, ConfigError, ValueError) as exc:
        raise CorruptStateError(f"cannot parse {target}: {exc}") from exc
