"""Domain types shared by every agent, solver, and the orchestrator."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class PhaseId(enum.Enum):
    """The seven pipeline phases, in execution order."""

    LITERATURE_REVIEW = "literature review"
    PLAN_FORMULATION = "plan formulation"
    DATA_PREPARATION = "data preparation"
    RUNNING_EXPERIMENTS = "running experiments"
    RESULTS_INTERPRETATION = "results interpretation"
    REPORT_WRITING = "report writing"
    REPORT_REFINEMENT = "report refinement"

    @property
    def label(self) -> str:
        return self.value

    @property
    def index(self) -> int:
        return _PHASE_ORDER.index(self)

    def next(self) -> "PhaseId | None":
        i = self.index
        if i + 1 >= len(_PHASE_ORDER):
            return None
        return _PHASE_ORDER[i + 1]

    @classmethod
    def ordered(cls) -> tuple["PhaseId", ...]:
        return _PHASE_ORDER

    @classmethod
    def from_label(cls, label: str) -> "PhaseId":
        normalized = label.strip().lower().replace("_", " ").replace("-", " ")
        for phase in cls:
            if phase.value == normalized:
                return phase
        raise ValueError(f"unknown phase: {label!r}")


_PHASE_ORDER = tuple(PhaseId)


class Mode(enum.Enum):
    AUTONOMOUS = "autonomous"
    COPILOT = "copilot"


@dataclass(frozen=True)
class ResearchTask:
    """Root input of a run: the topic, per-phase notes, and operating mode.

    ``notes`` maps each phase to free-form guidance strings that are
    interpolated into that phase's prompts. ``seed`` pins every random
    choice made during the run so that scripted runs replay exactly.
    """

    topic: str
    notes: dict[PhaseId, list[str]] = field(default_factory=dict)
    mode: Mode = Mode.AUTONOMOUS
    seed: int = 0

    def __post_init__(self):
        if not self.topic or not self.topic.strip():
            raise ValueError("topic must be non-empty")
        for key in self.notes:
            if not isinstance(key, PhaseId):
                raise ValueError(f"notes key is not a phase: {key!r}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def notes_for(self, phase: PhaseId) -> list[str]:
        return list(self.notes.get(phase, []))

    def with_extra_notes(self, phase: PhaseId, extra: list[str]) -> "ResearchTask":
        merged = {p: list(v) for p, v in self.notes.items()}
        merged.setdefault(phase, []).extend(extra)
        return ResearchTask(topic=self.topic, notes=merged, mode=self.mode,
                            seed=self.seed)


@dataclass(frozen=True)
class HistoryEntry:
    step: int
    phase: PhaseId
    feedback: str
    response: str
    # set when the feedback carries a full paper text, so the entry can be
    # expired out of prompts once enough newer turns exist
    full_text: bool = False


@dataclass
class AgentHistory:
    """Bounded, step-ordered record of an agent's past turns."""

    bound: int
    entries: list[HistoryEntry] = field(default_factory=list)
    prev_command: str = ""

    def append(self, entry: HistoryEntry) -> None:
        if self.entries and entry.step < self.entries[-1].step:
            raise ValueError("history entries must be appended in step order")
        self.entries.append(entry)
        if len(self.entries) > self.bound:
            del self.entries[: len(self.entries) - self.bound]


@dataclass(frozen=True)
class ReviewedPaper:
    arxiv_id: str
    summary: str


@dataclass(frozen=True)
class LiteratureReview:
    """Curated set of papers produced by the literature-review phase."""

    papers: tuple[ReviewedPaper, ...]
    degraded: bool = False

    def summary_string(self) -> str:
        return "\n".join(
            f"arXiv ID: {p.arxiv_id}, Summary: {p.summary}" for p in self.papers
        )


@dataclass(frozen=True)
class Plan:
    text: str


@dataclass(frozen=True)
class DatasetCode:
    code: str


@dataclass(frozen=True)
class Interpretation:
    text: str


PhaseOutput = LiteratureReview | Plan | DatasetCode | Interpretation
