"""Run configuration.

Every tunable of the pipeline lives here, loaded from a flat JSON document
whose keys mirror the field names. Unknown keys fail fast so a typo never
silently falls back to a default.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError
from .types import PhaseId


def _default_max_steps() -> dict[PhaseId, int]:
    steps = {phase: 25 for phase in PhaseId}
    steps[PhaseId.LITERATURE_REVIEW] = 100
    return steps


@dataclass
class Config:
    # literature review
    lit_review_paper_target: int = 5
    full_text_decay_steps: int = 3
    agent_temperature: float = 0.8
    # data preparation
    dataprep_timeout: float = 120.0
    # experiment solving
    solver_steps: int = 3
    repair_attempts: int = 2
    max_top_codes: int = 2
    error_history_len: int = 5
    code_history_len: int = 2
    comparison_trials: int = 2
    experiment_timeout: float = 600.0
    score_temperature: float = 0.6
    repair_temperature: float = 0.8
    initial_code_temperature: float = 1.0
    solver_temperature: float = 1.0
    # report writing
    papersolver_steps: int = 5
    max_top_papers: int = 1
    paper_history_len: int = 10
    writing_reviewers: int = 1
    refinement_reviewers: int = 3
    initial_paper_temperature: float = 0.8
    # phase step budgets and the completion nudge
    max_steps: dict[PhaseId, int] = field(default_factory=_default_max_steps)
    completion_nudge_fraction: float = 0.7
    # plumbing
    agent_history_len: int = 15
    stdout_budget: int = 10_000
    text_budget: int = 100_000
    max_output_tokens: int = 4096
    experiment_interpreter: str = "python3"
    latex_compiler: str = "auto"
    model_id: str = "mock"
    rewind_budget: int = 2
    phase_retries: int = 1
    checkpoint_timeout: float = 0.0  # 0 disables the co-pilot gate timeout

    def __post_init__(self):
        counts = [
            ("lit_review_paper_target", self.lit_review_paper_target),
            ("full_text_decay_steps", self.full_text_decay_steps),
            ("solver_steps", self.solver_steps),
            ("repair_attempts", self.repair_attempts),
            ("max_top_codes", self.max_top_codes),
            ("error_history_len", self.error_history_len),
            ("code_history_len", self.code_history_len),
            ("comparison_trials", self.comparison_trials),
            ("papersolver_steps", self.papersolver_steps),
            ("max_top_papers", self.max_top_papers),
            ("paper_history_len", self.paper_history_len),
            ("writing_reviewers", self.writing_reviewers),
            ("refinement_reviewers", self.refinement_reviewers),
            ("agent_history_len", self.agent_history_len),
            ("stdout_budget", self.stdout_budget),
            ("text_budget", self.text_budget),
            ("max_output_tokens", self.max_output_tokens),
        ]
        for name, value in counts:
            if value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        for phase, value in self.max_steps.items():
            if value < 1:
                raise ConfigError(
                    f"max_steps for {phase.label} must be >= 1, got {value}")
        temperatures = [
            ("agent_temperature", self.agent_temperature),
            ("score_temperature", self.score_temperature),
            ("repair_temperature", self.repair_temperature),
            ("initial_code_temperature", self.initial_code_temperature),
            ("solver_temperature", self.solver_temperature),
            ("initial_paper_temperature", self.initial_paper_temperature),
        ]
        for name, value in temperatures:
            if not 0.0 <= value <= 2.0:
                raise ConfigError(f"{name} must be in [0, 2], got {value}")
        if not 0.0 < self.completion_nudge_fraction <= 1.0:
            raise ConfigError("completion_nudge_fraction must be in (0, 1]")
        if self.dataprep_timeout <= 0 or self.experiment_timeout <= 0:
            raise ConfigError("timeouts must be positive")
        if self.rewind_budget < 0 or self.phase_retries < 0:
            raise ConfigError("budgets must be non-negative")

    def to_flat_dict(self) -> dict:
        """Flat key/value form, the same shape the config file uses."""
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "max_steps":
                for phase, steps in value.items():
                    out[_max_steps_key(phase)] = steps
            else:
                out[f.name] = value
        return out


def _max_steps_key(phase: PhaseId) -> str:
    return "max_steps_" + phase.label.replace(" ", "_")


_MAX_STEPS_KEYS = {_max_steps_key(phase): phase for phase in PhaseId}


def config_from_dict(raw: dict) -> Config:
    """Build a Config from a flat mapping; unknown keys are an error."""
    known = {f.name for f in dataclasses.fields(Config)} - {"max_steps"}
    kwargs = {}
    max_steps = _default_max_steps()
    for key, value in raw.items():
        if key in _MAX_STEPS_KEYS:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            max_steps[_MAX_STEPS_KEYS[key]] = value
        elif key in known:
            kwargs[key] = value
        else:
            raise ConfigError(f"unknown config key: {key!r}")
    return Config(max_steps=max_steps, **kwargs)


def load_config(path: str | Path) -> Config:
    """Load a run-config file (flat JSON object)."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    return config_from_dict(raw)
