"""Prompt assembly and history maintenance for dialogue agents."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .. import prompts
from .config import Config
from .types import AgentHistory, PhaseId, ResearchTask


@dataclass(frozen=True)
class AgentContext:
    """Everything an agent needs to be rendered into a prompt pair."""

    role_description: str
    phase_prompt: str
    command_descriptions: str
    context_prompt: str
    history: AgentHistory


@dataclass(frozen=True)
class RenderedPrompt:
    system: str
    user: str


def history_to_string(history: AgentHistory) -> str:
    return "\n".join(
        prompts.history_line(e.step, e.phase.label, e.feedback, e.response)
        for e in history.entries
    )


def nudge_threshold(config: Config, phase: PhaseId) -> int:
    return math.ceil(config.completion_nudge_fraction * config.max_steps[phase])


def render_prompt(ctx: AgentContext, phase: PhaseId, step: int, feedback: str,
                  task: ResearchTask, config: Config) -> RenderedPrompt:
    """Compose the system/user prompt pair for one agent turn.

    The user prompt interpolates, in order: the phase context, serialized
    history, the step counter, the phase name, the completion nudge (only
    once the step counter reaches the configured fraction of the phase's
    step budget), the topic, the latest feedback, the phase notes, and the
    agent's previous command.
    """
    system = prompts.base_system_prompt(
        ctx.role_description, ctx.phase_prompt, ctx.command_descriptions)
    complete_str = ""
    if step >= nudge_threshold(config, phase):
        complete_str = prompts.COMPLETION_NUDGE
    notes = prompts.notes_str("\n".join(task.notes_for(phase)))
    user = prompts.base_user_prompt(
        context_prompt=ctx.context_prompt,
        history_str=history_to_string(ctx.history),
        step=step,
        phase=phase.label,
        complete_str=complete_str,
        research_topic=task.topic,
        feedback=feedback,
        notes=notes,
        prev_command=ctx.history.prev_command,
    )
    return RenderedPrompt(system=system, user=user)


def decay_history(history: AgentHistory, config: Config) -> AgentHistory:
    """Expire full-text entries and enforce the owning bound.

    A full-text entry is dropped once more than ``full_text_decay_steps``
    newer entries exist; everything else is kept newest-first up to the
    bound. Applying this twice is the same as applying it once.
    """
    kept = []
    entries = history.entries
    for idx, entry in enumerate(entries):
        if entry.full_text:
            newer = sum(1 for e in entries[idx + 1:] if e.step > entry.step)
            if newer > config.full_text_decay_steps:
                continue
        kept.append(entry)
    if len(kept) > history.bound:
        kept = kept[len(kept) - history.bound:]
    return AgentHistory(bound=history.bound, entries=kept,
                        prev_command=history.prev_command)
